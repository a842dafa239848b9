"""Build script for the optional compiled stencil kernels.

The package is fully functional without the extension (a NumPy fallback is
selected at import time); building it just makes the hot loops faster.
Set HEISENHEAT_NO_EXT=1 to skip compilation entirely.
"""

import os

from setuptools import Extension, setup


def extension_modules():
    if os.environ.get("HEISENHEAT_NO_EXT") == "1":
        return []
    try:
        from Cython.Build import cythonize
    except ImportError:
        return []
    ext = Extension(
        "heisenheat._kernels._stencils",
        ["src/heisenheat/_kernels/_stencils.pyx"],
        extra_compile_args=["-O3", "-fno-math-errno"],
    )
    return cythonize([ext], compiler_directives={"language_level": 3})


setup(ext_modules=extension_modules())
