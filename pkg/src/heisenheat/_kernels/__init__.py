"""Stencil kernel backends.

Two interchangeable implementations of the hot loops exist: a compiled
Cython extension (_stencils) and a NumPy fallback (_stencils_py).  The
compiled one is preferred when importable; set HEISENHEAT_PURE_PYTHON=1
to force the fallback.  Both expose the same functions with identical
signatures, and the test suite pins them to agree to near machine
precision.
"""

from __future__ import annotations

import os

if os.environ.get("HEISENHEAT_PURE_PYTHON") == "1":
    from . import _stencils_py as impl

    COMPILED = False
else:
    try:
        from . import _stencils as impl  # type: ignore[no-redef]

        COMPILED = True
    except ImportError:
        from . import _stencils_py as impl  # type: ignore[no-redef]

        COMPILED = False


def backend_name() -> str:
    return "compiled" if COMPILED else "numpy"


def get_impl(name: str | None = None):
    """Fetch a specific backend module ("compiled" or "numpy").

    With no argument, returns whichever backend was selected at import.
    """
    if name is None:
        return impl
    if name == "numpy":
        from . import _stencils_py

        return _stencils_py
    if name == "compiled":
        from . import _stencils  # raises ImportError if not built

        return _stencils
    raise ValueError(f"unknown kernel backend {name!r}")
