"""Grids, scalar fields, quadrature, and field serialization.

Two grid families cover the computations:

* BoxGrid3: a full 3-D box [-X,X] x [-Y,Y] x [-T,T] in the coordinates
  (x, y, tau) of H^1, used by the direct and composed stencils.
* CylGrid: the reduced (r, tau) rectangle (0, r_max] x [-tau_half, tau_half]
  for fields invariant under rotations of the z = (x, y) block, with radial
  volume weight sigma_2N * r^(2N-1), sigma_2N = 2 pi^N / (N-1)!.

All axes are cell-centered: node i of an axis spanning [a, b] with n cells
sits at a + (i + 1/2) h, h = (b - a)/n.  The midpoint quadrature rule is
then exact on constants, symmetric node sets make odd integrands cancel,
and smooth integrands converge at second order.

Fields serialize to a small binary format (magic "HHF1": header with grid
metadata, then row-major float64 values) and, for small grids, to CSV with
full-precision decimal values.
"""

from __future__ import annotations

import csv
import math
import struct
from dataclasses import dataclass
from pathlib import Path

import numpy as np

__all__ = [
    "BoxGrid3",
    "CylGrid",
    "ScalarField",
    "field_from_function",
    "integrate",
    "inner_product",
    "linf_norm",
    "boundary_mask",
    "quadrature_weights",
    "save_field_binary",
    "load_field_binary",
    "save_field_csv",
    "load_field_csv",
]

_MIN_NODES = 5


def _cell_centers(lo: float, hi: float, n: int) -> np.ndarray:
    h = (hi - lo) / n
    return lo + (np.arange(n) + 0.5) * h


@dataclass(frozen=True)
class BoxGrid3:
    """Cell-centered box grid on [-X,X] x [-Y,Y] x [-T,T]."""

    half_extent: tuple[float, float, float]
    shape: tuple[int, int, int]

    def __post_init__(self):
        object.__setattr__(self, "half_extent", tuple(float(v) for v in self.half_extent))
        object.__setattr__(self, "shape", tuple(int(v) for v in self.shape))
        if len(self.half_extent) != 3 or len(self.shape) != 3:
            raise ValueError("half_extent and shape must have three entries")
        if any(v <= 0 or not math.isfinite(v) for v in self.half_extent):
            raise ValueError(f"half extents must be positive, got {self.half_extent}")
        if any(n < _MIN_NODES for n in self.shape):
            raise ValueError(f"need at least {_MIN_NODES} nodes per axis, got {self.shape}")

    @property
    def spacing(self) -> tuple[float, float, float]:
        return tuple(2.0 * e / n for e, n in zip(self.half_extent, self.shape))

    def axis(self, k: int) -> np.ndarray:
        e, n = self.half_extent[k], self.shape[k]
        return _cell_centers(-e, e, n)

    def coords(self) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
        """Axes reshaped for broadcasting over the full (nx, ny, nt) array."""
        x, y, t = (self.axis(k) for k in range(3))
        return x[:, None, None], y[None, :, None], t[None, None, :]

    @property
    def cell_volume(self) -> float:
        hx, hy, ht = self.spacing
        return hx * hy * ht


@dataclass(frozen=True)
class CylGrid:
    """Cell-centered (r, tau) grid for z-rotation-invariant fields on H^N."""

    r_max: float
    tau_half: float
    nr: int
    ntau: int
    n: int = 1

    def __post_init__(self):
        object.__setattr__(self, "r_max", float(self.r_max))
        object.__setattr__(self, "tau_half", float(self.tau_half))
        object.__setattr__(self, "nr", int(self.nr))
        object.__setattr__(self, "ntau", int(self.ntau))
        object.__setattr__(self, "n", int(self.n))
        if self.r_max <= 0 or self.tau_half <= 0:
            raise ValueError("r_max and tau_half must be positive")
        if not (math.isfinite(self.r_max) and math.isfinite(self.tau_half)):
            raise ValueError("grid extents must be finite")
        if self.nr < _MIN_NODES or self.ntau < _MIN_NODES:
            raise ValueError(f"need at least {_MIN_NODES} nodes per axis")
        if self.n < 1:
            raise ValueError("group index n must be >= 1")

    @property
    def spacing(self) -> tuple[float, float]:
        return self.r_max / self.nr, 2.0 * self.tau_half / self.ntau

    @property
    def r(self) -> np.ndarray:
        return _cell_centers(0.0, self.r_max, self.nr)

    @property
    def tau(self) -> np.ndarray:
        return _cell_centers(-self.tau_half, self.tau_half, self.ntau)

    def coords(self) -> tuple[np.ndarray, np.ndarray]:
        return self.r[:, None], self.tau[None, :]

    @property
    def shape(self) -> tuple[int, int]:
        return self.nr, self.ntau

    @property
    def sphere_factor(self) -> float:
        """Surface measure of the unit sphere in the z block: 2 pi^N / (N-1)!."""
        return 2.0 * math.pi**self.n / math.factorial(self.n - 1)

    def radial_weight(self) -> np.ndarray:
        """r^(2N-1) on the radial axis."""
        return self.r ** (2 * self.n - 1)


@dataclass(frozen=True)
class ScalarField:
    grid: BoxGrid3 | CylGrid
    values: np.ndarray

    def __post_init__(self):
        vals = np.asarray(self.values, dtype=float)
        object.__setattr__(self, "values", vals)
        if vals.shape != tuple(self.grid.shape):
            raise ValueError(
                f"values shape {vals.shape} does not match grid shape {self.grid.shape}"
            )

    def copy(self) -> "ScalarField":
        return ScalarField(self.grid, self.values.copy())


def field_from_function(grid, fn) -> ScalarField:
    """Sample a vectorized function of the grid coordinates at the nodes."""
    coords = grid.coords()
    values = np.broadcast_to(np.asarray(fn(*coords), dtype=float), grid.shape).copy()
    return ScalarField(grid, values)


def quadrature_weights(grid) -> np.ndarray:
    """Per-node quadrature weights, broadcastable against field values."""
    if isinstance(grid, BoxGrid3):
        return np.full((1, 1, 1), grid.cell_volume)
    dr, dtau = grid.spacing
    w = grid.sphere_factor * grid.radial_weight() * dr * dtau
    return w[:, None]


def integrate(f: ScalarField) -> float:
    return float(np.sum(f.values * quadrature_weights(f.grid)))


def inner_product(a: ScalarField, b: ScalarField) -> float:
    if a.grid != b.grid:
        raise ValueError("inner product requires fields on the same grid")
    return float(np.sum(a.values * b.values * quadrature_weights(a.grid)))


def linf_norm(f: ScalarField) -> float:
    return float(np.max(np.abs(f.values)))


def boundary_mask(grid, bandwidth: int = 1) -> np.ndarray:
    """True on nodes within `bandwidth` cells of a Dirichlet face.

    For the cylinder the axis r = 0 is a coordinate artifact, not a
    boundary, so only the outer radial face and the two tau faces count.
    """
    b = int(bandwidth)
    mask = np.zeros(grid.shape, dtype=bool)
    if isinstance(grid, BoxGrid3):
        for ax in range(3):
            sl = [slice(None)] * 3
            sl[ax] = slice(0, b)
            mask[tuple(sl)] = True
            sl[ax] = slice(grid.shape[ax] - b, None)
            mask[tuple(sl)] = True
        return mask
    mask[grid.nr - b :, :] = True
    mask[:, :b] = True
    mask[:, grid.ntau - b :] = True
    return mask


# ---------------------------------------------------------------------------
# serialization
# ---------------------------------------------------------------------------

_MAGIC = b"HHF1"
_KIND_BOX = 0
_KIND_CYL = 1


def save_field_binary(f: ScalarField, path) -> None:
    g = f.grid
    with open(path, "wb") as fh:
        fh.write(_MAGIC)
        fh.write(struct.pack("<I", 1))  # format version
        if isinstance(g, BoxGrid3):
            fh.write(struct.pack("<B", _KIND_BOX))
            fh.write(struct.pack("<3d", *g.half_extent))
            fh.write(struct.pack("<3q", *g.shape))
        else:
            fh.write(struct.pack("<B", _KIND_CYL))
            fh.write(struct.pack("<2d", g.r_max, g.tau_half))
            fh.write(struct.pack("<3q", g.nr, g.ntau, g.n))
        fh.write(np.ascontiguousarray(f.values, dtype="<f8").tobytes())


def load_field_binary(path) -> ScalarField:
    raw = Path(path).read_bytes()
    if raw[:4] != _MAGIC:
        raise ValueError(f"{path}: not a field file (bad magic {raw[:4]!r})")
    (version,) = struct.unpack_from("<I", raw, 4)
    if version != 1:
        raise ValueError(f"{path}: unsupported format version {version}")
    (kind,) = struct.unpack_from("<B", raw, 8)
    off = 9
    if kind == _KIND_BOX:
        ext = struct.unpack_from("<3d", raw, off)
        shape = struct.unpack_from("<3q", raw, off + 24)
        off += 48
        grid = BoxGrid3(ext, shape)
    elif kind == _KIND_CYL:
        r_max, tau_half = struct.unpack_from("<2d", raw, off)
        nr, ntau, n = struct.unpack_from("<3q", raw, off + 16)
        off += 40
        grid = CylGrid(r_max=r_max, tau_half=tau_half, nr=nr, ntau=ntau, n=n)
    else:
        raise ValueError(f"{path}: unknown grid kind {kind}")
    count = int(np.prod(grid.shape))
    values = np.frombuffer(raw, dtype="<f8", count=count, offset=off).reshape(grid.shape)
    return ScalarField(grid, values.copy())


def _grid_meta(grid) -> str:
    if isinstance(grid, BoxGrid3):
        ext = ";".join(repr(v) for v in grid.half_extent)
        shp = ";".join(str(v) for v in grid.shape)
        return f"kind=box extent={ext} shape={shp}"
    return (
        f"kind=cyl r_max={grid.r_max!r} tau_half={grid.tau_half!r} "
        f"nr={grid.nr} ntau={grid.ntau} n={grid.n}"
    )


def _grid_from_meta(meta: str):
    fields = dict(tok.split("=", 1) for tok in meta.split())
    if fields["kind"] == "box":
        ext = tuple(float(v) for v in fields["extent"].split(";"))
        shape = tuple(int(v) for v in fields["shape"].split(";"))
        return BoxGrid3(ext, shape)
    if fields["kind"] == "cyl":
        return CylGrid(
            r_max=float(fields["r_max"]),
            tau_half=float(fields["tau_half"]),
            nr=int(fields["nr"]),
            ntau=int(fields["ntau"]),
            n=int(fields["n"]),
        )
    raise ValueError(f"unknown grid kind in CSV metadata: {fields['kind']!r}")


def save_field_csv(f: ScalarField, path) -> None:
    """CSV form for small grids: one row per node, full-precision values."""
    indices = list(np.ndindex(*f.grid.shape))
    with open(path, "w", newline="") as fh:
        fh.write(f"# heisenheat-field v1 {_grid_meta(f.grid)}\n")
        writer = csv.writer(fh)
        writer.writerow([f"i{k}" for k in range(len(f.grid.shape))] + ["value"])
        for idx in indices:
            writer.writerow(list(idx) + [repr(float(f.values[idx]))])


def load_field_csv(path) -> ScalarField:
    with open(path, newline="") as fh:
        first = fh.readline()
        if not first.startswith("# heisenheat-field v1 "):
            raise ValueError(f"{path}: not a field CSV")
        grid = _grid_from_meta(first[len("# heisenheat-field v1 ") :].strip())
        reader = csv.reader(fh)
        next(reader)  # header row
        values = np.zeros(grid.shape)
        for row in reader:
            idx = tuple(int(v) for v in row[:-1])
            values[idx] = float(row[-1])
    return ScalarField(grid, values)
