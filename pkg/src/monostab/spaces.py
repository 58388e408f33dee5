"""State containers and inner products.

Three realizations of a Hilbert-space element are provided: dense
finite-dimensional vectors, scalar fields on masked uniform grids, and
displacement/velocity pairs for second-order dynamics. Grids are
node-centered on a rectangular bounding box; nodes carry a mask tag
(exterior / boundary / interior) and a trapezoid quadrature weight, and
exterior nodes always hold the literal value 0 so every field lives on one
rectangular array.
"""

from dataclasses import dataclass, field

import numpy as np

from . import kernels
from .errors import StructureError

EXTERIOR = 0
BOUNDARY = 1
INTERIOR = 2

MASK_NAMES = {EXTERIOR: "exterior", BOUNDARY: "boundary", INTERIOR: "interior"}


def _readonly(a):
    a = np.ascontiguousarray(a)
    a.setflags(write=False)
    return a


def trapezoid_weights(mask, hx, hy):
    """Quadrature weights for a masked node-centered grid.

    Per axis a node contributes a factor 0.5 for each existing non-exterior
    neighbor (so 1 inside, 0.5 on a one-sided edge); the node weight is
    hx*hy times the product of the two factors, and exterior nodes weigh 0.
    On a full rectangle this is the product trapezoid rule, exact for
    constants.
    """
    nonext = mask != EXTERIOR
    cx = np.zeros(mask.shape)
    cx[1:, :] += 0.5 * nonext[:-1, :]
    cx[:-1, :] += 0.5 * nonext[1:, :]
    cy = np.zeros(mask.shape)
    cy[:, 1:] += 0.5 * nonext[:, :-1]
    cy[:, :-1] += 0.5 * nonext[:, 1:]
    return hx * hy * cx * cy * nonext


@dataclass(frozen=True, eq=False)
class Grid:
    """Uniform node-centered grid with mask and quadrature weights.

    Node (i, j) sits at (x0 + i*hx, y0 + j*hy). `weights` defaults to the
    trapezoid rule of the mask but may be supplied explicitly, e.g. for a
    control sub-grid that inherits the weights of its parent state grid.
    """

    nx: int
    ny: int
    x0: float
    y0: float
    hx: float
    hy: float
    mask: np.ndarray
    weights: np.ndarray
    nonext: np.ndarray = field(init=False)
    interior: np.ndarray = field(init=False)
    ext_flat: np.ndarray = field(init=False)
    bnd_flat: np.ndarray = field(init=False)

    def __post_init__(self):
        if self.mask.shape != (self.nx, self.ny):
            raise StructureError("mask shape does not match grid dimensions")
        if self.weights.shape != (self.nx, self.ny):
            raise StructureError("weights shape does not match grid dimensions")
        object.__setattr__(self, "mask", _readonly(self.mask.astype(np.uint8)))
        object.__setattr__(self, "weights", _readonly(self.weights.astype(np.float64)))
        object.__setattr__(self, "nonext", _readonly((self.mask != EXTERIOR).astype(np.uint8)))
        object.__setattr__(self, "interior", _readonly((self.mask == INTERIOR).astype(np.uint8)))
        # flat node indices for the per-construction invariant checks
        object.__setattr__(self, "ext_flat", _readonly(np.flatnonzero(self.mask == EXTERIOR)))
        object.__setattr__(self, "bnd_flat", _readonly(np.flatnonzero(self.mask == BOUNDARY)))

    @classmethod
    def from_mask(cls, mask, bounds, weights=None):
        """Grid over bounds=(xmin, xmax, ymin, ymax) with the given mask."""
        nx, ny = mask.shape
        xmin, xmax, ymin, ymax = bounds
        hx = (xmax - xmin) / (nx - 1)
        hy = (ymax - ymin) / (ny - 1)
        if weights is None:
            weights = trapezoid_weights(mask, hx, hy)
        return cls(nx, ny, xmin, ymin, hx, hy, mask, weights)

    @classmethod
    def unit_square(cls, n):
        """Full (0,1)^2 grid, n nodes per side, edge nodes tagged boundary."""
        mask = np.full((n, n), INTERIOR, dtype=np.uint8)
        mask[0, :] = mask[-1, :] = mask[:, 0] = mask[:, -1] = BOUNDARY
        return cls.from_mask(mask, (0.0, 1.0, 0.0, 1.0))

    def node_x(self):
        return self.x0 + self.hx * np.arange(self.nx)

    def node_y(self):
        return self.y0 + self.hy * np.arange(self.ny)

    def compatible_with(self, other):
        if self is other:
            return True
        return (
            (self.nx, self.ny) == (other.nx, other.ny)
            and (self.x0, self.y0, self.hx, self.hy)
            == (other.x0, other.y0, other.hx, other.hy)
            and np.array_equal(self.mask, other.mask)
        )

    def quadrature_total(self):
        return float(self.weights.sum())


def _require_same_grid(a, b):
    if not a.grid.compatible_with(b.grid):
        raise StructureError("grid mismatch between operands")


@dataclass(frozen=True, eq=False)
class DenseVector:
    """Finite real vector; constructors reject NaN/Inf entries."""

    entries: np.ndarray

    def __post_init__(self):
        e = np.asarray(self.entries, dtype=np.float64).reshape(-1)
        if not np.all(np.isfinite(e)):
            raise StructureError("non-finite entries in DenseVector")
        object.__setattr__(self, "entries", _readonly(e))

    def __len__(self):
        return self.entries.size


@dataclass(frozen=True, eq=False)
class GridField:
    """Scalar field on a masked grid; exterior nodes hold exactly 0."""

    grid: Grid
    values: np.ndarray

    def __post_init__(self):
        v = np.asarray(self.values, dtype=np.float64)
        if v.shape != self.grid.mask.shape:
            raise StructureError("field shape does not match grid")
        if not np.all(np.isfinite(v)):
            raise StructureError("non-finite entries in GridField")
        v = np.ascontiguousarray(v)
        if v.reshape(-1)[self.grid.ext_flat].any():
            raise StructureError("nonzero values at exterior nodes")
        object.__setattr__(self, "values", _readonly(v))

    @classmethod
    def zeros(cls, grid):
        return cls(grid, np.zeros((grid.nx, grid.ny)))

    @classmethod
    def from_function(cls, grid, fn):
        """Sample fn(x, y) at non-exterior nodes, zero elsewhere."""
        xx = grid.node_x()[:, None]
        yy = grid.node_y()[None, :]
        vals = fn(xx, yy) * (grid.mask != EXTERIOR)
        return cls(grid, vals)


@dataclass(frozen=True, eq=False)
class WaveState:
    """Displacement/velocity pair sharing one grid.

    The displacement vanishes on boundary and exterior nodes (the discrete
    zero-trace condition); the velocity is only required to vanish on
    exterior nodes.
    """

    displacement: GridField
    velocity: GridField

    def __post_init__(self):
        _require_same_grid(self.displacement, self.velocity)
        g = self.displacement.grid
        if self.displacement.values.reshape(-1)[g.bnd_flat].any():
            raise StructureError("displacement must vanish on boundary nodes")

    @property
    def grid(self):
        return self.displacement.grid

    @classmethod
    def zeros(cls, grid):
        z = GridField.zeros(grid)
        return cls(z, z)


@dataclass(frozen=True, eq=False)
class InnerProduct:
    """Declared bilinear form: euclidean, l2-grid or energy.

    l2-grid is the quadrature-weighted sum over nodes; energy pairs the
    discrete gradients of the displacements plus the l2-grid product of the
    velocities.
    """

    kind: str
    grid: Grid = None

    def __post_init__(self):
        if self.kind not in ("euclidean", "l2-grid", "energy"):
            raise StructureError(f"unknown inner product kind {self.kind!r}")
        if self.kind != "euclidean" and self.grid is None:
            raise StructureError(f"{self.kind} inner product requires a grid")


EUCLIDEAN = InnerProduct("euclidean")


def inner(a, b, ip):
    """Evaluate the inner product ip on a pair of same-realization states."""
    if ip.kind == "euclidean":
        if not isinstance(a, DenseVector) or not isinstance(b, DenseVector):
            raise StructureError("euclidean inner product expects DenseVector")
        if len(a) != len(b):
            raise StructureError("length mismatch")
        return float(np.dot(a.entries, b.entries))
    if ip.kind == "l2-grid":
        _require_same_grid(a, b)
        if not a.grid.compatible_with(ip.grid):
            raise StructureError("field grid does not match inner product grid")
        return kernels.weighted_dot(a.values, b.values, ip.grid.weights)
    # energy
    if not isinstance(a, WaveState) or not isinstance(b, WaveState):
        raise StructureError("energy inner product expects WaveState")
    _require_same_grid(a.displacement, b.displacement)
    g = ip.grid
    if not a.grid.compatible_with(g):
        raise StructureError("state grid does not match inner product grid")
    gi = kernels.grad_inner(
        a.displacement.values, b.displacement.values, g.nonext, g.hx, g.hy
    )
    return gi + kernels.weighted_dot(a.velocity.values, b.velocity.values, g.weights)


def norm(a, ip):
    """sqrt(inner(a, a, ip)); the summands are squares, so this is safe."""
    return float(np.sqrt(inner(a, a, ip)))


def axpy(alpha, a, b):
    """alpha*a + b for any matching pair of state realizations."""
    if isinstance(a, DenseVector):
        if not isinstance(b, DenseVector) or len(a) != len(b):
            raise StructureError("operand mismatch in axpy")
        return DenseVector(alpha * a.entries + b.entries)
    if isinstance(a, GridField):
        if not isinstance(b, GridField):
            raise StructureError("operand mismatch in axpy")
        _require_same_grid(a, b)
        return GridField(a.grid, kernels.axpy(alpha, a.values, b.values))
    if isinstance(a, WaveState):
        if not isinstance(b, WaveState):
            raise StructureError("operand mismatch in axpy")
        return WaveState(
            axpy(alpha, a.displacement, b.displacement),
            axpy(alpha, a.velocity, b.velocity),
        )
    raise StructureError(f"unsupported state type {type(a).__name__}")


def scale(alpha, a):
    """alpha*a."""
    if isinstance(a, DenseVector):
        return DenseVector(alpha * a.entries)
    if isinstance(a, GridField):
        return GridField(a.grid, alpha * a.values)
    if isinstance(a, WaveState):
        return WaveState(scale(alpha, a.displacement), scale(alpha, a.velocity))
    raise StructureError(f"unsupported state type {type(a).__name__}")


def subtract(a, b):
    """a - b."""
    return axpy(-1.0, b, a)


def mean_project(f):
    """Remove the quadrature mean of a field over its non-exterior nodes.

    Returns f - mean(f) with the mean taken against the grid's quadrature
    weights; the output has quadrature mean zero up to rounding and the
    operation is idempotent.
    """
    total = f.grid.quadrature_total()
    if total == 0.0:
        raise StructureError("mean_project on an all-exterior mask")
    mean = kernels.weighted_dot(f.values, f.grid.nonext.astype(np.float64), f.grid.weights)
    mean /= total
    return GridField(f.grid, (f.values - mean) * f.grid.nonext)


def quadrature_mean(f):
    """Quadrature average of a field over non-exterior nodes."""
    total = f.grid.quadrature_total()
    if total == 0.0:
        raise StructureError("quadrature_mean on an all-exterior mask")
    s = kernels.weighted_dot(f.values, f.grid.nonext.astype(np.float64), f.grid.weights)
    return s / total


def grid_field_to_csv(f, path):
    """Write a field as CSV rows `i,j,x,y,value,mask`, row-major in i."""
    xs = f.grid.node_x()
    ys = f.grid.node_y()
    with open(path, "w", newline="") as fh:
        fh.write("i,j,x,y,value,mask\n")
        for i in range(f.grid.nx):
            for j in range(f.grid.ny):
                fh.write(
                    f"{i},{j},{xs[i]:.17g},{ys[j]:.17g},"
                    f"{f.values[i, j]:.17g},{int(f.grid.mask[i, j])}\n"
                )
