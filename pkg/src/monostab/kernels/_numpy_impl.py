"""Pure-numpy implementations of the grid kernels.

Reference semantics for the compiled backend; used automatically whenever
the extension module is unavailable or MONOSTAB_PURE_PYTHON=1 is set.
Arrays are C-contiguous float64 of shape (nx, ny); mask arrays are uint8.
"""

import numpy as np


def neumann_laplacian(v, hx, hy, out=None):
    """Five-point -laplacian on a full rectangle with mirror ghost nodes.

    The ghost value across an edge equals the first inner neighbor, which
    is the second-order zero-normal-derivative closure; row sums of the
    resulting operator vanish, so constants are mapped to zero exactly.
    """
    if out is None:
        out = np.empty_like(v)
    p = np.pad(v, 1, mode="reflect")
    c = p[1:-1, 1:-1]
    np.multiply(c, 2.0 / hx**2 + 2.0 / hy**2, out=out)
    out -= (p[:-2, 1:-1] + p[2:, 1:-1]) / hx**2
    out -= (p[1:-1, :-2] + p[1:-1, 2:]) / hy**2
    return out


def dirichlet_laplacian(v, interior, hx, hy, out=None):
    """Five-point -laplacian at interior nodes of a masked grid.

    Output is zero at non-interior nodes. Interior nodes are guaranteed by
    the mask builders to sit strictly inside the array, so neighbor reads
    never leave bounds; neighbor values at boundary/exterior nodes are the
    stored zeros, which realizes the homogeneous Dirichlet condition.
    """
    if out is None:
        out = np.zeros_like(v)
    else:
        out.fill(0.0)
    c = v[1:-1, 1:-1]
    stencil = (2.0 * c - v[:-2, 1:-1] - v[2:, 1:-1]) / hx**2
    stencil += (2.0 * c - v[1:-1, :-2] - v[1:-1, 2:]) / hy**2
    out[1:-1, 1:-1] = stencil * interior[1:-1, 1:-1]
    return out


def clamp(v, lo, hi, out=None):
    """Componentwise clamp of v to [lo, hi]."""
    if out is None:
        out = np.empty_like(v)
    np.clip(v, lo, hi, out=out)
    return out


def weighted_dot(a, b, w):
    """Sum of a*b*w over all nodes."""
    return float(np.sum(a * b * w))


def grad_inner(a, b, nonext, hx, hy):
    """Discrete-gradient inner product over edges between non-exterior nodes.

    Forward differences on cell edges, horizontal edges weighted hy/hx and
    vertical edges hx/hy, so that the form matches the masked five-point
    laplacian under summation by parts for fields vanishing on boundary
    nodes.
    """
    ex = (nonext[1:, :] & nonext[:-1, :]).astype(a.dtype)
    sx = float(np.sum((a[1:, :] - a[:-1, :]) * (b[1:, :] - b[:-1, :]) * ex))
    ey = (nonext[:, 1:] & nonext[:, :-1]).astype(a.dtype)
    sy = float(np.sum((a[:, 1:] - a[:, :-1]) * (b[:, 1:] - b[:, :-1]) * ey))
    return sx * hy / hx + sy * hx / hy


def axpy(alpha, x, y, out=None):
    """out = alpha*x + y."""
    if out is None:
        out = np.empty_like(x)
    np.multiply(x, alpha, out=out)
    out += y
    return out
