"""Dogbone domain and control-region masks for the wave example.

The domain is the union of two disks of radius R centered at (-d, 0) and
(d, 0) and a rectangular neck [-d+h', d-h'] x [-w, w], where
h' = sqrt(R^2 - w^2) is the abscissa offset of the disk/neck junction.

The control region consists of four pieces intersected with the interior
mask:

* two annular collars of thickness eps hugging the lobe boundaries,
  restricted to angular sectors that exclude the neck junctions: on the
  left lobe the collar spans polar angles [theta+gap, 360-theta-gap]
  (measured counterclockwise from the positive x axis at the lobe center),
  and on the right lobe the two sectors [0, 180-theta-gap] and
  [180+theta+gap, 360], with theta = asin(w/R) and `gap` the configured
  angular margin in degrees;
* two strips of thickness eps along the neck edges,
  w-eps <= |y| <= w over the neck span.

Curved boundaries are approximated by the node staircase; masks are data,
not geometry objects, so resolution is the only fidelity knob.
"""

from collections import deque
from dataclasses import dataclass

import numpy as np

from .errors import GeometryError
from .spaces import BOUNDARY, EXTERIOR, INTERIOR, Grid


@dataclass(frozen=True)
class DogboneGeometry:
    """Lobe radius, neck half-width, lobe offset, collar thickness, gap angle."""

    lobe_radius: float = 1.4
    neck_half_width: float = 0.6
    lobe_offset: float = 2.0
    collar_thickness: float = 0.4
    gap_deg: float = 40.0

    def __post_init__(self):
        if not 0 < self.neck_half_width < self.lobe_radius:
            raise GeometryError("neck half-width must lie in (0, lobe radius)")
        if self.lobe_offset <= self.junction_offset():
            raise GeometryError("lobes overlap: offset must exceed the junction abscissa")
        if not 0 < self.collar_thickness < self.lobe_radius:
            raise GeometryError("collar thickness must lie in (0, lobe radius)")
        if not 0 <= self.gap_deg < 180:
            raise GeometryError("gap angle must lie in [0, 180) degrees")

    def junction_offset(self):
        """h' = sqrt(R^2 - w^2), where the neck meets each lobe."""
        return float(np.sqrt(self.lobe_radius**2 - self.neck_half_width**2))

    def junction_angle_deg(self):
        """theta = asin(w/R) in degrees."""
        return float(np.degrees(np.arcsin(self.neck_half_width / self.lobe_radius)))

    def bounding_halfwidths(self):
        return self.lobe_offset + self.lobe_radius, self.lobe_radius


def dogbone_grid(geom, n):
    """Masked grid for the dogbone at resolution n cells per unit length.

    The bounding box is snapped to the grid spacing h = 1/n and padded by
    two cells on each side, so interior nodes never touch the array edge.
    """
    if n < 1:
        raise GeometryError("resolution must be at least 1 cell per unit length")
    h = 1.0 / n
    half_x, half_y = geom.bounding_halfwidths()
    half_x = (np.ceil(half_x * n) + 2) * h
    half_y = (np.ceil(half_y * n) + 2) * h
    nx = int(round(2 * half_x * n)) + 1
    ny = int(round(2 * half_y * n)) + 1
    bounds = (-half_x, half_x, -half_y, half_y)
    xs = -half_x + h * np.arange(nx)
    ys = -half_y + h * np.arange(ny)
    mask = dogbone_mask(geom, xs, ys)
    if geom.collar_thickness * n < 4:
        raise GeometryError(
            f"resolution too coarse: {geom.collar_thickness * n:.1f} cells across the "
            "collar, need at least 4"
        )
    return Grid.from_mask(mask, bounds)


def dogbone_mask(geom, xs, ys):
    """Mask array over the node coordinates xs, ys.

    Nodes inside the dogbone are tagged interior; inside nodes adjacent
    (4-neighborhood) to an outside node or to the array edge become
    boundary. Raises when the bounding box does not contain the dogbone or
    when the resulting interior is empty or disconnected.
    """
    R, w, d = geom.lobe_radius, geom.neck_half_width, geom.lobe_offset
    hp = geom.junction_offset()
    if xs[0] > -d - R or xs[-1] < d + R or ys[0] > -R or ys[-1] < R:
        raise GeometryError("grid bounding box does not contain the dogbone")

    X = xs[:, None]
    Y = ys[None, :]
    inside = (
        ((X + d) ** 2 + Y**2 <= R**2)
        | ((X - d) ** 2 + Y**2 <= R**2)
        | ((np.abs(Y) <= w) & (X >= -d + hp) & (X <= d - hp))
    )

    near_edge = np.zeros_like(inside)
    near_edge[0, :] = near_edge[-1, :] = near_edge[:, 0] = near_edge[:, -1] = True
    outside_nbr = near_edge.copy()
    outside_nbr[1:, :] |= ~inside[:-1, :]
    outside_nbr[:-1, :] |= ~inside[1:, :]
    outside_nbr[:, 1:] |= ~inside[:, :-1]
    outside_nbr[:, :-1] |= ~inside[:, 1:]

    mask = np.full(inside.shape, EXTERIOR, dtype=np.uint8)
    mask[inside & outside_nbr] = BOUNDARY
    mask[inside & ~outside_nbr] = INTERIOR

    if not np.any(mask == INTERIOR):
        raise GeometryError("resolution too coarse: no interior nodes")
    if not _connected(mask != EXTERIOR):
        raise GeometryError("dogbone mask is disconnected at this resolution")
    return mask


def control_region_mask(geom, grid):
    """Indicator (uint8) of the control region on the grid's interior nodes."""
    R, w, d = geom.lobe_radius, geom.neck_half_width, geom.lobe_offset
    eps = geom.collar_thickness
    hp = geom.junction_offset()
    theta = geom.junction_angle_deg()
    gap = geom.gap_deg

    X = grid.node_x()[:, None]
    Y = grid.node_y()[None, :]

    def collar(cx, sectors):
        r = np.hypot(X - cx, Y)
        ring = (r >= R - eps) & (r <= R)
        phi = np.degrees(np.arctan2(Y, X - cx)) % 360.0
        in_sector = np.zeros_like(ring)
        for lo, hi in sectors:
            in_sector |= (phi >= lo) & (phi <= hi)
        return ring & in_sector

    left = collar(-d, [(theta + gap, 360.0 - theta - gap)])
    right = collar(d, [(0.0, 180.0 - theta - gap), (180.0 + theta + gap, 360.0)])
    strips = (np.abs(Y) >= w - eps) & (np.abs(Y) <= w) & (X >= -d + hp) & (X <= d - hp)

    region = (left | right | strips) & (grid.mask == INTERIOR)
    if not np.any(region):
        raise GeometryError("control region is empty at this resolution")
    return region.astype(np.uint8)


def _connected(flags):
    """4-connectivity of the True nodes of a boolean array."""
    total = int(flags.sum())
    if total == 0:
        return False
    start = np.argwhere(flags)[0]
    seen = np.zeros_like(flags)
    queue = deque([(int(start[0]), int(start[1]))])
    seen[start[0], start[1]] = True
    nx, ny = flags.shape
    reached = 0
    while queue:
        i, j = queue.popleft()
        reached += 1
        for di, dj in ((1, 0), (-1, 0), (0, 1), (0, -1)):
            a, b = i + di, j + dj
            if 0 <= a < nx and 0 <= b < ny and flags[a, b] and not seen[a, b]:
                seen[a, b] = True
                queue.append((a, b))
    return reached == total


def mask_csv_text(grid, control):
    """`i,j,x,y,in_domain,in_control` rows for a geometry audit."""
    xs = grid.node_x()
    ys = grid.node_y()
    nonext = grid.nonext
    lines = ["i,j,x,y,in_domain,in_control"]
    for i in range(grid.nx):
        for j in range(grid.ny):
            lines.append(
                f"{i},{j},{xs[i]:.17g},{ys[j]:.17g},"
                f"{int(nonext[i, j])},{int(control[i, j])}"
            )
    return "\n".join(lines) + "\n"


def mask_to_csv(grid, control, path):
    """Write the geometry audit CSV."""
    with open(path, "w", newline="") as fh:
        fh.write(mask_csv_text(grid, control))
