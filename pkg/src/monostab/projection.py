"""Closed convex constraint sets and their exact orthogonal projection.

Only interval boxes applied pointwise are implemented; every reference
system uses one, and the closed-form clamp keeps the projection exact. The
check_* helpers turn the projection inequalities used throughout the
stability analysis into sampled, quantitative reports.
"""

from dataclasses import dataclass

import numpy as np

from . import kernels
from .errors import StructureError, UsageError
from .spaces import DenseVector, GridField, inner, norm, subtract

FIRM_SLACK_TOL = 1e-12
LIPSCHITZ_TOL = 1e-12
INTERIOR_MARGIN = 1e-9


@dataclass(frozen=True)
class BoxConstraint:
    """Pointwise interval box {u : lower <= u <= upper}.

    Nonempty, closed and convex by construction. The `kind` field leaves
    room for other exactly-projectable sets (balls, half-spaces).
    """

    lower: float
    upper: float
    kind: str = "interval-box"

    def __post_init__(self):
        if not self.lower < self.upper:
            raise StructureError("box constraint requires lower < upper")


def project(F, u):
    """U-orthogonal projection of a control onto F (componentwise clamp).

    Total on finite inputs; the result lies in F and u is a fixed point
    exactly when u is already feasible.
    """
    if isinstance(u, DenseVector):
        return DenseVector(np.clip(u.entries, F.lower, F.upper))
    if isinstance(u, GridField):
        clamped = kernels.clamp(u.values, F.lower, F.upper)
        return GridField(u.grid, clamped * u.grid.nonext)
    raise StructureError(f"unsupported control type {type(u).__name__}")


def _support_values(u):
    if isinstance(u, DenseVector):
        return u.entries
    if isinstance(u, GridField):
        return u.values[u.grid.nonext.astype(bool)]
    raise StructureError(f"unsupported control type {type(u).__name__}")


def feasibility_margin(F, u):
    """Min distance of the control values to the box bounds (>= 0 iff feasible)."""
    v = _support_values(u)
    if v.size == 0:
        raise UsageError("control has empty support")
    return float(min(np.min(v - F.lower), np.min(F.upper - v)))


def sup_norm(u):
    """Max absolute control value over the support."""
    return float(np.max(np.abs(_support_values(u))))


def is_strictly_interior(F, u, delta=INTERIOR_MARGIN):
    """Certified interiority with a strict margin delta.

    Floating-point equality with a bound must not count as interior, so a
    control is accepted only if lower+delta <= u <= upper-delta throughout.
    """
    if delta <= 0:
        raise UsageError("interior margin must be positive")
    return feasibility_margin(F, u) >= delta


@dataclass(frozen=True)
class FirmNonexpansiveReport:
    min_slack: float
    violations: int
    pairs: int

    @property
    def passed(self):
        return self.violations == 0


@dataclass(frozen=True)
class LipschitzReport:
    max_ratio: float
    skipped: int
    pairs: int

    @property
    def passed(self):
        return self.max_ratio <= 1.0 + LIPSCHITZ_TOL


def check_firm_nonexpansive(F, pairs, ip):
    """Sampled firm-nonexpansiveness check of the projection.

    For each pair (u, v) computes the slack
    <P u - P v, u - v> - ||P u - P v||^2, which is nonnegative for the
    exact projection; a pair counts as a violation when its slack drops
    below -1e-12 * max(1, ||u|| * ||v||).
    """
    min_slack = np.inf
    violations = 0
    count = 0
    for u, v in pairs:
        pu = project(F, u)
        pv = project(F, v)
        d = subtract(pu, pv)
        slack = inner(d, subtract(u, v), ip) - inner(d, d, ip)
        scale = max(1.0, norm(u, ip) * norm(v, ip))
        if slack < -FIRM_SLACK_TOL * scale:
            violations += 1
        min_slack = min(min_slack, slack)
        count += 1
    if count == 0:
        raise UsageError("check_firm_nonexpansive needs at least one pair")
    return FirmNonexpansiveReport(float(min_slack), violations, count)


def check_lipschitz(F, pairs, ip):
    """Sampled 1-Lipschitz check ||P u - P v|| <= ||u - v||.

    Coincident pairs cannot be rated and are skipped but counted.
    """
    max_ratio = 0.0
    skipped = 0
    count = 0
    for u, v in pairs:
        dn = norm(subtract(u, v), ip)
        if dn == 0.0:
            skipped += 1
            continue
        pn = norm(subtract(project(F, u), project(F, v)), ip)
        max_ratio = max(max_ratio, pn / dn)
        count += 1
    if count == 0 and skipped == 0:
        raise UsageError("check_lipschitz needs at least one pair")
    return LipschitzReport(float(max_ratio), skipped, count)
