"""Monotone control systems, saturated feedback and the closed-loop operator.

A system bundles the forward evaluation of its governing operator M with
the resolvent (I + h M)^{-1}, the input map B, its adjoint B* and the
state-space inner product. The closed loop replaces the free input by the
projected damping injection u = P_F(u* - B*(x - x*)), which keeps the
control feasible by construction and preserves monotonicity of the
governing operator.
"""

from dataclasses import dataclass, field
from typing import Any, Callable

import numpy as np

from .errors import UsageError
from .projection import is_strictly_interior, project
from .spaces import InnerProduct, axpy, inner, norm, subtract


def pairing_scale(a, b, ip):
    """Tolerance scale for pairings: max(1, ||a||*||b||)."""
    return max(1.0, norm(a, ip) * norm(b, ip))


def residual_scale(x, ip):
    """Tolerance scale for residuals: max(1, ||x||)."""
    return max(1.0, norm(x, ip))


@dataclass(frozen=True)
class MonotoneControlSystem:
    """Operator bundle (M, B, B*) on a declared state inner product.

    `resolvent_M(h, rhs, tol=..., x0=None)` solves x + h*M(x) = rhs and is
    the primary computational object; forward evaluation exists alongside
    for residual checks and explicit terms. `input_norm_bound` bounds
    ||B||*||B*|| and drives the damping rule of the projected resolvent.
    `domain` is a descriptor of admissible states; membership is not
    enforced per node on the hot path.
    """

    name: str
    eval_M: Callable
    resolvent_M: Callable
    apply_B: Callable
    apply_Bstar: Callable
    ip: InnerProduct
    control_ip: InnerProduct
    input_norm_bound: float = 1.0
    domain: str = ""
    sample_state: Callable = None
    sample_control: Callable = None
    internals: Any = field(default=None, repr=False)


@dataclass(frozen=True)
class Equilibrium:
    """Controlled equilibrium (x*, u*) with -M(x*) + B u* = 0 up to residual_tol."""

    x_star: Any
    u_star: Any
    residual_tol: float


def equilibrium_residual(sys, x_star, u_star):
    """||-M(x*) + B u*|| in the state inner product."""
    return norm(subtract(sys.apply_B(u_star), sys.eval_M(x_star)), sys.ip)


def verify_equilibrium(sys, eq, F, delta=None):
    """Residual and strict-interiority check of a controlled equilibrium."""
    residual = equilibrium_residual(sys, eq.x_star, eq.u_star)
    if delta is None:
        interior = is_strictly_interior(F, eq.u_star)
    else:
        interior = is_strictly_interior(F, eq.u_star, delta)
    return residual, interior


def saturated_feedback(y, eq, F, y_star):
    """Projected damping injection P_F(u* - (y - y*)).

    The result is feasible for every input; at y = y* it returns u*
    exactly because u* lies in the interior of F.
    """
    return project(F, axpy(-1.0, subtract(y, y_star), eq.u_star))


@dataclass(frozen=True)
class ClosedLoopOperator:
    """M_cl(x) = M(x) - B P_F(u* - B*(x - x*)).

    Carries the base system, the constraint set and the target equilibrium;
    the equilibrium output y* = B* x* is cached at construction.
    """

    base: MonotoneControlSystem
    F: Any
    eq: Equilibrium
    y_star: Any = field(init=False)

    def __post_init__(self):
        object.__setattr__(self, "y_star", self.base.apply_Bstar(self.eq.x_star))

    @property
    def ip(self):
        return self.base.ip

    def feedback(self, y):
        return saturated_feedback(y, self.eq, self.F, self.y_star)

    def feedback_at(self, x):
        return self.feedback(self.base.apply_Bstar(x))


def eval_M_cl(cl, x):
    """Evaluate the closed-loop operator as the composition M - B o kappa o B*.

    This is the only evaluation path; tests recompute the same composition
    and the two must agree bitwise.
    """
    u = cl.feedback_at(x)
    return subtract(cl.base.eval_M(x), cl.base.apply_B(u))


@dataclass(frozen=True)
class MonotonicityReport:
    min_pairing: float
    min_scaled: float
    violations: int
    skipped: int
    pairs: int

    @property
    def passed(self):
        return self.violations == 0


def check_monotone(op, ip, sampler, n, rng, tol=1e-10):
    """Sampled monotonicity check of a state-to-state map.

    Draws n pairs from the sampler and reports the minimum pairing
    <op(x) - op(z), x - z>; a pair violates when the pairing drops below
    -tol * max(1, ||x||*||z||). Pairs the sampler fails to produce
    admissibly are skipped and counted.
    """
    if n < 2:
        raise UsageError("monotonicity check needs at least 2 samples")
    min_pairing = np.inf
    min_scaled = np.inf
    violations = 0
    skipped = 0
    done = 0
    while done < n:
        x = sampler(rng)
        z = sampler(rng)
        try:
            pairing = inner(subtract(op(x), op(z)), subtract(x, z), ip)
        except UsageError:
            skipped += 1
            continue
        scale = pairing_scale(x, z, ip)
        if pairing < -tol * scale:
            violations += 1
        min_pairing = min(min_pairing, pairing)
        min_scaled = min(min_scaled, pairing / scale)
        done += 1
    return MonotonicityReport(float(min_pairing), float(min_scaled), violations, skipped, done)


@dataclass(frozen=True)
class ZerProbeRow:
    direction: int
    magnitude: float
    residual: float


def zer_inclusion_probe(cl, directions, magnitudes):
    """Residuals of M_cl along kernel-of-B* rays through the equilibrium.

    Every zero of the closed-loop operator lies on x* + ker B*; probing
    x = x* + m*v for v in ker B* documents numerically which of those
    candidates are actual zeros (a consistency check, not a proof). A
    direction with ||B* v|| > 1e-12 is rejected.
    """
    rows = []
    for idx, v in enumerate(directions):
        if norm(cl.base.apply_Bstar(v), cl.base.control_ip) > 1e-12:
            raise UsageError(f"probe direction {idx} is not in ker B*")
        for m in magnitudes:
            x = axpy(float(m), v, cl.eq.x_star)
            rows.append(ZerProbeRow(idx, float(m), norm(eval_M_cl(cl, x), cl.ip)))
    return rows
