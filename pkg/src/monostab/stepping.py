"""Time discretization of x' = -M_cl(x) built from resolvents.

Proximal (backward Euler) stepping applies one closed-loop resolvent per
step and therefore inherits nonexpansiveness exactly: distances to the
equilibrium cannot grow beyond solver tolerance. The IMEX variant treats
the feedback explicitly, and the Crank-Nicolson kind performs a midpoint
solve with the feedback evaluated at a predicted half-step output, which
keeps the linear part energy-conserving and the recorded control exactly
feasible.
"""

import math
from dataclasses import dataclass, field
from typing import Any

from .errors import ConvergenceError, UsageError
from .projection import feasibility_margin, sup_norm
from .spaces import WaveState, axpy, inner, norm, scale, subtract
from .system import ClosedLoopOperator, eval_M_cl


@dataclass(frozen=True)
class StepScheme:
    """Scheme kind plus inner-solver settings.

    damping=None applies the rule: plain fixed-point iteration while
    h*||B||*||B*|| <= 0.5, factor 0.5 otherwise. `corrections` is the
    number of midpoint feedback re-evaluations in the Crank-Nicolson kind.
    """

    kind: str
    dt: float
    tol: float = 1e-10
    max_iter: int = 200
    damping: float = None
    corrections: int = 1

    def __post_init__(self):
        if self.kind not in ("proximal", "imex", "crank-nicolson"):
            raise UsageError(f"unknown scheme kind {self.kind!r}")
        if not self.dt > 0:
            raise UsageError("dt must be positive")
        if not self.tol > 0:
            raise UsageError("tol must be positive")


@dataclass(frozen=True)
class OpenLoop:
    """Autonomous flow of a system with the input held at zero."""

    base: Any

    @property
    def ip(self):
        return self.base.ip

    def feedback_at(self, x):
        return None


def _flow_eval(flow, x):
    if isinstance(flow, ClosedLoopOperator):
        return eval_M_cl(flow, x)
    return flow.base.eval_M(x)


def resolvent_solve(flow, h, rhs, tol=1e-10, max_iter=200, damping=None, x0=None):
    """Solve x + h*M(x) = rhs for the flow's governing operator.

    For an open loop this is a single base resolvent. For the closed loop
    the projection nonlinearity is peeled off by the damped fixed point

        x <- (I + h M)^{-1}(rhs + h B P_F(u* - B*(x - x*)))

    which contracts with factor h*||B||*||B*|| and is verified against the
    true residual ||x + h M_cl(x) - rhs|| <= tol*max(1, ||rhs||) before
    returning.
    """
    if not h > 0:
        raise UsageError("resolvent step size must be positive")
    base = flow.base
    if not isinstance(flow, ClosedLoopOperator):
        return base.resolvent_M(h, rhs, tol=tol, x0=x0)

    if damping is None:
        damping = 1.0 if h * base.input_norm_bound**2 <= 0.5 else 0.5
    target = tol * max(1.0, norm(rhs, flow.ip))
    inner_tol = 0.1 * tol
    x = rhs if x0 is None else x0
    residual = math.inf
    for _ in range(max_iter):
        u = flow.feedback_at(x)
        cand = base.resolvent_M(h, axpy(h, base.apply_B(u), rhs), tol=inner_tol, x0=x)
        if damping != 1.0:
            cand = axpy(damping, subtract(cand, x), x)
        residual = norm(subtract(axpy(h, eval_M_cl(flow, cand), cand), rhs), flow.ip)
        x = cand
        if residual <= target:
            return x
    raise ConvergenceError(
        f"projected resolvent did not reach tolerance (residual {residual:.3e}, "
        f"target {target:.3e}) within {max_iter} sweeps",
        residual=residual,
        iterations=max_iter,
    )


def step(scheme, flow, x):
    """Advance the flow by one time step of the selected scheme."""
    dt = scheme.dt
    if scheme.kind == "proximal":
        return resolvent_solve(
            flow, dt, x, tol=scheme.tol, max_iter=scheme.max_iter, damping=scheme.damping, x0=x
        )

    base = flow.base
    if scheme.kind == "imex":
        u = flow.feedback_at(x)
        rhs = x if u is None else axpy(dt, base.apply_B(u), x)
        return base.resolvent_M(dt, rhs, tol=scheme.tol, x0=x)

    # crank-nicolson: trapezoid in M, midpoint in the feedback
    z = axpy(-0.5 * dt, base.eval_M(x), x)
    u = flow.feedback_at(x)
    rhs = z if u is None else axpy(dt, base.apply_B(u), z)
    xn = base.resolvent_M(0.5 * dt, rhs, tol=scheme.tol, x0=x)
    if u is not None:
        for _ in range(max(0, scheme.corrections)):
            mid = scale(0.5, axpy(1.0, x, xn))
            u = flow.feedback_at(mid)
            xn = base.resolvent_M(0.5 * dt, axpy(dt, base.apply_B(u), z), tol=scheme.tol, x0=xn)
    return xn


@dataclass
class Trajectory:
    """Sampled closed-loop time series.

    dist_to_eq is ||x(t) - x*|| in the state inner product, output_norm is
    ||y(t) - y*|| in the control inner product, control norms refer to the
    instantaneous feedback u(t) = P_F(u* - (y(t) - y*)), and energy is
    0.5*||x(t)||^2 for wave states (None elsewhere, blank in CSV).
    feasibility_margin must stay >= 0 at every sample.
    """

    times: list = field(default_factory=list)
    dist_to_eq: list = field(default_factory=list)
    output_norm: list = field(default_factory=list)
    control_l2: list = field(default_factory=list)
    control_linf: list = field(default_factory=list)
    feasibility_margin: list = field(default_factory=list)
    energy: list = field(default_factory=list)
    status: str = "ok"
    error: str = ""

    def append(self, t, dist, out_n, u_l2, u_linf, margin, en):
        self.times.append(t)
        self.dist_to_eq.append(dist)
        self.output_norm.append(out_n)
        self.control_l2.append(u_l2)
        self.control_linf.append(u_linf)
        self.feasibility_margin.append(margin)
        self.energy.append(en)

    def to_csv(self, path):
        with open(path, "w", newline="") as fh:
            fh.write("t,dist_to_eq,output_norm,control_l2,control_linf,feasibility_margin,energy\n")
            for k in range(len(self.times)):
                en = self.energy[k]
                en_s = "" if en is None else f"{en:.17g}"
                fh.write(
                    f"{self.times[k]:.17g},{self.dist_to_eq[k]:.17g},"
                    f"{self.output_norm[k]:.17g},{self.control_l2[k]:.17g},"
                    f"{self.control_linf[k]:.17g},{self.feasibility_margin[k]:.17g},{en_s}\n"
                )


def _record(traj, cl, x, t):
    y = cl.base.apply_Bstar(x)
    u = cl.feedback(y)
    dist = norm(subtract(x, cl.eq.x_star), cl.ip)
    out_n = norm(subtract(y, cl.y_star), cl.base.control_ip)
    en = 0.5 * inner(x, x, cl.ip) if isinstance(x, WaveState) else None
    traj.append(
        t,
        dist,
        out_n,
        norm(u, cl.base.control_ip),
        sup_norm(u),
        feasibility_margin(cl.F, u),
        en,
    )


def simulate(scheme, cl, x0, T, sample_every=1, snapshot_times=(), on_snapshot=None):
    """Run the closed loop over [0, T] and sample the trajectory.

    Takes ceil(T/dt) steps, recording at t=0, every `sample_every`-th step
    and the final step. `snapshot_times` are matched to the nearest step
    index; `on_snapshot(t, x)` is invoked there. On an inner-solver
    failure the trajectory is truncated and flagged rather than raised.

    Returns (trajectory, final_state).
    """
    if not T > 0:
        raise UsageError("time horizon must be positive")
    if sample_every < 1:
        raise UsageError("sample_every must be >= 1")
    n_steps = math.ceil(T / scheme.dt - 1e-12)
    snap_steps = {}
    for ts in snapshot_times:
        k = int(round(ts / scheme.dt))
        if 0 <= k <= n_steps:
            snap_steps.setdefault(k, ts)

    traj = Trajectory()
    x = x0
    _record(traj, cl, x, 0.0)
    if 0 in snap_steps and on_snapshot is not None:
        on_snapshot(snap_steps[0], x)
    for k in range(1, n_steps + 1):
        try:
            x = step(scheme, cl, x)
        except ConvergenceError as err:
            traj.status = "truncated"
            traj.error = str(err)
            return traj, x
        t = k * scheme.dt
        if k % sample_every == 0 or k == n_steps:
            _record(traj, cl, x, t)
        if k in snap_steps and on_snapshot is not None:
            on_snapshot(snap_steps[k], x)
    return traj, x


def exponential_formula(flow, t, n, x0, tol=1e-12, max_iter=200):
    """n-fold resolvent power with step t/n approximating the flow at time t.

    The reference oracle for the stepping schemes: as n grows this
    converges to the semigroup value, and successive powers form a Cauchy
    sequence.
    """
    if t < 0:
        raise UsageError("time must be nonnegative")
    if n < 1:
        raise UsageError("n must be at least 1")
    if t == 0:
        return x0
    h = t / n
    x = x0
    for _ in range(n):
        x = resolvent_solve(flow, h, x, tol=tol, max_iter=max_iter, x0=x)
    return x
