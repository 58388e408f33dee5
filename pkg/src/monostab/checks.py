"""Seeded property suites aggregated by the command line harness.

Each suite returns rows (check, system, statistic, value, passed); a suite
passes when every row does. Suites run the PDE systems at reduced
resolutions (heat 33x33, wave 10 cells per unit) so the whole battery
stays interactive; the acceptance tests exercise the full-size defaults.
"""

from dataclasses import dataclass

import numpy as np

from .geometry import DogboneGeometry, control_region_mask, dogbone_grid, mask_csv_text
from .models import (
    Fd2Params,
    HeatParams,
    build_fd2,
    build_heat,
    build_wave,
    coercivity_estimate,
    heat_operator_bundle,
)
from .projection import check_firm_nonexpansive, check_lipschitz
from .spaces import inner, norm, subtract
from .stepping import resolvent_solve
from .system import ClosedLoopOperator, check_monotone, eval_M_cl, pairing_scale
from .solvers import smallest_eigenvalue

SUITE_NAMES = ("projection", "monotone", "resolvent", "lyapunov", "geometry", "coercivity")

SUITE_HEAT_N = 33
SUITE_WAVE_N = 10

FIRM_TOL = 1e-12
LIPSCHITZ_TOL = 1e-12
MONOTONE_TOL = 1e-10
RESOLVENT_TOL = 1e-10
FIXED_POINT_TOL = 1e-8
LYAPUNOV_TOL = 1e-12


@dataclass(frozen=True)
class CheckRow:
    check: str
    system: str
    statistic: str
    value: float
    passed: bool


def _suite_rng(seed, suite):
    children = np.random.SeedSequence(seed).spawn(len(SUITE_NAMES))
    return np.random.Generator(np.random.Philox(children[SUITE_NAMES.index(suite)]))


def _suite_systems():
    triples = [build_fd2(Fd2Params()), build_heat(HeatParams(n=SUITE_HEAT_N))]
    triples.append(build_wave(DogboneGeometry(), n=SUITE_WAVE_N))
    return [(sys.name, sys, eq, F) for sys, eq, F in triples]


def projection_suite(seed, pairs=10_000):
    rng = _suite_rng(seed, "projection")
    rows = []
    for name, sys, eq, F in _suite_systems():
        sampled = [(sys.sample_control(rng), sys.sample_control(rng)) for _ in range(pairs)]
        firm = check_firm_nonexpansive(F, sampled, sys.control_ip)
        lip = check_lipschitz(F, sampled, sys.control_ip)
        rows.append(CheckRow("projection", name, "firm_min_slack", firm.min_slack, firm.passed))
        rows.append(
            CheckRow("projection", name, "firm_violations", float(firm.violations), firm.passed)
        )
        rows.append(
            CheckRow(
                "projection",
                name,
                "lipschitz_max_ratio",
                lip.max_ratio,
                lip.max_ratio <= 1.0 + LIPSCHITZ_TOL,
            )
        )
    return rows


def monotone_suite(seed, pairs=10_000):
    rng = _suite_rng(seed, "monotone")
    rows = []
    for name, sys, eq, F in _suite_systems():
        cl = ClosedLoopOperator(sys, F, eq)
        rep = check_monotone(sys.eval_M, sys.ip, sys.sample_state, pairs, rng, tol=MONOTONE_TOL)
        rows.append(CheckRow("monotone", name, "M_min_scaled_pairing", rep.min_scaled, rep.passed))
        rep_cl = check_monotone(
            lambda x: eval_M_cl(cl, x), sys.ip, sys.sample_state, pairs, rng, tol=MONOTONE_TOL
        )
        rows.append(
            CheckRow("monotone", name, "Mcl_min_scaled_pairing", rep_cl.min_scaled, rep_cl.passed)
        )
    return rows


def resolvent_suite(seed, pairs=1000, h_values=(1e-3, 1e-2, 1e-1)):
    rng = _suite_rng(seed, "resolvent")
    rows = []
    for name, sys, eq, F in _suite_systems():
        cl = ClosedLoopOperator(sys, F, eq)
        for h in h_values:
            worst = -np.inf
            for _ in range(pairs):
                a = sys.sample_state(rng)
                b = sys.sample_state(rng)
                ra = resolvent_solve(cl, h, a, tol=1e-12)
                rb = resolvent_solve(cl, h, b, tol=1e-12)
                gap = norm(subtract(ra, rb), sys.ip) - norm(subtract(a, b), sys.ip)
                worst = max(worst, gap / pairing_scale(a, b, sys.ip))
            rows.append(
                CheckRow(
                    "resolvent",
                    name,
                    f"nonexpansive_excess_h{h:g}",
                    worst,
                    worst <= RESOLVENT_TOL,
                )
            )
            fp = norm(subtract(resolvent_solve(cl, h, eq.x_star, tol=1e-12), eq.x_star), sys.ip)
            rows.append(
                CheckRow(
                    "resolvent", name, f"fixed_point_residual_h{h:g}", fp, fp <= FIXED_POINT_TOL
                )
            )
    return rows


def lyapunov_suite(seed, fd2_samples=10_000, pde_samples=2000):
    rng = _suite_rng(seed, "lyapunov")
    rows = []
    for name, sys, eq, F in _suite_systems():
        cl = ClosedLoopOperator(sys, F, eq)
        count = fd2_samples if name == "fd2" else pde_samples
        worst = -np.inf
        strict_failures = 0
        for _ in range(count):
            x = sys.sample_state(rng)
            shift = subtract(x, eq.x_star)
            mcl = eval_M_cl(cl, x)
            pairing = -inner(mcl, shift, sys.ip)
            scale = pairing_scale(shift, mcl, sys.ip)
            worst = max(worst, pairing / scale)
            if name == "fd2" and norm(shift, sys.ip) > 1e-6 and pairing >= -LYAPUNOV_TOL:
                strict_failures += 1
        rows.append(
            CheckRow("lyapunov", name, "max_scaled_derivative", worst, worst <= LYAPUNOV_TOL)
        )
        if name == "fd2":
            rows.append(
                CheckRow(
                    "lyapunov",
                    name,
                    "strictness_failures",
                    float(strict_failures),
                    strict_failures == 0,
                )
            )
    return rows


def geometry_suite(seed=0, n=20):
    from importlib import resources

    geom = DogboneGeometry()
    grid = dogbone_grid(geom, n)
    control = control_region_mask(geom, grid)
    rows = []
    rows.append(CheckRow("geometry", "wave", "interior_nodes", float(grid.interior.sum()), True))
    measure = float((grid.weights * control).sum())
    rows.append(CheckRow("geometry", "wave", "control_measure", measure, measure > 0.0))
    text = mask_csv_text(grid, control)
    golden = (
        resources.files("monostab.data") / "golden" / f"dogbone_mask_n{n}.csv"
    ).read_text()
    rows.append(
        CheckRow("geometry", "wave", "golden_mask_match", float(text == golden), text == golden)
    )
    return rows


def coercivity_suite(seed=0, oracle_n=SUITE_HEAT_N, full_n=65):
    rows = []
    boxes = ((0.35, 0.65, 0.35, 0.65), (0.2, 0.8, 0.2, 0.8), (0.0, 1.0, 0.0, 1.0))
    estimates = []
    for box in boxes:
        bundle = heat_operator_bundle(oracle_n, box)

        def apply_L(a, bundle=bundle):
            return bundle.apply_A(a) + bundle.indicator * a

        lam, _ = smallest_eigenvalue(
            apply_L, bundle.dot, np.ones((oracle_n, oracle_n)), tol=1e-8, cg_tol=1e-10
        )
        estimates.append(lam)
        side = box[1] - box[0]
        rows.append(
            CheckRow("coercivity", "heat", f"alpha_n{oracle_n}_box{side:g}", lam, lam > 0.0)
        )
    increasing = estimates[0] < estimates[1] < estimates[2]
    rows.append(
        CheckRow(
            "coercivity",
            "heat",
            "alpha_monotone_in_region",
            float(increasing),
            increasing,
        )
    )
    sys, eq, F = build_heat(HeatParams(n=full_n))
    alpha = coercivity_estimate(sys)
    rows.append(CheckRow("coercivity", "heat", f"alpha_n{full_n}", alpha, alpha > 0.0))
    return rows


def run_suite(name, seed):
    """Dispatch one named suite (or every suite for name='all')."""
    suites = {
        "projection": projection_suite,
        "monotone": monotone_suite,
        "resolvent": resolvent_suite,
        "lyapunov": lyapunov_suite,
        "geometry": geometry_suite,
        "coercivity": coercivity_suite,
    }
    if name == "all":
        rows = []
        for sub in SUITE_NAMES:
            rows.extend(suites[sub](seed))
        return rows
    if name not in suites:
        raise ValueError(f"unknown suite {name!r}")
    return suites[name](seed)


def write_report(rows, path):
    with open(path, "w", newline="") as fh:
        fh.write("check,system,statistic,value,pass\n")
        for r in rows:
            fh.write(f"{r.check},{r.system},{r.statistic},{r.value:.17g},{int(r.passed)}\n")
