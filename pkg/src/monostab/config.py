"""Flat `key = value` experiment configuration.

Lines are `key = value` with optional `#` comments; section membership is
expressed with dotted prefixes (`heat.t_max = 7.0`). Unknown keys are
rejected. Defaults per experiment reproduce the reference parameter
choices, so a two-line file selecting the experiment and an output
directory is a complete configuration.
"""

from dataclasses import dataclass, replace

from .errors import ConfigError
from .geometry import DogboneGeometry
from .models import (
    FD2_BASELINE_HORIZON,
    WAVE_BASELINE_HORIZON,
    Fd2Params,
    HeatParams,
)

EXPERIMENTS = ("fd2", "heat", "wave")
SCHEMES = ("proximal", "imex", "crank-nicolson")


@dataclass(frozen=True)
class ExperimentConfig:
    """One experiment run: discretization, solver settings and overrides.

    The seed feeds a single counter-based generator that determines every
    sampled quantity, so a fixed (config, seed, single thread) triple is
    bit-reproducible.
    """

    experiment: str
    scheme: str
    dt: float
    horizon: float
    sample_every: int
    n: int
    seed: int
    out_dir: str
    snapshot_times: tuple
    solver_tol: float = 1e-12
    solver_max_iter: int = 200
    solver_damping: float = None
    solver_corrections: int = 1
    fd2: Fd2Params = Fd2Params()
    heat: HeatParams = HeatParams()
    wave_geometry: DogboneGeometry = DogboneGeometry()
    heat_x0_amplitude: float = 8.0
    wave_init_amplitude: float = 2.0
    wave_init_sigma: float = 0.5

    def __post_init__(self):
        if self.experiment not in EXPERIMENTS:
            raise ConfigError(f"unknown experiment {self.experiment!r}")
        if self.scheme not in SCHEMES:
            raise ConfigError(f"unknown scheme {self.scheme!r}")
        if not self.dt > 0:
            raise ConfigError("dt must be positive")
        if not self.horizon > 0:
            raise ConfigError("T must be positive")
        if self.sample_every < 1:
            raise ConfigError("sample_every must be >= 1")
        if self.seed < 0:
            raise ConfigError("seed must be nonnegative")


_DEFAULTS = {
    "fd2": dict(
        scheme="proximal", dt=1e-2, horizon=FD2_BASELINE_HORIZON, sample_every=10, n=0,
        snapshot_times=(),
    ),
    "heat": dict(
        scheme="proximal", dt=1e-3, horizon=5.0, sample_every=10, n=65,
        snapshot_times=(5.0,),
    ),
    "wave": dict(
        scheme="crank-nicolson", dt=1e-3, horizon=WAVE_BASELINE_HORIZON, sample_every=10, n=20,
        snapshot_times=(5.0,),
    ),
}


def _floats(text, count=None):
    parts = [p.strip() for p in text.split(",") if p.strip()]
    vals = tuple(float(p) for p in parts)
    if count is not None and len(vals) != count:
        raise ConfigError(f"expected {count} comma-separated values, got {len(vals)}")
    return vals


def parse_pairs(text):
    """Raw key/value pairs of a flat config, comments stripped."""
    pairs = {}
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise ConfigError(f"line {lineno}: expected `key = value`, got {raw!r}")
        key, value = (part.strip() for part in line.split("=", 1))
        if not key or not value:
            raise ConfigError(f"line {lineno}: empty key or value")
        if key in pairs:
            raise ConfigError(f"line {lineno}: duplicate key {key!r}")
        pairs[key] = value
    return pairs


def _build(pairs):
    if "experiment" not in pairs:
        raise ConfigError("missing required key `experiment`")
    experiment = pairs.pop("experiment")
    if experiment not in _DEFAULTS:
        raise ConfigError(f"unknown experiment {experiment!r}")
    top = dict(_DEFAULTS[experiment])
    top.update(experiment=experiment, seed=0, out_dir="out")

    fd2_kw, heat_kw, wave_kw = {}, {}, {}
    extras = {}

    simple = {
        "scheme": ("scheme", str),
        "dt": ("dt", float),
        "T": ("horizon", float),
        "sample_every": ("sample_every", int),
        "n": ("n", int),
        "seed": ("seed", int),
        "out_dir": ("out_dir", str),
        "solver.tol": ("solver_tol", float),
        "solver.max_iter": ("solver_max_iter", int),
        "solver.corrections": ("solver_corrections", int),
    }
    for key, value in pairs.items():
        try:
            if key in simple:
                field_name, cast = simple[key]
                top[field_name] = cast(value)
            elif key == "snapshot_times":
                top["snapshot_times"] = _floats(value)
            elif key == "solver.damping":
                extras["solver_damping"] = None if value == "auto" else float(value)
            elif key == "fd2.x_star":
                fd2_kw["x_star"] = _floats(value, 2)
            elif key == "fd2.x0":
                fd2_kw["x0"] = _floats(value, 2)
            elif key in ("fd2.epsilon", "fd2.a", "fd2.b"):
                fd2_kw[key.split(".", 1)[1]] = float(value)
            elif key == "heat.omega_c":
                heat_kw["omega_c"] = _floats(value, 4)
            elif key in ("heat.t_min", "heat.t_max", "heat.amplitude"):
                heat_kw[key.split(".", 1)[1]] = float(value)
            elif key == "heat.x0_amplitude":
                extras["heat_x0_amplitude"] = float(value)
            elif key in (
                "wave.lobe_radius",
                "wave.neck_half_width",
                "wave.lobe_offset",
                "wave.collar_thickness",
                "wave.gap_deg",
            ):
                wave_kw[key.split(".", 1)[1]] = float(value)
            elif key == "wave.init_amplitude":
                extras["wave_init_amplitude"] = float(value)
            elif key == "wave.init_sigma":
                extras["wave_init_sigma"] = float(value)
            else:
                raise ConfigError(f"unknown key {key!r}")
        except ValueError as err:
            raise ConfigError(f"bad value for {key!r}: {err}") from err

    if experiment == "heat":
        heat_kw["n"] = top["n"]
    return ExperimentConfig(
        fd2=Fd2Params(**fd2_kw),
        heat=HeatParams(**heat_kw),
        wave_geometry=DogboneGeometry(**wave_kw),
        **top,
        **extras,
    )


def load_config(path):
    """Parse a config file into an ExperimentConfig (ConfigError on any issue)."""
    with open(path) as fh:
        return _build(parse_pairs(fh.read()))


def load_geometry_config(path=None):
    """Geometry-only config for mask export: wave.* keys plus `n`."""
    if path is None:
        return DogboneGeometry(), 20
    with open(path) as fh:
        pairs = parse_pairs(fh.read())
    n = 20
    wave_kw = {}
    for key, value in pairs.items():
        try:
            if key == "n":
                n = int(value)
            elif key in (
                "wave.lobe_radius",
                "wave.neck_half_width",
                "wave.lobe_offset",
                "wave.collar_thickness",
                "wave.gap_deg",
            ):
                wave_kw[key.split(".", 1)[1]] = float(value)
            else:
                raise ConfigError(f"unknown key {key!r}")
        except ValueError as err:
            raise ConfigError(f"bad value for {key!r}: {err}") from err
    return DogboneGeometry(**wave_kw), n
