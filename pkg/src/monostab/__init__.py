"""Constraint-respecting output feedback stabilization for monotone systems.

Core pieces: Hilbert-space state containers on masked uniform grids
(`monostab.spaces`), box constraint sets with exact projection
(`monostab.projection`), the control-system/closed-loop operator bundle
(`monostab.system`), resolvent-based time stepping (`monostab.stepping`),
the three reference systems (`monostab.models`, `monostab.geometry`), and
the `monostab` command line harness (`monostab.cli`).

Submodules are imported lazily on demand; `import monostab` alone stays
cheap so the CLI can cap numeric thread pools before numpy loads.
"""

__version__ = "0.1.0"

__all__ = [
    "spaces",
    "projection",
    "system",
    "solvers",
    "stepping",
    "geometry",
    "models",
    "checks",
    "config",
    "cli",
    "errors",
    "kernels",
]
