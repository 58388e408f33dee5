"""Grid kernels with a compiled core and a numpy fallback.

The compiled extension (`monostab.kernels._core`) is selected at import
when present; set MONOSTAB_PURE_PYTHON=1 to force the numpy backend.
`BACKEND` records which one is active.
"""

import os

from . import _numpy_impl

if os.environ.get("MONOSTAB_PURE_PYTHON", "0") == "1":
    _impl = _numpy_impl
    BACKEND = "numpy"
else:
    try:
        from . import _core as _impl

        BACKEND = "compiled"
    except ImportError:
        _impl = _numpy_impl
        BACKEND = "numpy"

neumann_laplacian = _impl.neumann_laplacian
dirichlet_laplacian = _impl.dirichlet_laplacian
clamp = _impl.clamp
weighted_dot = _impl.weighted_dot
grad_inner = _impl.grad_inner
axpy = _impl.axpy


def available_backends():
    """Importable backends keyed by name, for tests and benchmarks."""
    backends = {"numpy": _numpy_impl}
    try:
        from . import _core

        backends["compiled"] = _core
    except ImportError:
        pass
    return backends
