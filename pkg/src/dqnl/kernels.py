"""Backend selection for the hot trajectory kernel.

The compiled extension is used when it was built; otherwise the numpy
implementation is selected at import time.  Either can be requested
explicitly through :func:`get_kernel`.
"""
from . import _leapfrog_py

BACKEND = "python"
leapfrog_double_well = _leapfrog_py.leapfrog_double_well

try:
    from ._leapfrog import leapfrog_double_well  # noqa: F811
except ImportError:
    pass
else:
    BACKEND = "cython"


def available_backends() -> tuple:
    return ("python", "cython") if BACKEND == "cython" else ("python",)


def get_kernel(backend: str | None = None):
    """Return the leapfrog kernel for ``backend`` ("cython", "python" or None = default)."""
    if backend is None:
        return leapfrog_double_well
    if backend == "python":
        return _leapfrog_py.leapfrog_double_well
    if backend == "cython":
        if BACKEND != "cython":
            raise ImportError("the compiled leapfrog extension is not built")
        return leapfrog_double_well
    raise ValueError(f"unknown backend {backend!r}")
