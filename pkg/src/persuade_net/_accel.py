"""Backend selection for the compiled kernels.

``PERSUADE_NET_BACKEND=numpy`` forces the pure-numpy kernels even when numba
is importable; ``numba`` (the default) uses the compiled loop kernels.
``PERSUADE_NET_THREADS`` caps the numba worker count.
"""
import os

BACKEND_ENV = "PERSUADE_NET_BACKEND"
THREADS_ENV = "PERSUADE_NET_THREADS"

try:
    import numba

    HAVE_NUMBA = True
    if "NUMBA_THREADING_LAYER" not in os.environ:
        # skip the TBB probe; older TBB builds only produce a warning
        numba.config.THREADING_LAYER_PRIORITY = ["omp", "workqueue", "tbb"]
except ImportError:  # pragma: no cover - numba is a declared dependency
    numba = None
    HAVE_NUMBA = False


def _wanted_backend():
    value = os.environ.get(BACKEND_ENV, "numba").strip().lower()
    if value not in ("numba", "numpy"):
        raise ValueError(f"{BACKEND_ENV} must be 'numba' or 'numpy', got {value!r}")
    return value


BACKEND = "numba" if (_wanted_backend() == "numba" and HAVE_NUMBA) else "numpy"
USE_NUMBA = BACKEND == "numba"


def njit(*args, **kwargs):
    """``numba.njit(cache=True)`` when numba is importable, identity otherwise.

    The loop kernels are always compiled when numba exists, so the benchmark can
    time them next to the numpy kernels regardless of the selected backend.
    """
    if not HAVE_NUMBA:
        if args and callable(args[0]):
            return args[0]
        return lambda f: f
    kwargs.setdefault("cache", True)
    return numba.njit(*args, **kwargs)


if HAVE_NUMBA:
    prange = numba.prange
else:  # pragma: no cover
    prange = range


def apply_thread_cap():
    raw = os.environ.get(THREADS_ENV)
    if not raw or not HAVE_NUMBA:
        return
    try:
        requested = int(raw)
    except ValueError:
        return
    if requested >= 1:
        numba.set_num_threads(min(requested, numba.config.NUMBA_NUM_THREADS))


apply_thread_cap()
