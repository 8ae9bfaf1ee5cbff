"""Numba switch.

Set ``MU_METRICS_NO_JIT=1`` to run every kernel through its pure-numpy path.
``MU_METRICS_THREADS`` caps the numba thread pool used by parallel sweeps.
"""
import os
import warnings

_FALSY = {"", "0", "false", "no", "off"}

NO_JIT = os.environ.get("MU_METRICS_NO_JIT", "").strip().lower() not in _FALSY

# the TBB layer in this environment is too old; workqueue is always present
os.environ.setdefault("NUMBA_THREADING_LAYER", "workqueue")

try:
    if NO_JIT:
        raise ImportError("disabled by MU_METRICS_NO_JIT")
    import numba
    from numba import njit, prange

    HAVE_NUMBA = True
except ImportError as exc:
    if not NO_JIT:
        warnings.warn(f"numba unavailable ({exc}); using numpy kernels")
    HAVE_NUMBA = False
    prange = range

    def njit(*args, **kwargs):
        if len(args) == 1 and callable(args[0]) and not kwargs:
            return args[0]

        def decorator(func):
            return func

        return decorator


def thread_cap():
    raw = os.environ.get("MU_METRICS_THREADS", "").strip()
    if not raw:
        return None
    try:
        n = int(raw)
    except ValueError:
        raise ValueError(f"MU_METRICS_THREADS must be a positive integer, got {raw!r}")
    if n < 1:
        raise ValueError(f"MU_METRICS_THREADS must be a positive integer, got {raw!r}")
    return n


def apply_thread_cap():
    n = thread_cap()
    if n is not None and HAVE_NUMBA:
        numba.set_num_threads(min(n, numba.config.NUMBA_NUM_THREADS))
    return n
