"""JIT toggle for the hot kernels.

Kernels are compiled with numba when it is importable.  Setting the
environment variable ``DKDV_NO_JIT`` to anything other than ``""``/``"0"``
routes every dispatcher to the pure-numpy implementation instead.
``DKDV_THREADS`` caps the thread count used by numba and by the estimate
harness.
"""
import os

try:
    import numba

    HAVE_NUMBA = True
except ImportError:  # pragma: no cover - numba is installed in CI
    numba = None
    HAVE_NUMBA = False


def jit_disabled():
    return os.environ.get("DKDV_NO_JIT", "") not in ("", "0")


def use_jit():
    return HAVE_NUMBA and not jit_disabled()


def njit(*args, **kwargs):
    """``numba.njit`` when available, otherwise the identity decorator."""
    if HAVE_NUMBA:
        return numba.njit(*args, **kwargs)
    if len(args) == 1 and callable(args[0]) and not kwargs:
        return args[0]
    return lambda fn: fn


def thread_count():
    try:
        n = int(os.environ.get("DKDV_THREADS", "1"))
    except ValueError:
        return 1
    return max(1, n)


if HAVE_NUMBA and os.environ.get("DKDV_THREADS"):
    numba.set_num_threads(min(thread_count(), numba.config.NUMBA_NUM_THREADS))
