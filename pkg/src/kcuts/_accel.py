"""Numba switch.

Set ``KCUTS_DISABLE_NUMBA=1`` to force the pure-numpy kernels.  When numba is
not importable the numpy path is used automatically.
"""

import os

_DISABLED = os.environ.get("KCUTS_DISABLE_NUMBA", "").strip().lower() in {"1", "true", "yes", "on"}

try:
    import numba as _numba
except ImportError:  # pragma: no cover - numba is a hard dependency in CI
    _numba = None

HAVE_NUMBA = _numba is not None
USE_NUMBA = HAVE_NUMBA and not _DISABLED


def njit(*args, **kwargs):
    """``numba.njit`` when numba is installed, otherwise an identity decorator.

    The compiled kernels are always defined (so benchmarks can reach them) but
    only dispatched to when :data:`USE_NUMBA` is true.
    """
    if HAVE_NUMBA:
        return _numba.njit(*args, **kwargs)
    if len(args) == 1 and callable(args[0]) and not kwargs:
        return args[0]
    return lambda f: f


def thread_cap():
    """Worker count from ``KCUTS_THREADS`` (default: all cores)."""
    raw = os.environ.get("KCUTS_THREADS", "").strip()
    if raw:
        try:
            value = int(raw)
        except ValueError:
            raise ValueError(f"KCUTS_THREADS must be a positive integer, got {raw!r}") from None
        if value < 1:
            raise ValueError(f"KCUTS_THREADS must be a positive integer, got {raw!r}")
        return value
    return os.cpu_count() or 1
