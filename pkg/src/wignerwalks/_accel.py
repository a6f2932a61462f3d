"""Optional numba acceleration.

Kernels are written once in the numba-compatible subset of Python and
decorated with :func:`njit`.  Setting ``WIGNERWALKS_NUMBA=0`` in the
environment (before import) leaves them as plain Python/numpy functions,
which is the reference path used by the benchmark and by the fallback
test run.
"""

from __future__ import annotations

import os

_FLAG = os.environ.get("WIGNERWALKS_NUMBA", "1").strip().lower()

try:
    import numba as _numba
except ImportError:  # pragma: no cover - numba is a declared dependency
    _numba = None

JIT_ENABLED = _numba is not None and _FLAG not in {"0", "false", "no", "off"}


def njit(*args, **kwargs):
    """``numba.njit`` when enabled, identity otherwise.

    Usable bare (``@njit``) or with options (``@njit(cache=True)``).
    """
    if args and callable(args[0]) and len(args) == 1 and not kwargs:
        return _wrap(args[0], {})

    def decorator(func):
        return _wrap(func, kwargs)

    return decorator


def _wrap(func, options):
    if not JIT_ENABLED:
        return func
    options = {"cache": True, "nogil": True, **options}
    return _numba.njit(**options)(func)


def python_impl(func):
    """Return the uncompiled Python body of a kernel."""
    return getattr(func, "py_func", func)


def set_threads_from_env() -> None:
    """Honour ``WIGNERWALKS_THREADS`` for numba's thread pool."""
    value = os.environ.get("WIGNERWALKS_THREADS")
    if not value or _numba is None:
        return
    try:
        _numba.set_num_threads(max(1, min(int(value), _numba.config.NUMBA_NUM_THREADS)))
    except ValueError:
        pass
