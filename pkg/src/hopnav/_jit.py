"""Conditional numba compilation.

Kernels in this package are written in the numba-compatible subset of Python
and decorated with :func:`njit`. Set ``HOPNAV_DISABLE_NUMBA=1`` to run them as
plain Python over numpy arrays (useful for debugging and for the benchmark).
"""
import os

_flag = os.environ.get("HOPNAV_DISABLE_NUMBA", "").strip().lower()
DISABLED = _flag not in ("", "0", "false", "no")

try:
    import numba
    HAVE_NUMBA = True
except ImportError:  # pragma: no cover
    numba = None
    HAVE_NUMBA = False

USE_NUMBA = HAVE_NUMBA and not DISABLED


def njit(func=None, **kwargs):
    """``numba.njit(cache=True)`` when enabled, identity otherwise."""
    def wrap(f):
        if USE_NUMBA:
            opts = {"cache": True}
            opts.update(kwargs)
            return numba.njit(**opts)(f)
        return f

    if func is None:
        return wrap
    return wrap(func)


def py_func(kernel):
    """Return the uncompiled Python function behind a kernel."""
    return getattr(kernel, "py_func", kernel)
