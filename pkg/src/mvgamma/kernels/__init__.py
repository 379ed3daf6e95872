"""Kernel backend selection: compiled Cython core when available, numpy
fallback otherwise.

The environment variable MVGAMMA_BACKEND ("compiled" or "pure") pins the
initial choice; tests and benchmarks switch explicitly via use_backend().
"""

from __future__ import annotations

import os

from . import _pure

try:
    from . import _core as _compiled
except ImportError:  # extension not built; pure lane only
    _compiled = None


def available_backends() -> tuple[str, ...]:
    return ("compiled", "pure") if _compiled is not None else ("pure",)


def _resolve(name: str):
    if name == "pure":
        return _pure
    if name == "compiled":
        if _compiled is None:
            raise RuntimeError("compiled kernel backend is not available (extension not built)")
        return _compiled
    raise ValueError(f"unknown kernel backend {name!r} (expected 'compiled' or 'pure')")


_env = os.environ.get("MVGAMMA_BACKEND", "").strip().lower()
if _env:
    _active = _resolve(_env)
else:
    _active = _compiled if _compiled is not None else _pure


def use_backend(name: str) -> str:
    """Switch the active backend; returns the previous backend's name."""
    global _active
    previous = _active.BACKEND
    _active = _resolve(name)
    return previous


def backend_name() -> str:
    return _active.BACKEND


def reg_inc_gamma(a, x):
    return _active.reg_inc_gamma(a, x)


def nc_cdf(alpha, x, y, eps=1e-12, max_terms=10**6):
    return _active.nc_cdf(alpha, x, y, eps, max_terms)


def nc_pdf(alpha, x, y, eps=1e-12, max_terms=10**6):
    return _active.nc_pdf(alpha, x, y, eps, max_terms)


def nc_cdf_array(alpha, x, y, eps=1e-12, max_terms=10**6):
    return _active.nc_cdf_array(alpha, x, y, eps, max_terms)


def nc_pdf_array(alpha, x, y, eps=1e-12, max_terms=10**6):
    return _active.nc_pdf_array(alpha, x, y, eps, max_terms)
