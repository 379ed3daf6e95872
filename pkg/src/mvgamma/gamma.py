"""Central and non-central gamma densities, distribution functions and
Laplace transforms.

The non-central functions are Poisson mixtures of central gamma laws,

    g_a(x, y) = e^{-y} sum_k g_{a+k}(x) y^k / k!
    G_a(x, y) = e^{-y} sum_k G_{a+k}(x) y^k / k!

summed outward from the Poisson mode with truncation controlled by
SeriesControl: stop once the neglected Poisson mass (times the running bound
on the gamma terms) is below epsilon.  All values route through the active
kernel backend (compiled or pure)."""

from __future__ import annotations

import math
from dataclasses import dataclass, field

from . import kernels

TWO_ALPHA_INT_TOL = 1e-12


@dataclass(frozen=True)
class ShapeParameter:
    """Gamma shape alpha > 0 with a cached flag for 2*alpha being an integer."""

    alpha: float
    two_alpha_integer: bool = field(init=False)

    def __post_init__(self):
        if not (isinstance(self.alpha, (int, float)) and math.isfinite(self.alpha) and self.alpha > 0):
            raise ValueError(f"shape parameter must be a positive finite number, got {self.alpha!r}")
        object.__setattr__(self, "alpha", float(self.alpha))
        flag = abs(2.0 * self.alpha - round(2.0 * self.alpha)) <= TWO_ALPHA_INT_TOL
        object.__setattr__(self, "two_alpha_integer", bool(flag))

    @property
    def nu(self) -> float:
        """Degrees of freedom 2*alpha (exact integer when the flag is set)."""
        return float(round(2.0 * self.alpha)) if self.two_alpha_integer else 2.0 * self.alpha


@dataclass(frozen=True)
class SeriesControl:
    """Truncation policy for the non-central series."""

    epsilon: float = 1e-12
    max_terms: int = 10**6

    def __post_init__(self):
        if not (self.epsilon > 0):
            raise ValueError(f"epsilon must be positive, got {self.epsilon}")
        if self.max_terms < 1:
            raise ValueError(f"max_terms must be >= 1, got {self.max_terms}")


DEFAULT_SERIES = SeriesControl()


def _alpha_of(alpha) -> float:
    return alpha.alpha if isinstance(alpha, ShapeParameter) else ShapeParameter(alpha).alpha


def gamma_pdf(alpha, x: float) -> float:
    """Central gamma density g_a(x) = x^{a-1} e^{-x} / Gamma(a), in log space."""
    a = _alpha_of(alpha)
    if not (x > 0):
        raise ValueError(f"x must be positive, got {x}")
    return math.exp((a - 1.0) * math.log(x) - x - math.lgamma(a))


def gamma_cdf(alpha, x: float) -> float:
    """Central gamma cdf: the regularized lower incomplete gamma P(a, x)."""
    a = _alpha_of(alpha)
    if x < 0:
        raise ValueError(f"x must be nonnegative, got {x}")
    return kernels.reg_inc_gamma(a, x)


def noncentral_gamma_pdf(alpha, x: float, y: float, ctl: SeriesControl = DEFAULT_SERIES) -> float:
    """Non-central gamma density g_a(x, y); y = 0 collapses to gamma_pdf."""
    a = _alpha_of(alpha)
    if not (x > 0):
        raise ValueError(f"x must be positive, got {x}")
    if y < 0:
        raise ValueError(f"noncentrality must be nonnegative, got {y}")
    return kernels.nc_pdf(a, x, y, ctl.epsilon, ctl.max_terms)


def noncentral_gamma_cdf(alpha, x: float, y: float, ctl: SeriesControl = DEFAULT_SERIES) -> float:
    """Non-central gamma cdf G_a(x, y); y = 0 collapses to gamma_cdf."""
    a = _alpha_of(alpha)
    if x < 0:
        raise ValueError(f"x must be nonnegative, got {x}")
    if y < 0:
        raise ValueError(f"noncentrality must be nonnegative, got {y}")
    if x == 0.0:
        return 0.0
    return kernels.nc_cdf(a, x, y, ctl.epsilon, ctl.max_terms)


def noncentral_gamma_lt(alpha, t: float, y: float) -> float:
    """Laplace transform of the non-central gamma law:
    (1+t)^{-a} * exp(-y*t/(1+t))."""
    a = _alpha_of(alpha)
    if t < 0:
        raise ValueError(f"t must be nonnegative, got {t}")
    if y < 0:
        raise ValueError(f"noncentrality must be nonnegative, got {y}")
    return (1.0 + t) ** (-a) * math.exp(-y * t / (1.0 + t))
