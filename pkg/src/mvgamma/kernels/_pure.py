"""Pure-Python/numpy kernels for the hot special-function evaluations.

Two entry styles:

* scalar ``nc_cdf`` / ``nc_pdf`` follow the mode-centered summation of the
  Poisson mixture (start near k = floor(y), sweep down then up) — robust for
  any y because the mode weight is computed in log space;
* array ``nc_cdf_array`` / ``nc_pdf_array`` evaluate one x against a whole
  vector of noncentralities, summing upward from k = 0 with the recurrence
  w_{k+1} = w_k * y/(k+1).  That keeps the inner loop to a handful of vector
  FMAs per term.  Elements with y > 600 (where exp(-y) underflows toward the
  denormal range) are routed through the scalar path; they are vanishingly
  rare in the Monte Carlo workloads this backs.

Truncation contract (both styles): the neglected tail is bounded by the
remaining Poisson mass times a bound on the remaining gamma terms —
G_{a+k}(x) is decreasing in k so the current G bounds the cdf tail, and
g_{a+k}(x) is decreasing once a+k exceeds the shape-sup location, bounded by
sup_a g_a(x) before that.  Summation stops once the bound drops under eps,
or raises TruncationError at max_terms.
"""

from __future__ import annotations

import math

import numpy as np

from ..errors import TruncationError

BACKEND = "pure"

_REFRESH = 64  # recompute recurrences from log space every this many terms
_Y_SCALAR_FALLBACK = 600.0
_EPS_REL = 1e-16


_HALF_LOG_TWO_PI = 0.5 * math.log(2.0 * math.pi)


def _log_prefactor(a: float, x: float) -> float:
    """log(x^a e^{-x} / Gamma(a)).

    For large a the naive a*log(x) loses absolute precision exactly in the
    transition zone x ~ a, so there the log is rearranged around log1p((x-a)/a)
    with a Stirling tail for a*log(a) - a - lgamma(a).
    """
    if a < 25.0:
        return a * math.log(x) - x - math.lgamma(a)
    inv_a = 1.0 / a
    stirling_tail = inv_a * (1.0 / 12.0 + inv_a * inv_a * (-1.0 / 360.0 + inv_a * inv_a * (1.0 / 1260.0 - inv_a * inv_a / 1680.0)))
    return a * math.log1p((x - a) / a) + (a - x) + 0.5 * math.log(a) - _HALF_LOG_TWO_PI - stirling_tail


def reg_inc_gamma(a: float, x: float) -> float:
    """Regularized lower incomplete gamma P(a, x).

    Series for x < a+1, Lentz continued fraction otherwise (CEPHES-style);
    absolute error ~1e-15.
    """
    if a <= 0.0:
        raise ValueError(f"shape must be positive, got {a}")
    if x < 0.0:
        raise ValueError(f"x must be nonnegative, got {x}")
    if x == 0.0:
        return 0.0
    ax = _log_prefactor(a, x)
    if ax < -745.0:
        return 1.0 if x > a else 0.0
    if x < a + 1.0:
        # lower series: P = exp(ax)/a * sum_k prod x/(a+1)...(a+k)
        term = 1.0 / a
        total = term
        denom = a
        for _ in range(10000):
            denom += 1.0
            term *= x / denom
            total += term
            if term < total * _EPS_REL:
                return min(total * math.exp(ax), 1.0)
        return min(total * math.exp(ax), 1.0)
    # upper continued fraction (modified Lentz), Q = exp(ax) * h
    tiny = 1e-300
    b = x + 1.0 - a
    c = 1.0 / tiny
    d = 1.0 / b
    h = d
    for i in range(1, 10000):
        an = -i * (i - a)
        b += 2.0
        d = an * d + b
        if abs(d) < tiny:
            d = tiny
        c = b + an / c
        if abs(c) < tiny:
            c = tiny
        d = 1.0 / d
        delta = d * c
        h *= delta
        if abs(delta - 1.0) < _EPS_REL:
            break
    return max(1.0 - math.exp(ax) * h, 0.0)


def _log_gamma_pdf(a: float, x: float) -> float:
    return _log_prefactor(a, x) - math.log(x)


def _gamma_pdf_sup(alpha: float, x: float) -> float:
    """Upper bound for sup over a >= alpha of g_a(x) = x^{a-1} e^{-x}/Gamma(a).

    The sup over all a sits where digamma(a) = log(x), near a = x + 1/2; we
    evaluate g at alpha, x + 0.5 and nearby integers and take the max with a
    10% safety margin.
    """
    cands = [alpha, max(alpha, x + 0.5), max(alpha, x), max(alpha, x + 1.0)]
    best = max(math.exp(_log_gamma_pdf(a, x)) for a in cands)
    return 1.1 * best


# --- scalar mode-centered paths ---------------------------------------------


def nc_cdf(alpha: float, x: float, y: float, eps: float = 1e-12, max_terms: int = 10**6) -> float:
    """Non-central gamma cdf G_alpha(x, y) = e^{-y} sum_k G_{alpha+k}(x) y^k / k!."""
    if x <= 0.0:
        return 0.0
    if y == 0.0:
        return reg_inc_gamma(alpha, x)
    k0 = int(math.floor(y))
    w_mode = math.exp(_log_prefactor(k0 + 1.0, y)) / y
    g_mode = reg_inc_gamma(alpha + k0, x)
    s_mode = math.exp(_log_prefactor(alpha + k0, x)) / (alpha + k0)
    acc = w_mode * g_mode
    mass = w_mode
    terms = 1
    # downward sweep: w_k = w_{k+1}*(k+1)/y, G_{a+k} = G_{a+k+1} + s_k
    w = w_mode
    big_g = g_mode
    s = s_mode
    for k in range(k0 - 1, -1, -1):
        w *= (k + 1) / y
        s *= (alpha + k + 1) / x
        big_g = min(big_g + s, 1.0)
        acc += w * big_g
        mass += w
        terms += 1
        if terms % _REFRESH == 0:
            w = math.exp(_log_prefactor(k + 1.0, y)) / y
            s = math.exp(_log_prefactor(alpha + k, x)) / (alpha + k)
        if w * (k + 1) <= 0.25 * eps:  # remaining lower weights sum below this
            break
        if terms >= max_terms:
            raise TruncationError(
                f"non-central gamma cdf truncated after {terms} terms", bound=w * (k + 1), terms=terms
            )
    # upward sweep: w_{k+1} = w_k*y/(k+1), G_{a+k+1} = G_{a+k} - s_k
    w = w_mode
    big_g = g_mode
    s = s_mode
    k = k0
    while True:
        bound = max(1.0 - mass, 0.0) * big_g
        if bound <= 0.75 * eps or big_g <= 0.0:
            break
        if terms >= max_terms:
            raise TruncationError(f"non-central gamma cdf truncated after {terms} terms", bound=bound, terms=terms)
        k += 1
        w *= y / k
        big_g = max(big_g - s, 0.0)
        s *= x / (alpha + k)
        acc += w * big_g
        mass += w
        terms += 1
        if terms % _REFRESH == 0:
            w = math.exp(_log_prefactor(k + 1.0, y)) / y
            s = math.exp(_log_prefactor(alpha + k, x)) / (alpha + k)
            big_g = min(max(big_g, 0.0), 1.0)
    return min(max(acc, 0.0), 1.0)


def nc_pdf(alpha: float, x: float, y: float, eps: float = 1e-12, max_terms: int = 10**6) -> float:
    """Non-central gamma pdf g_alpha(x, y) = e^{-y} sum_k g_{alpha+k}(x) y^k / k!."""
    if x <= 0.0:
        raise ValueError(f"x must be positive, got {x}")
    if y == 0.0:
        return math.exp(_log_gamma_pdf(alpha, x))
    sup_g = _gamma_pdf_sup(alpha, x)
    k0 = int(math.floor(y))
    w_mode = math.exp(_log_prefactor(k0 + 1.0, y)) / y
    g_mode = math.exp(_log_gamma_pdf(alpha + k0, x))
    acc = w_mode * g_mode
    mass = w_mode
    terms = 1
    # downward: g_{a+k} = g_{a+k+1}*(a+k)/x
    w = w_mode
    g = g_mode
    for k in range(k0 - 1, -1, -1):
        w *= (k + 1) / y
        g *= (alpha + k) / x
        acc += w * g
        mass += w
        terms += 1
        if terms % _REFRESH == 0:
            w = math.exp(_log_prefactor(k + 1.0, y)) / y
            g = math.exp(_log_gamma_pdf(alpha + k, x))
        if w * (k + 1) * sup_g <= 0.25 * eps:
            break
        if terms >= max_terms:
            raise TruncationError(
                f"non-central gamma pdf truncated after {terms} terms",
                bound=w * (k + 1) * sup_g,
                terms=terms,
            )
    # upward: g_{a+k+1} = g_{a+k}*x/(a+k)
    w = w_mode
    g = g_mode
    k = k0
    while True:
        future_sup = g if (alpha + k) >= x + 0.5 else sup_g
        bound = max(1.0 - mass, 0.0) * future_sup
        if bound <= 0.75 * eps:
            break
        if terms >= max_terms:
            raise TruncationError(f"non-central gamma pdf truncated after {terms} terms", bound=bound, terms=terms)
        g *= x / (alpha + k)
        k += 1
        w *= y / k
        acc += w * g
        mass += w
        terms += 1
        if terms % _REFRESH == 0:
            w = math.exp(_log_prefactor(k + 1.0, y)) / y
            g = math.exp(_log_gamma_pdf(alpha + k, x))
    return max(acc, 0.0)


# --- vectorized paths (one x, many y) ---------------------------------------


def _split_big(y: np.ndarray):
    big = y > _Y_SCALAR_FALLBACK
    return (big, bool(np.any(big)))


def nc_cdf_array(alpha: float, x: float, y: np.ndarray, eps: float = 1e-12, max_terms: int = 10**6) -> np.ndarray:
    """Vector of G_alpha(x, y_i) with absolute truncation error <= eps each."""
    y = np.asarray(y, dtype=float)
    out = np.empty_like(y)
    if x <= 0.0:
        out.fill(0.0)
        return out
    big, any_big = _split_big(y)
    if any_big:
        out[big] = [nc_cdf(alpha, x, float(v), eps, max_terms) for v in y[big]]
        y = y[~big]
    w = np.exp(-y)
    mass_gap = 1.0 - w  # per-element 1 - accumulated Poisson mass
    big_g = reg_inc_gamma(alpha, x)
    s = math.exp(_log_prefactor(alpha, x)) / alpha
    acc = w * big_g
    k = 0
    while y.size:
        if big_g * float(mass_gap.max()) <= eps or big_g <= 0.0:
            break
        if k >= max_terms:
            raise TruncationError(
                f"non-central gamma cdf truncated after {k} terms",
                bound=big_g * float(mass_gap.max()),
                terms=k,
            )
        k += 1
        w *= y
        w /= k
        mass_gap -= w
        big_g = max(big_g - s, 0.0)
        s *= x / (alpha + k)
        acc += w * big_g
        if k % _REFRESH == 0:
            big_g = reg_inc_gamma(alpha + k, x)
            s = math.exp(_log_prefactor(alpha + k, x)) / (alpha + k)
            np.maximum(mass_gap, 0.0, out=mass_gap)
    if any_big:
        out[~big] = np.clip(acc, 0.0, 1.0)
    else:
        out[:] = np.clip(acc, 0.0, 1.0)
    return out


def nc_pdf_array(alpha: float, x: float, y: np.ndarray, eps: float = 1e-12, max_terms: int = 10**6) -> np.ndarray:
    """Vector of g_alpha(x, y_i) with absolute truncation error <= eps each."""
    y = np.asarray(y, dtype=float)
    if x <= 0.0:
        raise ValueError(f"x must be positive, got {x}")
    out = np.empty_like(y)
    big, any_big = _split_big(y)
    if any_big:
        out[big] = [nc_pdf(alpha, x, float(v), eps, max_terms) for v in y[big]]
        y = y[~big]
    sup_g = _gamma_pdf_sup(alpha, x)
    w = np.exp(-y)
    mass_gap = 1.0 - w
    g = math.exp(_log_gamma_pdf(alpha, x))
    acc = w * g
    k = 0
    while y.size:
        future_sup = g if (alpha + k) >= x + 0.5 else sup_g
        if future_sup * float(mass_gap.max()) <= eps:
            break
        if k >= max_terms:
            raise TruncationError(
                f"non-central gamma pdf truncated after {k} terms",
                bound=future_sup * float(mass_gap.max()),
                terms=k,
            )
        g *= x / (alpha + k)
        k += 1
        w *= y
        w /= k
        mass_gap -= w
        acc += w * g
        if k % _REFRESH == 0:
            g = math.exp(_log_gamma_pdf(alpha + k, x))
            np.maximum(mass_gap, 0.0, out=mass_gap)
    if any_big:
        out[~big] = np.maximum(acc, 0.0)
    else:
        out[:] = np.maximum(acc, 0.0)
    return out
