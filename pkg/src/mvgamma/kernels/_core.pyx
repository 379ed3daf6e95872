# cython: boundscheck=False, wraparound=False, cdivision=True, language_level=3
"""Compiled kernels: regularized incomplete gamma and the non-central gamma
series, evaluated per element with mode-centered summation and early exit.

Mirrors kernels._pure (same truncation contract, absolute error <= eps); the
array entry points release the GIL so estimator chunks can run on threads.
"""

import numpy as np

cimport numpy as cnp
from libc.math cimport exp, floor, lgamma, log, log1p

cnp.import_array()

from ..errors import TruncationError

BACKEND = "compiled"

cdef int _REFRESH = 64
cdef double _EPS_REL = 1e-16
cdef double _TINY = 1e-300

cdef int _ERR_NONE = 0
cdef int _ERR_TRUNC = 1


cdef double _HALF_LOG_TWO_PI = 0.9189385332046727417803297364056176398

cdef double _log_prefactor(double a, double x) nogil:
    # log(x^a e^{-x} / Gamma(a)); Stirling rearrangement keeps absolute
    # precision through the transition zone x ~ a for large shapes
    cdef double inv_a, tail
    if a < 25.0:
        return a * log(x) - x - lgamma(a)
    inv_a = 1.0 / a
    tail = inv_a * (1.0 / 12.0 + inv_a * inv_a * (-1.0 / 360.0 + inv_a * inv_a * (1.0 / 1260.0 - inv_a * inv_a / 1680.0)))
    return a * log1p((x - a) / a) + (a - x) + 0.5 * log(a) - _HALF_LOG_TWO_PI - tail


cdef double _reg_inc_gamma(double a, double x) nogil:
    """P(a, x): series for x < a+1, Lentz continued fraction otherwise."""
    cdef double ax, term, total, denom
    cdef double b, c, d, h, an, delta
    cdef int i
    if x <= 0.0:
        return 0.0
    ax = _log_prefactor(a, x)
    if ax < -745.0:
        return 1.0 if x > a else 0.0
    if x < a + 1.0:
        term = 1.0 / a
        total = term
        denom = a
        for i in range(10000):
            denom += 1.0
            term *= x / denom
            total += term
            if term < total * _EPS_REL:
                break
        total *= exp(ax)
        return total if total < 1.0 else 1.0
    b = x + 1.0 - a
    c = 1.0 / _TINY
    d = 1.0 / b
    h = d
    for i in range(1, 10000):
        an = -i * (i - a)
        b += 2.0
        d = an * d + b
        if d < _TINY and d > -_TINY:
            d = _TINY
        c = b + an / c
        if c < _TINY and c > -_TINY:
            c = _TINY
        d = 1.0 / d
        delta = d * c
        h *= delta
        if delta - 1.0 < _EPS_REL and 1.0 - delta < _EPS_REL:
            break
    total = 1.0 - exp(ax) * h
    return total if total > 0.0 else 0.0


cdef inline double _log_gamma_pdf(double a, double x) nogil:
    return _log_prefactor(a, x) - log(x)


cdef double _gamma_pdf_sup(double alpha, double x) nogil:
    # upper bound for sup over a >= alpha of g_a(x); sup sits near a = x + 1/2
    cdef double best = exp(_log_gamma_pdf(alpha, x))
    cdef double cand
    cdef double a
    cdef int j
    for j in range(3):
        a = x + 0.5 * j
        if a > alpha:
            cand = exp(_log_gamma_pdf(a, x))
            if cand > best:
                best = cand
    return 1.1 * best


cdef double _nc_cdf_scalar(double alpha, double x, double y, double eps,
                           long max_terms, int* err, double* err_bound) nogil:
    cdef long k0, k, terms
    cdef double w_mode, g_mode, s_mode, acc, mass, w, big_g, s, bound
    if x <= 0.0:
        return 0.0
    if y == 0.0:
        return _reg_inc_gamma(alpha, x)
    k0 = <long>floor(y)
    w_mode = exp(_log_prefactor(k0 + 1.0, y)) / y
    g_mode = _reg_inc_gamma(alpha + k0, x)
    s_mode = exp(_log_prefactor(alpha + k0, x)) / (alpha + k0)
    acc = w_mode * g_mode
    mass = w_mode
    terms = 1
    w = w_mode
    big_g = g_mode
    s = s_mode
    k = k0 - 1
    while k >= 0:
        w *= (k + 1) / y
        s *= (alpha + k + 1) / x
        big_g += s
        if big_g > 1.0:
            big_g = 1.0
        acc += w * big_g
        mass += w
        terms += 1
        if terms % _REFRESH == 0:
            w = exp(_log_prefactor(k + 1.0, y)) / y
            s = exp(_log_prefactor(alpha + k, x)) / (alpha + k)
        if w * (k + 1) <= 0.25 * eps:
            break
        if terms >= max_terms:
            err[0] = _ERR_TRUNC
            err_bound[0] = w * (k + 1)
            return acc
        k -= 1
    w = w_mode
    big_g = g_mode
    s = s_mode
    k = k0
    while True:
        bound = (1.0 - mass) * big_g
        if bound <= 0.75 * eps or big_g <= 0.0:
            break
        if terms >= max_terms:
            err[0] = _ERR_TRUNC
            err_bound[0] = bound
            return acc
        k += 1
        w *= y / k
        big_g -= s
        if big_g < 0.0:
            big_g = 0.0
        s *= x / (alpha + k)
        acc += w * big_g
        mass += w
        terms += 1
        if terms % _REFRESH == 0:
            w = exp(_log_prefactor(k + 1.0, y)) / y
            s = exp(_log_prefactor(alpha + k, x)) / (alpha + k)
    if acc < 0.0:
        return 0.0
    return acc if acc < 1.0 else 1.0


cdef double _nc_pdf_scalar(double alpha, double x, double y, double eps,
                           long max_terms, int* err, double* err_bound) nogil:
    cdef long k0, k, terms
    cdef double sup_g, w_mode, g_mode, acc, mass, w, g, bound, future_sup
    if y == 0.0:
        return exp(_log_gamma_pdf(alpha, x))
    sup_g = _gamma_pdf_sup(alpha, x)
    k0 = <long>floor(y)
    w_mode = exp(_log_prefactor(k0 + 1.0, y)) / y
    g_mode = exp(_log_gamma_pdf(alpha + k0, x))
    acc = w_mode * g_mode
    mass = w_mode
    terms = 1
    w = w_mode
    g = g_mode
    k = k0 - 1
    while k >= 0:
        w *= (k + 1) / y
        g *= (alpha + k) / x
        acc += w * g
        mass += w
        terms += 1
        if terms % _REFRESH == 0:
            w = exp(_log_prefactor(k + 1.0, y)) / y
            g = exp(_log_gamma_pdf(alpha + k, x))
        if w * (k + 1) * sup_g <= 0.25 * eps:
            break
        if terms >= max_terms:
            err[0] = _ERR_TRUNC
            err_bound[0] = w * (k + 1) * sup_g
            return acc
        k -= 1
    w = w_mode
    g = g_mode
    k = k0
    while True:
        future_sup = g if (alpha + k) >= x + 0.5 else sup_g
        bound = (1.0 - mass) * future_sup
        if bound <= 0.75 * eps:
            break
        if terms >= max_terms:
            err[0] = _ERR_TRUNC
            err_bound[0] = bound
            return acc
        g *= x / (alpha + k)
        k += 1
        w *= y / k
        acc += w * g
        mass += w
        terms += 1
        if terms % _REFRESH == 0:
            w = exp(_log_prefactor(k + 1.0, y)) / y
            g = exp(_log_gamma_pdf(alpha + k, x))
    return acc if acc > 0.0 else 0.0


def reg_inc_gamma(double a, double x):
    """Regularized lower incomplete gamma P(a, x)."""
    if a <= 0.0:
        raise ValueError(f"shape must be positive, got {a}")
    if x < 0.0:
        raise ValueError(f"x must be nonnegative, got {x}")
    return _reg_inc_gamma(a, x)


def nc_cdf(double alpha, double x, double y, double eps=1e-12, long max_terms=10**6):
    """Non-central gamma cdf G_alpha(x, y), mode-centered summation."""
    cdef int err = _ERR_NONE
    cdef double bound = 0.0
    cdef double value = _nc_cdf_scalar(alpha, x, y, eps, max_terms, &err, &bound)
    if err == _ERR_TRUNC:
        raise TruncationError(
            f"non-central gamma cdf truncated after {max_terms} terms", bound=bound, terms=max_terms
        )
    return value


def nc_pdf(double alpha, double x, double y, double eps=1e-12, long max_terms=10**6):
    """Non-central gamma pdf g_alpha(x, y), mode-centered summation."""
    cdef int err = _ERR_NONE
    cdef double bound = 0.0
    if x <= 0.0:
        raise ValueError(f"x must be positive, got {x}")
    cdef double value = _nc_pdf_scalar(alpha, x, y, eps, max_terms, &err, &bound)
    if err == _ERR_TRUNC:
        raise TruncationError(
            f"non-central gamma pdf truncated after {max_terms} terms", bound=bound, terms=max_terms
        )
    return value


cdef double _Y_SCALAR_FALLBACK = 600.0


cdef long _poisson_tail_cap(double y_max, double eps_tail, long max_terms) nogil:
    # smallest K with Poisson(y_max) mass beyond K below eps_tail
    cdef double w = exp(-y_max)
    cdef double cum = w
    cdef long k = 0
    while 1.0 - cum > eps_tail and k < max_terms:
        k += 1
        w *= y_max / k
        cum += w
    return k


cdef void _cdf_sweep(double[::1] yv, double[::1] ov, double[::1] chain, double[::1] inv,
                     long k_used, double eps) nogil:
    cdef Py_ssize_t i, n = yv.shape[0]
    cdef long k
    cdef double y, w, mass_gap, acc
    for i in range(n):
        y = yv[i]
        if y < 0.0:  # marker: handled by scalar fallback
            continue
        w = exp(-y)
        mass_gap = 1.0 - w
        acc = w * chain[0]
        k = 0
        while chain[k] * mass_gap > eps and k < k_used:
            k += 1
            w *= y * inv[k]
            mass_gap -= w
            acc += w * chain[k]
        if acc > 1.0:
            acc = 1.0
        ov[i] = acc if acc > 0.0 else 0.0


cdef void _pdf_sweep(double[::1] yv, double[::1] ov, double[::1] chain, double[::1] inv,
                     long k_used, long k_mono, double sup_g, double eps) nogil:
    # k_mono: first index where the chain is provably nonincreasing (shape >= x + 1/2)
    cdef Py_ssize_t i, n = yv.shape[0]
    cdef long k
    cdef double y, w, mass_gap, acc, future
    for i in range(n):
        y = yv[i]
        if y < 0.0:
            continue
        w = exp(-y)
        mass_gap = 1.0 - w
        acc = w * chain[0]
        k = 0
        while k < k_used:
            future = chain[k] if k >= k_mono else sup_g
            if future * mass_gap <= eps:
                break
            k += 1
            w *= y * inv[k]
            mass_gap -= w
            acc += w * chain[k]
        ov[i] = acc if acc > 0.0 else 0.0


def nc_cdf_array(double alpha, double x, y, double eps=1e-12, long max_terms=10**6):
    """Vector of G_alpha(x, y_i).

    The gamma-term chain G_{alpha+k}(x) is shared by every element (x is
    fixed), so it is precomputed once; each element then runs only the
    Poisson-weight recurrence with an early exit on its own tail bound.
    Elements with y > 600 take the scalar mode-centered path.
    """
    cdef cnp.ndarray[cnp.float64_t, ndim=1] yarr = np.ascontiguousarray(y, dtype=np.float64).copy()
    cdef cnp.ndarray[cnp.float64_t, ndim=1] out = np.empty(yarr.shape[0], dtype=np.float64)
    if yarr.shape[0] == 0:
        return out
    if x <= 0.0:
        out.fill(0.0)
        return out
    big = yarr > _Y_SCALAR_FALLBACK
    cdef bint any_big = bool(big.any())
    if any_big:
        big_vals = [nc_cdf(alpha, x, float(v), eps, max_terms) for v in yarr[big]]
        yarr[big] = -1.0  # sentinel skipped by the sweep
    cdef double y_max = float(yarr.max())
    if y_max < 0.0:
        y_max = 0.0
    cdef long cap = _poisson_tail_cap(y_max, eps, max_terms)
    if cap >= max_terms:
        raise TruncationError(
            f"non-central gamma cdf truncated after {max_terms} terms", bound=1.0, terms=max_terms
        )
    cdef cnp.ndarray[cnp.float64_t, ndim=1] chain = np.empty(cap + 1, dtype=np.float64)
    cdef cnp.ndarray[cnp.float64_t, ndim=1] inv = np.empty(cap + 1, dtype=np.float64)
    cdef double[::1] cv = chain
    cdef double[::1] iv = inv
    cdef double big_g = _reg_inc_gamma(alpha, x)
    cdef double s = exp(_log_prefactor(alpha, x)) / alpha
    cdef long k, k_used = cap
    cv[0] = big_g
    iv[0] = 0.0
    for k in range(1, cap + 1):
        iv[k] = 1.0 / k
        big_g -= s
        if big_g < 0.0:
            big_g = 0.0
        s *= x / (alpha + k)
        if k % _REFRESH == 0:
            big_g = _reg_inc_gamma(alpha + k, x)
            s = exp(_log_prefactor(alpha + k, x)) / (alpha + k)
        cv[k] = big_g
        if big_g <= eps:
            k_used = k
            break
    cdef double[::1] yv = yarr
    cdef double[::1] ov = out
    with nogil:
        _cdf_sweep(yv, ov, cv, iv, k_used, eps)
    if any_big:
        out[big] = big_vals
    return out


def nc_pdf_array(double alpha, double x, y, double eps=1e-12, long max_terms=10**6):
    """Vector of g_alpha(x, y_i); same shared-chain scheme as nc_cdf_array."""
    if x <= 0.0:
        raise ValueError(f"x must be positive, got {x}")
    cdef cnp.ndarray[cnp.float64_t, ndim=1] yarr = np.ascontiguousarray(y, dtype=np.float64).copy()
    cdef cnp.ndarray[cnp.float64_t, ndim=1] out = np.empty(yarr.shape[0], dtype=np.float64)
    if yarr.shape[0] == 0:
        return out
    big = yarr > _Y_SCALAR_FALLBACK
    cdef bint any_big = bool(big.any())
    if any_big:
        big_vals = [nc_pdf(alpha, x, float(v), eps, max_terms) for v in yarr[big]]
        yarr[big] = -1.0
    cdef double y_max = float(yarr.max())
    if y_max < 0.0:
        y_max = 0.0
    cdef double sup_g = _gamma_pdf_sup(alpha, x)
    cdef double eps_tail = eps / sup_g if sup_g > 1.0 else eps
    cdef long cap = _poisson_tail_cap(y_max, eps_tail, max_terms)
    if cap >= max_terms:
        raise TruncationError(
            f"non-central gamma pdf truncated after {max_terms} terms", bound=sup_g, terms=max_terms
        )
    cdef long k_mono = 0
    while alpha + k_mono < x + 0.5:
        k_mono += 1
    cdef cnp.ndarray[cnp.float64_t, ndim=1] chain = np.empty(cap + 1, dtype=np.float64)
    cdef cnp.ndarray[cnp.float64_t, ndim=1] inv = np.empty(cap + 1, dtype=np.float64)
    cdef double[::1] cv = chain
    cdef double[::1] iv = inv
    cdef double g = exp(_log_gamma_pdf(alpha, x))
    cdef long k, k_used = cap
    cv[0] = g
    iv[0] = 0.0
    for k in range(1, cap + 1):
        iv[k] = 1.0 / k
        g *= x / (alpha + k - 1.0)
        if k % _REFRESH == 0:
            g = exp(_log_gamma_pdf(alpha + k, x))
        cv[k] = g
        if k >= k_mono and g <= eps:
            k_used = k
            break
    cdef double[::1] yv = yarr
    cdef double[::1] ov = out
    with nogil:
        _pdf_sweep(yv, ov, cv, iv, k_used, k_mono, sup_g, eps)
    if any_big:
        out[big] = big_vals
    return out
