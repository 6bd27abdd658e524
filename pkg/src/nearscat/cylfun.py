"""Integer-order cylinder functions J_n, Y_n, H_n^(1) on the real half-line.

Self-contained double-precision evaluation, independent of any library
special-function code:

* J_n by Miller's downward recurrence, normalized with
  J_0(t) + 2 sum_k J_{2k}(t) = 1  (DLMF 10.12.4 at theta = pi/2),
* Y_0, Y_1 by the ascending series with logarithmic term (DLMF 10.8.1)
  for small arguments and by the Hankel asymptotic expansion
  (DLMF 10.17.4) for large arguments,
* Y_n for n >= 2 by upward recurrence, stable because |Y_n| grows with
  the order.

Negative orders reduce through J_{-n} = (-1)^n J_n, Y_{-n} = (-1)^n Y_n
before any recurrence runs.  |Y_n| saturates at ``SATURATION`` instead
of overflowing to inf; callers can detect the clamp via
:func:`cyl_eval` or the ``return_saturated`` flag of
:func:`bessel_y_all`.

The module also provides two-sided envelope checks for |H_n^(1)(t)| and
|J_n(t)| in the deep evanescent regime n >> t.  Those ratios involve
2^n Gamma(n), so they are formed in log-space and never overflow for
supported orders.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

EULER_GAMMA = 0.57721566490153286061
SATURATION = 1e280          # |Y_n| clamp; beyond this only the sign is meaningful
MAX_ORDER = 200             # supported |n|

_TINY_ARG = 1e-6            # below this J_n comes from the two-term series
_SERIES_SPLIT = 12.0        # Y_0/Y_1: ascending series <=, Hankel expansion >
_MILLER_PAD = 10
_MILLER_SLOPE = 1.5
_RESCALE_LIMIT = 1e250


class DomainError(ValueError):
    """Argument or order outside the supported domain."""


class OverflowGuardError(ArithmeticError):
    """A log-space bound check hit a non-representable magnitude."""


@dataclass(frozen=True)
class CylEval:
    """J_n, Y_n and H_n^(1) = J_n + i Y_n at a single (order, argument)."""

    order: int
    argument: float
    jn: float
    yn: float
    y_saturated: bool = False

    @property
    def h1(self) -> complex:
        return complex(self.jn, self.yn)


@dataclass(frozen=True)
class BoundCheckReport:
    """Result of a two-sided envelope check over a contiguous order range."""

    argument: float
    n_start: int
    n_stop: int
    orders: np.ndarray
    ratios: np.ndarray
    lower: float
    upper: float

    @property
    def passed(self) -> bool:
        if self.ratios.size == 0:
            return True
        return bool(np.all(self.ratios >= self.lower) and np.all(self.ratios <= self.upper))

    @property
    def min_ratio(self) -> float:
        return float(self.ratios.min()) if self.ratios.size else math.nan

    @property
    def max_ratio(self) -> float:
        return float(self.ratios.max()) if self.ratios.size else math.nan


def _check_order(n: int) -> int:
    n = int(n)
    if abs(n) > MAX_ORDER:
        raise DomainError(f"order |{n}| exceeds supported maximum {MAX_ORDER}")
    return n


def _as_flat(t, positive: bool) -> tuple[np.ndarray, tuple]:
    arr = np.asarray(t, dtype=float)
    if not np.all(np.isfinite(arr)):
        raise DomainError("argument must be finite")
    if positive:
        if np.any(arr <= 0.0):
            raise DomainError("argument must be positive")
    elif np.any(arr < 0.0):
        raise DomainError("argument must be nonnegative")
    return np.atleast_1d(arr).ravel(), arr.shape


# ---------------------------------------------------------------------------
# J_n
# ---------------------------------------------------------------------------

def bessel_j_all(n_max: int, t) -> np.ndarray:
    """J_0 .. J_{n_max} at t (scalar or array); shape (n_max+1,) + shape(t).

    t = 0 is allowed and returns the exact limits (1, 0, 0, ...).
    """
    if n_max < 0:
        raise DomainError("n_max must be nonnegative")
    _check_order(n_max)
    flat, shape = _as_flat(t, positive=False)
    out = np.zeros((n_max + 1, flat.size))

    zero = flat == 0.0
    tiny = (flat < _TINY_ARG) & ~zero
    rest = ~(zero | tiny)
    if np.any(zero):
        out[0, zero] = 1.0
    if np.any(tiny):
        out[:, tiny] = _bessel_j_small(n_max, flat[tiny])
    if np.any(rest):
        out[:, rest] = _bessel_j_miller(n_max, flat[rest])
    return out.reshape((n_max + 1,) + shape)


def _bessel_j_small(n_max: int, t: np.ndarray) -> np.ndarray:
    # first two series terms; relative error O(t^4) < 1e-24 for t < 1e-6
    out = np.zeros((n_max + 1, t.size))
    half = 0.5 * t
    factor = np.ones_like(t)          # (t/2)^n / n!
    for n in range(n_max + 1):
        out[n] = factor * (1.0 - half * half / (n + 1.0))
        factor = factor * half / (n + 1.0)
    return out


def _bessel_j_miller(n_max: int, t: np.ndarray) -> np.ndarray:
    # Start deep enough that the truncated tail of the normalization series
    # J_0 + 2 sum J_2k stays below ~1e-18: J_m(t) ~ (e t / 2m)^m needs
    # m - t to grow like sqrt(t).  The n + 10 + 1.5 t rule alone leaves a
    # ~1e-11 tail for small n.
    tmax = float(t.max())
    depth = max(_MILLER_PAD + _MILLER_SLOPE * tmax, tmax + 9.0 * math.sqrt(tmax) + 25.0)
    m_start = n_max + int(math.ceil(depth))
    if m_start % 2:
        m_start += 1
    out = np.zeros((n_max + 1, t.size))
    p_hi = np.zeros_like(t)                  # trial value at order m_start + 1
    p = np.full_like(t, 1e-30)               # trial value at order m_start
    norm = np.zeros_like(t)
    if m_start <= n_max:
        out[m_start] = p
    if m_start % 2 == 0:
        norm = norm + 2.0 * p
    for m in range(m_start, 0, -1):
        p_lo = (2.0 * m / t) * p - p_hi      # order m - 1
        p_hi, p = p, p_lo
        order = m - 1
        if order <= n_max:
            out[order] = p
        if order == 0:
            norm = norm + p
        elif order % 2 == 0:
            norm = norm + 2.0 * p
        big = np.abs(p) > _RESCALE_LIMIT
        if np.any(big):
            scale = np.where(big, 1e-250, 1.0)
            out *= scale
            p = p * scale
            p_hi = p_hi * scale
            norm = norm * scale
    return out / norm


def bessel_j(n: int, t: float) -> float:
    """Bessel function of the first kind, integer order, real t >= 0."""
    n = _check_order(n)
    sign = -1.0 if (n < 0 and n % 2 != 0) else 1.0
    n = abs(n)
    val = bessel_j_all(n, float(t))[n]
    return sign * float(val)


# ---------------------------------------------------------------------------
# Y_n
# ---------------------------------------------------------------------------

def _y01_series(t: np.ndarray, j0: np.ndarray, j1: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    # Alternating sums cancel down from ~1e4 at t ~ 12; extended precision
    # keeps the cancellation error below the float64 target.
    tx = t.astype(np.longdouble)
    x = 0.25 * tx * tx
    log_half = np.log(0.5 * tx) + np.longdouble(EULER_GAMMA)

    s0 = np.zeros_like(tx)                # sum_{m>=1} (-1)^{m+1} H_m x^m/(m!)^2
    s1 = np.ones_like(tx)                 # sum_{m>=0} (-1)^m (H_m+H_{m+1}) x^m/(m!(m+1)!)
    term0 = np.ones_like(tx)
    term1 = np.ones_like(tx)
    h_m = np.longdouble(0.0)
    sign = 1.0
    for m in range(1, 200):
        term0 = term0 * x / (m * m)
        term1 = term1 * x / (m * (m + 1.0))
        h_m += np.longdouble(1.0) / m
        h_m1 = h_m + np.longdouble(1.0) / (m + 1.0)
        s0 += sign * h_m * term0
        s1 += (-sign) * (h_m + h_m1) * term1
        sign = -sign
        if float(term0.max()) < 1e-24 and float(term1.max()) < 1e-24:
            break
    y0 = (2.0 / np.longdouble(math.pi)) * (log_half * j0 + s0)
    y1 = (2.0 / np.longdouble(math.pi)) * (log_half * j1 - 1.0 / tx - 0.25 * tx * s1)
    return y0.astype(float), y1.astype(float)


def _y_asymptotic(nu: int, t: np.ndarray) -> np.ndarray:
    """Hankel expansion Y_nu ~ sqrt(2/(pi t)) (sin w P + cos w Q), w = t - nu pi/2 - pi/4.

    Terms a_j(nu)/t^j stop at the per-element optimal truncation point
    (first nondecreasing term); residual ~1e-11 relative at t = 12.
    """
    mu = 4.0 * nu * nu
    p = np.zeros_like(t)
    q = np.zeros_like(t)
    a = 1.0
    tpow = np.ones_like(t)               # 1/t^j
    prev = np.full(t.shape, np.inf)
    active = np.ones(t.shape, dtype=bool)
    for j in range(60):
        term = a * tpow
        mag = np.abs(term)
        active = active & (mag < prev)
        if not active.any():
            break
        contrib = np.where(active, term, 0.0)
        sign = 1.0 if (j // 2) % 2 == 0 else -1.0
        if j % 2 == 0:
            p += sign * contrib
        else:
            q += sign * contrib
        prev = mag
        a = a * (mu - (2 * j + 1) ** 2) / (8.0 * (j + 1))
        tpow = tpow / t
    w = t - nu * 0.5 * math.pi - 0.25 * math.pi
    return np.sqrt(2.0 / (math.pi * t)) * (np.sin(w) * p + np.cos(w) * q)


def bessel_y_all(n_max: int, t, return_saturated: bool = False):
    """Y_0 .. Y_{n_max} at t > 0, clamped at +-SATURATION.

    With ``return_saturated=True`` also returns a boolean array marking
    entries that hit the clamp (their true magnitude exceeds SATURATION).
    """
    if n_max < 0:
        raise DomainError("n_max must be nonnegative")
    _check_order(n_max)
    flat, shape = _as_flat(t, positive=True)

    out = np.empty((n_max + 1, flat.size))
    small = flat <= _SERIES_SPLIT
    y0 = np.empty_like(flat)
    y1 = np.empty_like(flat)
    if np.any(small):
        ts = flat[small]
        j01 = bessel_j_all(1, ts)
        y0[small], y1[small] = _y01_series(ts, j01[0], j01[1])
    if np.any(~small):
        tl = flat[~small]
        y0[~small] = _y_asymptotic(0, tl)
        y1[~small] = _y_asymptotic(1, tl)

    out[0] = y0
    if n_max >= 1:
        out[1] = y1
    for n in range(1, n_max):
        nxt = (2.0 * n / flat) * out[n] - out[n - 1]
        out[n + 1] = np.clip(nxt, -SATURATION, SATURATION)
    out = np.clip(out, -SATURATION, SATURATION)
    saturated = np.abs(out) >= SATURATION
    out = out.reshape((n_max + 1,) + shape)
    if return_saturated:
        return out, saturated.reshape((n_max + 1,) + shape)
    return out


def bessel_y(n: int, t: float) -> float:
    """Bessel function of the second kind (Neumann function), t > 0."""
    n = _check_order(n)
    sign = -1.0 if (n < 0 and n % 2 != 0) else 1.0
    n = abs(n)
    val = bessel_y_all(n, float(t))[n]
    return sign * float(val)


# ---------------------------------------------------------------------------
# H_n^(1) and derivatives
# ---------------------------------------------------------------------------

def hankel1_all(n_max: int, t) -> np.ndarray:
    """H_0^(1) .. H_{n_max}^(1) at t > 0 as a complex array."""
    j = bessel_j_all(n_max, t)
    y = bessel_y_all(n_max, t)
    return j + 1j * y


def hankel1(n: int, t: float) -> complex:
    """Hankel function of the first kind, H_n^(1)(t) = J_n(t) + i Y_n(t)."""
    n = _check_order(n)
    sign = -1.0 if (n < 0 and n % 2 != 0) else 1.0
    n = abs(n)
    return sign * complex(bessel_j(n, t), bessel_y(n, t))


def cyl_eval(n: int, t: float) -> CylEval:
    """Evaluate J_n, Y_n, H_n^(1) at (n, t) with a saturation flag."""
    n = _check_order(n)
    sign = -1.0 if (n < 0 and n % 2 != 0) else 1.0
    m = abs(n)
    jn = sign * float(bessel_j_all(m, float(t))[m])
    yv, sat = bessel_y_all(m, float(t), return_saturated=True)
    yn = sign * float(yv[m])
    return CylEval(order=n, argument=float(t), jn=jn, yn=yn,
                   y_saturated=bool(sat[m]))


def bessel_j_deriv(n: int, t: float) -> float:
    """dJ_n/dt through J_n'(t) = J_{n-1}(t) - n J_n(t)/t; t = 0 by series limit."""
    n = _check_order(n)
    sign = -1.0 if (n < 0 and n % 2 != 0) else 1.0
    n = abs(n)
    t = float(t)
    if t == 0.0:
        return sign * (0.5 if n == 1 else 0.0)
    vals = bessel_j_all(max(n, 1), t)
    if n == 0:
        return -float(vals[1])
    return sign * float(vals[n - 1] - n * vals[n] / t)


def hankel1_deriv(n: int, t: float) -> complex:
    """dH_n^(1)/dt through H_n^(1)'(t) = -H_{n+1}^(1)(t) + n H_n^(1)(t)/t."""
    n = _check_order(n)
    sign = -1.0 if (n < 0 and n % 2 != 0) else 1.0
    n = abs(n)
    t = float(t)
    if t <= 0.0:
        raise DomainError("argument must be positive")
    h = hankel1_all(n + 1, t)
    return sign * complex(-h[n + 1] + n * h[n] / t)


# ---------------------------------------------------------------------------
# Envelope checks (log-space)
# ---------------------------------------------------------------------------

def hankel_bound_start(t: float) -> int:
    """Smallest order covered by the |H_n^(1)| envelope: n > (e t + 1)/2, n >= 1."""
    return max(1, int(math.floor((math.e * t + 1.0) / 2.0)) + 1)


def bessel_bound_start(t: float) -> int:
    """Smallest order covered by the |J_n| envelope: n > max(ceil(0.3 t^2 - 1), 1)."""
    return max(int(math.ceil(0.3 * t * t - 1.0)), 1) + 1


def check_hankel_bounds(t: float, n_max: int) -> BoundCheckReport:
    """Ratios pi t^n |H_n^(1)(t)| / (3 2^(n-1) Gamma(n)) for covered orders.

    Every ratio must lie in [1/2, e^t].  Gamma(n) = (n-1)! enters through
    lgamma, the whole ratio through its logarithm.
    """
    t = float(t)
    if t <= 0.0:
        raise DomainError("argument must be positive")
    _check_order(n_max)
    n_start = hankel_bound_start(t)
    orders = np.arange(n_start, n_max + 1)
    if orders.size == 0:
        return BoundCheckReport(t, n_start, n_max, orders, np.empty(0), 0.5, math.exp(t))

    jv = bessel_j_all(n_max, t)
    yv, sat = bessel_y_all(n_max, t, return_saturated=True)
    if np.any(sat[orders]):
        raise OverflowGuardError("|Y_n| saturated inside the checked order range")
    log_ratio = np.empty(orders.size)
    for i, n in enumerate(orders):
        log_h = math.log(math.hypot(jv[n], yv[n]))
        log_ratio[i] = (math.log(math.pi) + n * math.log(t) + log_h
                        - math.log(3.0) - (n - 1) * math.log(2.0) - math.lgamma(n))
    if np.any(log_ratio > 700.0):
        raise OverflowGuardError("bound ratio exceeds representable range")
    ratios = np.exp(log_ratio)
    return BoundCheckReport(t, int(orders[0]), n_max, orders, ratios, 0.5, math.exp(t))


def check_bessel_bounds(t: float, n_max: int) -> BoundCheckReport:
    """Ratios 2^n n! |J_n(t)| / t^n for covered orders; must lie in [1/6, 1]."""
    t = float(t)
    if t <= 0.0:
        raise DomainError("argument must be positive")
    _check_order(n_max)
    n_start = bessel_bound_start(t)
    orders = np.arange(n_start, n_max + 1)
    if orders.size == 0:
        return BoundCheckReport(t, n_start, n_max, orders, np.empty(0), 1.0 / 6.0, 1.0)

    jv = bessel_j_all(n_max, t)
    log_ratio = np.empty(orders.size)
    for i, n in enumerate(orders):
        if jv[n] == 0.0:
            raise OverflowGuardError(f"J_{n}({t}) underflowed; ratio not representable")
        log_ratio[i] = (n * math.log(2.0) + math.lgamma(n + 1.0)
                        + math.log(abs(jv[n])) - n * math.log(t))
    ratios = np.exp(log_ratio)
    return BoundCheckReport(t, int(orders[0]), n_max, orders, ratios, 1.0 / 6.0, 1.0)
