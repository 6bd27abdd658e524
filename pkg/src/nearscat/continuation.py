"""Fourier coefficients on the measurement ring and truncated mode expansions.

From scattered-field samples u(theta_m) on an equispaced ring the discrete
coefficients

    c_n = (1/M) sum_m u(theta_m) exp(-i n theta_m),   n = -N..N

feed the truncated expansion continued off the ring,

    u_N(r, theta) = sum_n c_n  C_n(k r) / C_n(k r_anchor)  exp(i n theta),

with C = H^(1) on the radiating (exterior) side and C = J on the regular
(interior) side.  The expansion and its gradient run entirely on the
in-house cylinder-function module; negative orders reduce by symmetry so
the C_{-n}/C_{-n} ratios never see the (-1)^n factors.

The interior ratio J_n(k r)/J_n(k R) blows up whenever k R sits near a
zero of J_n; ``guard_interior_modes`` zeroes and flags such modes.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, replace

import numpy as np

from . import cylfun
from .forward import RingMeasurement

DEFAULT_MODE_GUARD = 1e-8
_MIN_RADIUS = 1e-12


@dataclass(frozen=True)
class ModeCoefficients:
    """Truncated ring Fourier coefficients, one row per source.

    ``values[s, N + n]`` is the coefficient of exp(i n theta) for source s,
    n = -N..N.  ``excluded`` marks interior modes zeroed by the guard.
    """

    values: np.ndarray           # (n_src, 2N+1) complex
    anchor_radius: float
    k: float
    side: str                    # "exterior" | "interior"
    truncation: int
    excluded: np.ndarray         # (2N+1,) bool

    @property
    def orders(self) -> np.ndarray:
        return np.arange(-self.truncation, self.truncation + 1)

    @property
    def n_sources(self) -> int:
        return self.values.shape[0]

    @property
    def excluded_orders(self) -> list[int]:
        return [int(n) for n in self.orders[self.excluded]]


def truncation_order(delta: float, side: str) -> int:
    """Noise-coupled truncation: floor(|ln delta|) + 1 (exterior) or
    floor(1.5 |ln delta|) + 1 (interior)."""
    if not 0.0 < delta < 1.0:
        if delta == 0.0:
            raise ValueError("clean data (delta = 0): supply an explicit truncation")
        raise ValueError(f"noise level {delta} outside (0, 1)")
    scale = 1.0 if side == "exterior" else 1.5
    if side not in ("exterior", "interior"):
        raise ValueError(f"unknown side {side!r}")
    return int(math.floor(scale * abs(math.log(delta)))) + 1


def compute_coefficients(ring: RingMeasurement, truncation: int) -> ModeCoefficients:
    """Discrete Fourier coefficients of the ring samples for n = -N..N.

    Plain DFT sums (trapezoid rule on the equispaced receivers); requires
    scattered-field samples and 2N+1 <= number of receivers.
    """
    if ring.field_kind != "scattered":
        raise ValueError("ring must hold the scattered field, not total")
    m_rec = ring.n_receivers
    if 2 * truncation + 1 > m_rec:
        raise ValueError(
            f"truncation {truncation} violates Nyquist (needs >= {2 * truncation + 1} "
            f"receivers, have {m_rec})")
    expected = 2.0 * np.pi * np.arange(m_rec) / m_rec
    if not np.allclose(ring.angles, expected, atol=1e-12, rtol=0.0):
        raise ValueError("receivers must be equispaced starting at angle 0")
    orders = np.arange(-truncation, truncation + 1)
    basis = np.exp(-1j * np.outer(orders, ring.angles))      # (2N+1, M)
    values = ring.samples @ basis.T / m_rec
    return ModeCoefficients(values=values, anchor_radius=ring.radius, k=ring.k,
                            side=ring.side, truncation=truncation,
                            excluded=np.zeros(2 * truncation + 1, dtype=bool))


def guard_interior_modes(coeffs: ModeCoefficients,
                         threshold: float = DEFAULT_MODE_GUARD) -> ModeCoefficients:
    """Zero and flag interior modes whose anchor denominator |J_n(kR)| < threshold."""
    if coeffs.side != "interior":
        raise ValueError("mode guard applies to the interior side only")
    n_abs = np.abs(coeffs.orders)
    denom = cylfun.bessel_j_all(coeffs.truncation, coeffs.k * coeffs.anchor_radius)
    excluded = np.abs(denom[n_abs]) < threshold
    values = np.where(excluded[None, :], 0.0, coeffs.values)
    return replace(coeffs, values=values, excluded=excluded)


def outside_validity_strip(coeffs: ModeCoefficients, r) -> np.ndarray:
    """True where continued evaluation leaves the side covered by the anchor.

    Exterior data continue inward (r <= anchor); interior data continue
    outward (r >= anchor).  Evaluation beyond is allowed but flagged: the
    truncation-error estimates no longer apply there.
    """
    r = np.asarray(r, dtype=float)
    if coeffs.side == "exterior":
        return r > coeffs.anchor_radius * (1.0 + 1e-12)
    return r < coeffs.anchor_radius * (1.0 - 1e-12)


def _radial_tables(coeffs: ModeCoefficients, r: np.ndarray, with_deriv: bool):
    """C_n(kr)/C_n(k r_anchor) (and d/dr) for n = 0..N, shape (N+1, P).

    Excluded modes are zeroed here so every evaluation path honors the guard.
    """
    n_top = coeffs.truncation
    k = coeffs.k
    kr = k * r
    ka = k * coeffs.anchor_radius
    if coeffs.side == "exterior":
        vals = cylfun.hankel1_all(n_top + 1, kr)
        anchor = cylfun.hankel1_all(n_top, float(ka))
    else:
        vals = cylfun.bessel_j_all(n_top + 1, kr).astype(complex)
        anchor = cylfun.bessel_j_all(n_top, float(ka)).astype(complex)
    tiny = np.abs(anchor) < 1e-300
    anchor = np.where(tiny, 1.0, anchor)

    ratio = vals[:-1] / anchor[:, None]
    deriv = None
    if with_deriv:
        orders = np.arange(n_top + 1)[:, None]
        if coeffs.side == "exterior":
            dvals = -vals[1:] + orders * vals[:-1] / kr[None, :]
        else:
            dvals = np.empty_like(vals[:-1])
            dvals[0] = -vals[1]
            dvals[1:] = vals[:-2] - orders[1:] * vals[1:-1] / kr[None, :]
        deriv = k * dvals / anchor[:, None]

    n_abs = np.abs(coeffs.orders)
    keep = ~coeffs.excluded
    # per signed order n: ratio_n = ratio_{|n|} (symmetric), masked by the guard
    full = ratio[n_abs] * keep[:, None]
    full_d = deriv[n_abs] * keep[:, None] if with_deriv else None
    return full, full_d


def _as_polar(r, theta):
    r_arr = np.atleast_1d(np.asarray(r, dtype=float))
    th_arr = np.atleast_1d(np.asarray(theta, dtype=float))
    r_arr, th_arr = np.broadcast_arrays(r_arr, th_arr)
    return r_arr.ravel(), th_arr.ravel()


def eval_field(coeffs: ModeCoefficients, r, theta) -> np.ndarray:
    """Continued field u_N at polar points; shape (n_src,) + shape(r).

    At r = anchor this is exactly the order-N Fourier partial sum of the
    ring data.
    """
    r_flat, th_flat = _as_polar(r, theta)
    if np.any(r_flat < _MIN_RADIUS):
        raise ValueError("radius below 1e-12")
    ratio, _ = _radial_tables(coeffs, r_flat, with_deriv=False)
    phases = np.exp(1j * np.outer(coeffs.orders, th_flat))
    modes = ratio * phases                                   # (2N+1, P)
    out = coeffs.values @ modes
    return out.reshape((coeffs.n_sources,) + np.shape(r)) if np.shape(r) else out[:, 0]


def eval_gradient(coeffs: ModeCoefficients, r, theta) -> np.ndarray:
    """Cartesian gradient of the continued field; shape (n_src, 2) + shape(r).

    Radial part k C_n'(kr)/C_n(k r_anchor), angular part (i n / r) times the
    mode ratio, rotated with (cos th, sin th) and (-sin th, cos th).
    """
    r_flat, th_flat = _as_polar(r, theta)
    if np.any(r_flat < _MIN_RADIUS):
        raise ValueError("radius below 1e-12")
    ratio, dratio = _radial_tables(coeffs, r_flat, with_deriv=True)
    phases = np.exp(1j * np.outer(coeffs.orders, th_flat))
    g_rad = coeffs.values @ (dratio * phases)
    g_ang = coeffs.values @ ((1j * coeffs.orders[:, None] / r_flat[None, :]) * ratio * phases)
    cos_t, sin_t = np.cos(th_flat), np.sin(th_flat)
    gx = g_rad * cos_t[None, :] - g_ang * sin_t[None, :]
    gy = g_rad * sin_t[None, :] + g_ang * cos_t[None, :]
    out = np.stack([gx, gy], axis=1)                         # (n_src, 2, P)
    return out.reshape((coeffs.n_sources, 2) + np.shape(r)) if np.shape(r) else out[:, :, 0]
