"""Synthetic near-field data: point-source incidence, Nystrom BIE solvers,
and an analytic separation-of-variables oracle for circular scatterers.

Formulation
-----------
Incident field of a point source at z (2D free-space Green's function):

    u_i(x; z) = (i/4) H_0^(1)(k |x - z|)

Scattered-field representations and boundary equations (jump relations as
in Colton & Kress, "Inverse Acoustic and Electromagnetic Scattering
Theory"; quadrature as in Kress, "Linear Integral Equations", sect. 12.3):

    exterior Dirichlet : u_s = (D - i k S) phi,  (I/2 + K - i k S) phi = -u_i
    exterior Neumann   : u_s = S phi,            (K' - I/2) phi = -du_i/dnu
    interior Dirichlet : u_s = D phi,            (K - I/2) phi  = -u_i
    interior Neumann   : u_s = S phi,            (K' + I/2) phi = -du_i/dnu

The combined representation for the exterior Dirichlet problem is immune
to irregular frequencies; the single-layer Neumann representations are
not, which is why the solver carries a condition estimate and refuses to
return garbage near a representation breakdown.

Discretization: global trigonometric Nystrom on M equispaced nodes with
the standard splitting  kernel = A1(t, tau) ln(4 sin^2((t - tau)/2)) + A2
and the spectrally accurate log-quadrature weights R_j; spectral accuracy
on analytic curves.

All kernel assembly here is vectorized through scipy.special; the series
oracle below runs on the in-house cylinder-function module instead, so
the two routes share no special-function code.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, replace

import numpy as np
import scipy.linalg as sla
import scipy.sparse.linalg as spla
from scipy.special import hankel1 as _sp_hankel1
from scipy.special import j0 as _sp_j0
from scipy.special import j1 as _sp_j1

from . import cylfun
from .geometry import BoundaryCurve

EULER_GAMMA = cylfun.EULER_GAMMA
CONDITION_LIMIT = 1e12
SOURCE_ON_BOUNDARY_TOL = 1e-9
NEAR_BOUNDARY_WAVELENGTHS = 0.05
_ORACLE_REL_TOL = 1e-14
_ORACLE_RUN = 8          # consecutive negligible terms required
_ORACLE_MAX_ORDER = 180


class GeometryError(ValueError):
    """Sources/receivers on the wrong side of the boundary or on it."""


class SingularityError(ValueError):
    """Field evaluation requested at (or too close to) the source point."""


class ResonanceError(RuntimeError):
    """Boundary system too ill-conditioned (representation breakdown)."""


class ModeDegeneracyError(RuntimeError):
    """Circle oracle hit an interior eigenvalue: a mode denominator vanished."""


class SeriesConvergenceError(RuntimeError):
    """Circle oracle series failed to converge within the order cap."""


# ---------------------------------------------------------------------------
# Sources, measurements
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class SourceSet:
    """Point sources equally spaced on a circle, starting at angle 0."""

    center: tuple[float, float]
    radius: float
    count: int
    side: str                    # "exterior" | "interior"

    def __post_init__(self):
        if self.count < 1:
            raise ValueError("need at least one source")
        if self.radius <= 0.0:
            raise ValueError("source circle radius must be positive")
        if self.side not in ("exterior", "interior"):
            raise ValueError(f"unknown side {self.side!r}")

    @property
    def angles(self) -> np.ndarray:
        return 2.0 * np.pi * np.arange(self.count) / self.count

    @property
    def positions(self) -> np.ndarray:
        a = self.angles
        return np.column_stack([self.center[0] + self.radius * np.cos(a),
                                self.center[1] + self.radius * np.sin(a)])


@dataclass(frozen=True)
class RingMeasurement:
    """Complex field samples on a measurement circle, one row per source."""

    radius: float
    angles: np.ndarray           # (n_rec,)
    k: float
    samples: np.ndarray          # (n_src, n_rec) complex
    field_kind: str              # "scattered" | "total"
    noise_level: float
    side: str
    sources: SourceSet

    @property
    def n_receivers(self) -> int:
        return self.angles.size

    @property
    def receiver_points(self) -> np.ndarray:
        return np.column_stack([self.radius * np.cos(self.angles),
                                self.radius * np.sin(self.angles)])

    def with_samples(self, samples: np.ndarray, noise_level: float) -> "RingMeasurement":
        return replace(self, samples=samples, noise_level=noise_level)


# ---------------------------------------------------------------------------
# Incident field
# ---------------------------------------------------------------------------

def _diff_to_source(x, z):
    pts = np.atleast_2d(np.asarray(x, dtype=float))
    d = pts - np.asarray(z, dtype=float)[None, :]
    r = np.hypot(d[:, 0], d[:, 1])
    if np.any(r < 1e-12):
        raise SingularityError("evaluation point coincides with the source")
    return pts, d, r


def incident_field(x, z, k: float):
    """Point-source incident field (i/4) H_0^(1)(k|x-z|); x may be (..., 2)."""
    x_arr = np.asarray(x, dtype=float)
    pts, _, r = _diff_to_source(x_arr.reshape(-1, 2), z)
    vals = 0.25j * _sp_hankel1(0, k * r)
    return complex(vals[0]) if x_arr.ndim == 1 else vals.reshape(x_arr.shape[:-1])


def incident_gradient(x, z, k: float):
    """grad_x u_i = -(i k/4) H_1^(1)(k|x-z|) (x-z)/|x-z|; shape (..., 2)."""
    x_arr = np.asarray(x, dtype=float)
    _, d, r = _diff_to_source(x_arr.reshape(-1, 2), z)
    fac = -0.25j * k * _sp_hankel1(1, k * r) / r
    g = fac[:, None] * d
    return g[0] if x_arr.ndim == 1 else g.reshape(x_arr.shape)


# ---------------------------------------------------------------------------
# Nystrom discretization
# ---------------------------------------------------------------------------

def _log_weights_from_diff(dt: np.ndarray, m_nodes: int) -> np.ndarray:
    """Kress weights R_j(t) for the ln(4 sin^2((t - t_j)/2)) factor.

    dt holds t - t_j; with 2n nodes:
    R_j(t) = -(2 pi/n) sum_{m=1}^{n-1} cos(m (t - t_j))/m - (pi/n^2) cos(n (t - t_j)).
    """
    n = m_nodes // 2
    m = np.arange(1, n)
    acc = np.cos(dt[..., None] * m) / m          # (..., n-1)
    return -(2.0 * np.pi / n) * acc.sum(axis=-1) - (np.pi / n**2) * np.cos(n * dt)


def _log_weight_circulant(m_nodes: int) -> np.ndarray:
    """R_{|i-j|} as a full (M, M) circulant, built from one weight vector."""
    n = m_nodes // 2
    d = 2.0 * np.pi * np.arange(m_nodes) / m_nodes
    row = _log_weights_from_diff(d, m_nodes)      # R at distance d
    idx = (np.arange(m_nodes)[:, None] - np.arange(m_nodes)[None, :]) % m_nodes
    return row[idx]


def _kernel_blocks(curve: BoundaryCurve, k: float, t_targets: np.ndarray,
                   pos_t: np.ndarray, tan_t: np.ndarray, diagonal: bool):
    """S, K, K' Nystrom blocks mapping node densities to values at t_targets.

    With ``diagonal=True`` the targets are the curve nodes themselves and the
    split-kernel diagonal limits are inserted.
    """
    mm = curve.n_nodes
    h = 2.0 * np.pi / mm
    tj = curve.t
    y = curve.points
    nj = np.column_stack([curve.tangents[:, 1], -curve.tangents[:, 0]])  # nu |x'|
    spj = curve.speed

    dt = t_targets[:, None] - tj[None, :]
    dx = pos_t[:, None, :] - y[None, :, :]          # x(t) - x(tau)
    r = np.hypot(dx[..., 0], dx[..., 1])
    if diagonal:
        np.fill_diagonal(r, 1.0)
    kr = k * r
    j0, j1 = _sp_j0(kr), _sp_j1(kr)
    h0, h1 = _sp_hankel1(0, kr), _sp_hankel1(1, kr)

    lg = np.log(np.maximum(4.0 * np.sin(0.5 * dt) ** 2, 1e-300))
    if diagonal:
        np.fill_diagonal(lg, 0.0)
        rw = _log_weight_circulant(mm)
    else:
        rw = _log_weights_from_diff(dt, mm)

    sp_t = np.hypot(tan_t[:, 0], tan_t[:, 1])
    nt = np.column_stack([tan_t[:, 1], -tan_t[:, 0]])

    # single layer
    s1 = -(0.25 / np.pi) * j0 * spj[None, :]
    s2 = 0.25j * h0 * spj[None, :] - s1 * lg
    # double layer: nu(tau) . (x(tau) - x(t)) = -(n_j . dx)
    b_k = -(dx[..., 0] * nj[None, :, 0] + dx[..., 1] * nj[None, :, 1])
    k1 = (0.25 * k / np.pi) * j1 * b_k / r
    k_full = -0.25j * k * h1 * b_k / r
    k2 = k_full - k1 * lg
    # adjoint double layer: nu(t) . (x(t) - x(tau)) = n_t . dx
    b_kp = dx[..., 0] * nt[:, None, 0] + dx[..., 1] * nt[:, None, 1]
    scale = spj[None, :] / sp_t[:, None]
    kp1 = (0.25 * k / np.pi) * j1 * b_kp / r * scale
    kp_full = -0.25j * k * h1 * b_kp / r * scale
    kp2 = kp_full - kp1 * lg

    if diagonal:
        w = curve.tangents[:, 0] * curve.seconds[:, 1] - curve.tangents[:, 1] * curve.seconds[:, 0]
        d_idx = np.arange(mm)
        s1[d_idx, d_idx] = -(0.25 / np.pi) * spj          # J_0(0) = 1
        s2[d_idx, d_idx] = (0.25j - (np.log(0.5 * k * spj) + EULER_GAMMA) / (2.0 * np.pi)) * spj
        k1[d_idx, d_idx] = 0.0
        k2[d_idx, d_idx] = -w / (4.0 * np.pi * spj**2)
        kp1[d_idx, d_idx] = 0.0
        kp2[d_idx, d_idx] = -w / (4.0 * np.pi * spj**2)

    s_op = rw * s1 + h * s2
    k_op = rw * k1 + h * k2
    kp_op = rw * kp1 + h * kp2
    return s_op, k_op, kp_op


def _boundary_operators(curve: BoundaryCurve, k: float):
    return _kernel_blocks(curve, k, curve.t, curve.points, curve.tangents, diagonal=True)


_REPRESENTATION = {
    ("exterior", "soft"): "combined-layer",
    ("exterior", "hard"): "single-layer",
    ("interior", "soft"): "double-layer",
    ("interior", "hard"): "single-layer",
}


def _system_matrix(curve: BoundaryCurve, bc: str, side: str, k: float) -> np.ndarray:
    s_op, k_op, kp_op = _boundary_operators(curve, k)
    eye = np.eye(curve.n_nodes)
    if (side, bc) == ("exterior", "soft"):
        return 0.5 * eye + k_op - 1j * k * s_op
    if (side, bc) == ("exterior", "hard"):
        return kp_op - 0.5 * eye
    if (side, bc) == ("interior", "soft"):
        return k_op - 0.5 * eye
    if (side, bc) == ("interior", "hard"):
        return kp_op + 0.5 * eye
    raise ValueError(f"unknown problem variant side={side!r} bc={bc!r}")


@dataclass
class DensitySolution:
    """Solved boundary densities (one row per source) plus solve diagnostics."""

    density: np.ndarray          # (n_src, M) complex
    representation: str
    condition_estimate: float
    system_residual: float
    bc: str
    side: str
    k: float


def _rhs(curve: BoundaryCurve, bc: str, k: float, sources: SourceSet) -> np.ndarray:
    zs = sources.positions
    if bc == "soft":
        return -np.array([incident_field(curve.points, z, k) for z in zs])
    rows = []
    for z in zs:
        g = incident_gradient(curve.points, z, k)
        rows.append(-(g[:, 0] * curve.normals[:, 0] + g[:, 1] * curve.normals[:, 1]))
    return np.array(rows)


def _condition_estimate(a: np.ndarray, lu_piv) -> float:
    norm1 = float(np.abs(a).sum(axis=0).max())
    mm = a.shape[0]
    inv_op = spla.LinearOperator(
        (mm, mm), dtype=complex,
        matvec=lambda v: sla.lu_solve(lu_piv, v),
        rmatvec=lambda v: sla.lu_solve(lu_piv, v, trans=2),
    )
    try:
        inv_norm = float(spla.onenormest(inv_op))
    except Exception:
        inv_norm = float(np.abs(np.linalg.inv(a)).sum(axis=0).max())
    return norm1 * inv_norm


def solve_densities(curve: BoundaryCurve, bc: str, side: str, k: float,
                    sources: SourceSet) -> DensitySolution:
    """Assemble and solve the boundary system for every source at once."""
    if bc not in ("soft", "hard"):
        raise ValueError(f"unknown boundary condition {bc!r}")
    zs = sources.positions
    d = zs[:, None, :] - curve.points[None, :, :]
    if np.hypot(d[..., 0], d[..., 1]).min() < SOURCE_ON_BOUNDARY_TOL:
        raise GeometryError("a source lies on the boundary")
    inside = curve.contains(zs)
    if side == "exterior" and np.any(inside):
        raise GeometryError("exterior problem but a source is inside the scatterer")
    if side == "interior" and not np.all(inside):
        raise GeometryError("interior problem but a source is outside the cavity")

    a = _system_matrix(curve, bc, side, k)
    lu_piv = sla.lu_factor(a)
    cond = _condition_estimate(a, lu_piv)
    if cond > CONDITION_LIMIT:
        raise ResonanceError(
            f"boundary system condition estimate {cond:.3e} exceeds {CONDITION_LIMIT:.0e} "
            f"(k={k}, side={side}, bc={bc}); likely an irregular frequency")
    rhs = _rhs(curve, bc, k, sources)
    phi = sla.lu_solve(lu_piv, rhs.T).T
    res = np.linalg.norm(phi @ a.T - rhs, axis=1) / np.linalg.norm(rhs, axis=1)
    return DensitySolution(density=phi, representation=_REPRESENTATION[(side, bc)],
                           condition_estimate=cond, system_residual=float(res.max()),
                           bc=bc, side=side, k=k)


def evaluate_scattered(curve: BoundaryCurve, sol: DensitySolution, points) -> np.ndarray:
    """Layer-potential evaluation of u_s at points off the boundary; (n_src, P)."""
    pts = np.atleast_2d(np.asarray(points, dtype=float))
    y = curve.points
    nj = np.column_stack([curve.tangents[:, 1], -curve.tangents[:, 0]])
    d = pts[:, None, :] - y[None, :, :]
    r = np.hypot(d[..., 0], d[..., 1])
    kr = sol.k * r
    s_ker = 0.25j * _sp_hankel1(0, kr) * curve.speed[None, :]
    if sol.representation == "single-layer":
        g = s_ker
    else:
        d_ker = 0.25j * sol.k * _sp_hankel1(1, kr) \
            * (d[..., 0] * nj[None, :, 0] + d[..., 1] * nj[None, :, 1]) / r
        g = d_ker if sol.representation == "double-layer" else d_ker - 1j * sol.k * s_ker
    h = 2.0 * np.pi / curve.n_nodes
    return h * (sol.density @ g.T)


def solve_forward(curve: BoundaryCurve, bc: str, side: str, k: float,
                  sources: SourceSet, eval_points) -> np.ndarray:
    """Scattered field u_s(x; z_j) at eval points, one row per source."""
    sol = solve_densities(curve, bc, side, k, sources)
    return evaluate_scattered(curve, sol, eval_points)


def simulate_ring(curve: BoundaryCurve, bc: str, side: str, k: float,
                  sources: SourceSet, ring_radius: float, n_receivers: int,
                  center=(0.0, 0.0)) -> RingMeasurement:
    """Clean scattered-field samples on an equispaced receiver circle."""
    angles = 2.0 * np.pi * np.arange(n_receivers) / n_receivers
    pts = np.column_stack([center[0] + ring_radius * np.cos(angles),
                           center[1] + ring_radius * np.sin(angles)])
    inside = curve.contains(pts)
    if side == "exterior" and np.any(inside):
        raise GeometryError("exterior problem but a receiver is inside the scatterer")
    if side == "interior" and not np.all(inside):
        raise GeometryError("interior problem but a receiver is outside the cavity")
    samples = solve_forward(curve, bc, side, k, sources, pts)
    if not np.all(np.isfinite(samples)):
        raise RuntimeError("forward solve produced non-finite ring samples")
    return RingMeasurement(radius=float(ring_radius), angles=angles, k=float(k),
                           samples=samples, field_kind="scattered", noise_level=0.0,
                           side=side, sources=sources)


def near_boundary_mask(curve: BoundaryCurve, points, k: float) -> np.ndarray:
    """True where a point is closer to the boundary than 0.05 wavelengths."""
    pts = np.atleast_2d(np.asarray(points, dtype=float))
    d = pts[:, None, :] - curve.points[None, :, :]
    dist = np.hypot(d[..., 0], d[..., 1]).min(axis=1)
    return dist < NEAR_BOUNDARY_WAVELENGTHS * (2.0 * np.pi / k)


def _trig_interp(values: np.ndarray, t_star: np.ndarray) -> np.ndarray:
    mm = values.size
    c = np.fft.fft(values) / mm
    modes = np.where(np.arange(mm) < mm // 2, np.arange(mm), np.arange(mm) - mm)
    return np.exp(1j * np.outer(t_star, modes)) @ c


def boundary_residual(curve: BoundaryCurve, sol: DensitySolution, sources: SourceSet,
                      t_checkpoints) -> float:
    """Max relative residual of B(u_i + u_s) at off-node boundary parameters.

    The trace of the layer potential is evaluated with the same split-kernel
    quadrature at off-node targets, plus the jump term with a trigonometric
    interpolation of the density; the residual is scaled by the maximum of
    |B u_i| over the checkpoints.
    """
    t_star = np.atleast_1d(np.asarray(t_checkpoints, dtype=float))
    gap = np.abs((t_star[:, None] - curve.t[None, :] + np.pi) % (2 * np.pi) - np.pi)
    if gap.min() < 1e-10:
        raise ValueError("checkpoints must be off-node")
    pos = curve.position(t_star)
    tan = curve.derivative(t_star)
    s_rows, k_rows, kp_rows = _kernel_blocks(curve, sol.k, t_star, pos, tan, diagonal=False)
    phi_star = np.array([_trig_interp(p, t_star) for p in sol.density])

    worst = 0.0
    for i, z in enumerate(sources.positions):
        phi = sol.density[i]
        if sol.bc == "soft":
            ui = incident_field(pos, z, sol.k)
            if sol.representation == "combined-layer":
                trace = (k_rows - 1j * sol.k * s_rows) @ phi + 0.5 * phi_star[i]
            else:                       # interior double layer
                trace = k_rows @ phi - 0.5 * phi_star[i]
            resid = np.abs(ui + trace).max() / np.abs(ui).max()
        else:
            g = incident_gradient(pos, z, sol.k)
            nu = curve.normal(t_star)
            dn_ui = g[:, 0] * nu[:, 0] + g[:, 1] * nu[:, 1]
            jump = -0.5 if sol.side == "exterior" else 0.5
            trace = kp_rows @ phi + jump * phi_star[i]
            resid = np.abs(dn_ui + trace).max() / np.abs(dn_ui).max()
        worst = max(worst, float(resid))
    return worst


# ---------------------------------------------------------------------------
# Analytic circle oracle (separation of variables, in-house special functions)
# ---------------------------------------------------------------------------

def _oracle_arrays(n_hi: int, bc: str, side: str, k: float, a: float):
    """Per-order boundary coefficients: numerator and denominator factors."""
    ka = k * a
    ja = cylfun.bessel_j_all(n_hi, ka)
    ha = cylfun.hankel1_all(n_hi, ka)
    if bc == "soft":
        num_a, den_a = ja, ha
    else:
        orders = np.arange(n_hi + 1)
        jd = np.empty(n_hi + 1)
        jd[0] = -ja[1]
        jd[1:] = ja[:-1] - orders[1:] * ja[1:] / ka
        ha_ext = cylfun.hankel1_all(n_hi + 1, ka)
        hd = -ha_ext[1:] + orders * ha_ext[:-1] / ka
        num_a, den_a = jd, hd
    if side == "interior":
        num_a, den_a = den_a, num_a
    return num_a, den_a


def analytic_circle(radius: float, bc: str, side: str, k: float, z, eval_points,
                    radial_derivative: bool = False, center=(0.0, 0.0)) -> np.ndarray:
    """Scattered field of a sound-soft/hard circle for one point source.

    Returns u_s at each eval point (``radial_derivative=True`` gives
    du_s/dr instead).  Exterior soft:

        u_s = -(i/4) sum_n [J_n(ka)/H_n(ka)] H_n(k r_x) H_n(k r_z) e^{i n (th_x - th_z)}

    with J'/H' ratios for the hard case and the reciprocal ratios with
    J_n radial factors for the interior problem.  The series is truncated
    once 8 consecutive terms fall below 1e-14 of the partial sum.
    """
    a = float(radius)
    if a <= 0.0:
        raise ValueError("radius must be positive")
    c = np.asarray(center, dtype=float)
    zz = np.asarray(z, dtype=float) - c
    rz = float(np.hypot(zz[0], zz[1]))
    if abs(rz - a) < SOURCE_ON_BOUNDARY_TOL:
        raise GeometryError("source on the circle")
    if side == "exterior" and rz < a:
        raise GeometryError("exterior oracle needs the source outside the circle")
    if side == "interior" and rz > a:
        raise GeometryError("interior oracle needs the source inside the circle")
    th_z = math.atan2(zz[1], zz[0])

    pts = np.atleast_2d(np.asarray(eval_points, dtype=float)) - c[None, :]
    rx = np.hypot(pts[:, 0], pts[:, 1])
    th_x = np.arctan2(pts[:, 1], pts[:, 0])
    if np.any(rx < 1e-12) and side == "exterior":
        raise GeometryError("exterior oracle evaluation at the origin")

    n_hi = min(_ORACLE_MAX_ORDER, max(40, int(k * max(rx.max(), rz, a)) + 30))
    while True:
        result = _circle_series_attempt(n_hi, a, bc, side, k, rz, th_z, rx, th_x,
                                        radial_derivative)
        if result is not None:
            return result
        if n_hi >= _ORACLE_MAX_ORDER:
            raise SeriesConvergenceError(
                f"circle series not converged by order {n_hi} (k={k}, side={side})")
        n_hi = min(_ORACLE_MAX_ORDER, 2 * n_hi)


def _circle_series_attempt(n_hi, a, bc, side, k, rz, th_z, rx, th_x, radial_derivative):
    num_a, den_a = _oracle_arrays(n_hi, bc, side, k, a)
    # A tiny denominator marks an eigenvalue collision only for n <= ka
    # (the first zero of J_n / J_n' lies above n).  Beyond that both the
    # denominator and the source factor are evanescent-small and their
    # ratio is well defined, so those modes are evaluated normally.
    degenerate = (np.abs(den_a) < 1e-12) & (np.arange(n_hi + 1) <= k * a)
    safe_den = np.where(den_a == 0.0, 1e-300, den_a)

    if side == "exterior":
        radial = cylfun.hankel1_all(n_hi + 1, k * rx)
        src = cylfun.hankel1_all(n_hi, k * rz)
    else:
        radial = cylfun.bessel_j_all(n_hi + 1, k * rx).astype(complex)
        src = cylfun.bessel_j_all(n_hi, k * rz).astype(complex)
    if radial_derivative:
        orders = np.arange(n_hi + 1)[:, None]
        if side == "exterior":
            rad = k * (-radial[1:] + orders * radial[:-1] / (k * rx[None, :]))
        else:
            jd = np.empty_like(radial[:-1])
            jd[0] = -radial[1]
            jd[1:] = radial[:-2] - orders[1:] * radial[1:-1] / (k * rx[None, :])
            rad = k * jd
    else:
        rad = radial[:-1]

    d_th = th_x[None, :] - th_z
    ang = np.cos(np.arange(n_hi + 1)[:, None] * d_th) * 2.0
    ang[0] = 1.0

    # grouping (num_a * radial) * (src / den_a) keeps intermediates bounded
    terms = (num_a[:, None] * rad) * (src / safe_den)[:, None] * ang
    terms[degenerate] = 0.0          # poisoned anyway; reported below if needed
    mags = np.abs(terms).max(axis=1)
    partial = np.cumsum(terms, axis=0)
    psums = np.abs(partial).max(axis=1)

    run = 0
    n_stop = None
    for n in range(n_hi + 1):
        run = run + 1 if mags[n] <= _ORACLE_REL_TOL * max(psums[n], 1e-300) else 0
        if run >= _ORACLE_RUN:
            n_stop = n
            break
    if n_stop is None:
        return None
    if np.any(degenerate[: n_stop + 1]):
        bad = int(np.nonzero(degenerate[: n_stop + 1])[0][0])
        raise ModeDegeneracyError(
            f"mode n={bad} denominator below 1e-12 at ka={k * a:.6g} ({side} {bc})")
    return -0.25j * partial[n_stop]
