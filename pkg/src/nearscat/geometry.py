"""Parametric closed boundary curves and the rectangular imaging grid.

All curves are counterclockwise, 2*pi-periodic, with closed-form first
and second parameter derivatives (the boundary-integral quadrature needs
exact x'' for its diagonal terms).  The built-in shapes:

* ``circle``   : c + a (cos t, sin t)
* ``kite``     : (cos t + 0.6 cos 2t - 0.3, 1.3 sin t)
* ``starfish`` : (1 + 0.2 cos 5t)(cos t, sin t)
* ``trig``     : both components finite trigonometric series

Outward unit normal for a counterclockwise curve: nu = (x2', -x1')/|x'|.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np


@dataclass(frozen=True)
class ShapeSpec:
    """Description of a closed boundary shape plus its node count.

    ``x_cos``/``x_sin``/``y_cos``/``y_sin`` hold the trig-series harmonics
    (index j is the coefficient of cos(j t) / sin(j t)) and are only used
    for ``kind="trig"``.
    """

    kind: str
    center: tuple[float, float] = (0.0, 0.0)
    radius: float = 1.0
    x_cos: tuple[float, ...] = ()
    x_sin: tuple[float, ...] = ()
    y_cos: tuple[float, ...] = ()
    y_sin: tuple[float, ...] = ()
    n_nodes: int = 256

    def validate(self) -> None:
        if self.kind not in ("circle", "kite", "starfish", "trig"):
            raise ValueError(f"unknown shape kind {self.kind!r}")
        if self.n_nodes < 16 or self.n_nodes % 2 != 0:
            raise ValueError("n_nodes must be even and >= 16")
        if self.kind == "circle" and self.radius <= 0.0:
            raise ValueError("circle radius must be positive")
        if self.kind == "trig" and not (self.x_cos or self.x_sin or self.y_cos or self.y_sin):
            raise ValueError("trig shape needs at least one coefficient")


def _trig_eval(coeffs_cos, coeffs_sin, t, deriv):
    out = np.zeros_like(t)
    for j, a in enumerate(coeffs_cos):
        if a == 0.0:
            continue
        if deriv == 0:
            out += a * np.cos(j * t)
        elif deriv == 1:
            out += -a * j * np.sin(j * t)
        else:
            out += -a * j * j * np.cos(j * t)
    for j, b in enumerate(coeffs_sin):
        if b == 0.0:
            continue
        if deriv == 0:
            out += b * np.sin(j * t)
        elif deriv == 1:
            out += b * j * np.cos(j * t)
        else:
            out += -b * j * j * np.sin(j * t)
    return out


class BoundaryCurve:
    """Closed curve sampled at t_j = 2 pi j / M with analytic derivatives."""

    def __init__(self, spec: ShapeSpec):
        spec.validate()
        self.spec = spec
        self.n_nodes = spec.n_nodes
        self.t = 2.0 * np.pi * np.arange(self.n_nodes) / self.n_nodes
        self.points = self.position(self.t)           # (M, 2)
        self.tangents = self.derivative(self.t)       # x'
        self.seconds = self.second_derivative(self.t)  # x''
        self.speed = np.hypot(self.tangents[:, 0], self.tangents[:, 1])
        self.normals = np.column_stack([self.tangents[:, 1], -self.tangents[:, 0]])
        self.normals /= self.speed[:, None]

    # -- analytic evaluation at arbitrary parameters -------------------------

    def _eval(self, t, deriv: int) -> np.ndarray:
        t = np.atleast_1d(np.asarray(t, dtype=float))
        kind = self.spec.kind
        if kind == "circle":
            a = self.spec.radius
            cx, cy = self.spec.center
            c, s = np.cos(t), np.sin(t)
            if deriv == 0:
                return np.column_stack([cx + a * c, cy + a * s])
            if deriv == 1:
                return np.column_stack([-a * s, a * c])
            return np.column_stack([-a * c, -a * s])
        if kind == "kite":
            if deriv == 0:
                return np.column_stack([np.cos(t) + 0.6 * np.cos(2 * t) - 0.3,
                                        1.3 * np.sin(t)])
            if deriv == 1:
                return np.column_stack([-np.sin(t) - 1.2 * np.sin(2 * t),
                                        1.3 * np.cos(t)])
            return np.column_stack([-np.cos(t) - 2.4 * np.cos(2 * t),
                                    -1.3 * np.sin(t)])
        if kind == "starfish":
            r = 1.0 + 0.2 * np.cos(5 * t)
            rp = -np.sin(5 * t)
            rpp = -5.0 * np.cos(5 * t)
            c, s = np.cos(t), np.sin(t)
            if deriv == 0:
                return np.column_stack([r * c, r * s])
            if deriv == 1:
                return np.column_stack([rp * c - r * s, rp * s + r * c])
            return np.column_stack([rpp * c - 2 * rp * s - r * c,
                                    rpp * s + 2 * rp * c - r * s])
        # trig series
        sp = self.spec
        return np.column_stack([_trig_eval(sp.x_cos, sp.x_sin, t, deriv),
                                _trig_eval(sp.y_cos, sp.y_sin, t, deriv)])

    def position(self, t) -> np.ndarray:
        return self._eval(t, 0)

    def derivative(self, t) -> np.ndarray:
        return self._eval(t, 1)

    def second_derivative(self, t) -> np.ndarray:
        return self._eval(t, 2)

    def normal(self, t) -> np.ndarray:
        d = self.derivative(t)
        out = np.column_stack([d[:, 1], -d[:, 0]])
        return out / np.hypot(d[:, 0], d[:, 1])[:, None]

    # -- derived quantities ---------------------------------------------------

    def polygon_area(self) -> float:
        """Signed shoelace area of the node polygon (positive = CCW)."""
        x, y = self.points[:, 0], self.points[:, 1]
        return 0.5 * float(np.sum(x * np.roll(y, -1) - np.roll(x, -1) * y))

    def radial_profile(self, theta, center=(0.0, 0.0), n_dense: int = 4096) -> np.ndarray:
        """Radius of the curve along rays of angle theta from ``center``.

        Nearest-angle lookup on a dense resampling; valid for curves that
        are star-shaped with respect to ``center``.
        """
        theta = np.atleast_1d(np.asarray(theta, dtype=float))
        td = 2.0 * np.pi * np.arange(n_dense) / n_dense
        p = self.position(td) - np.asarray(center)[None, :]
        ang = np.mod(np.arctan2(p[:, 1], p[:, 0]), 2.0 * np.pi)
        rad = np.hypot(p[:, 0], p[:, 1])
        order = np.argsort(ang)
        ang, rad = ang[order], rad[order]
        q = np.mod(theta, 2.0 * np.pi)
        idx = np.searchsorted(ang, q)
        lo = (idx - 1) % n_dense
        hi = idx % n_dense
        d_lo = np.abs(q - ang[lo])
        d_hi = np.abs(ang[hi] - q)
        d_lo = np.minimum(d_lo, 2 * np.pi - d_lo)
        d_hi = np.minimum(d_hi, 2 * np.pi - d_hi)
        return np.where(d_lo <= d_hi, rad[lo], rad[hi])

    def contains(self, points) -> np.ndarray:
        """Even-odd (crossing number) point-in-curve test on the node polygon."""
        pts = np.atleast_2d(np.asarray(points, dtype=float))
        x0, y0 = self.points[:, 0], self.points[:, 1]
        x1, y1 = np.roll(x0, -1), np.roll(y0, -1)
        inside = np.zeros(pts.shape[0], dtype=bool)
        for i, (px, py) in enumerate(pts):
            cond = (y0 > py) != (y1 > py)
            with np.errstate(divide="ignore", invalid="ignore"):
                xi = x0 + (py - y0) * (x1 - x0) / (y1 - y0)
            inside[i] = np.count_nonzero(cond & (px < xi)) % 2 == 1
        return inside


def make_curve(spec: ShapeSpec) -> BoundaryCurve:
    """Build a sampled BoundaryCurve; raises ValueError on a bad spec."""
    return BoundaryCurve(spec)


def min_distance(curve: BoundaryCurve, center, radius: float) -> float:
    """min_j | |x(t_j) - center| - radius |, the node-sampled distance to a circle.

    Diagnostic accuracy only; sampled at the curve's own nodes, so use a
    dense curve (M >= 256, M = 4096 for reporting) when it matters.
    """
    d = curve.points - np.asarray(center, dtype=float)[None, :]
    return float(np.abs(np.hypot(d[:, 0], d[:, 1]) - radius).min())


@dataclass(frozen=True)
class ImagingGrid:
    """Rectangular imaging grid, row-major with y decreasing then x increasing."""

    xmin: float
    xmax: float
    ymin: float
    ymax: float
    nx: int
    ny: int
    points: np.ndarray = field(repr=False)       # (nx*ny, 2)
    mask: np.ndarray = field(repr=False)          # True = excluded
    exclusion: tuple[float, float, float] | None  # (cx, cy, radius)

    @property
    def spacing_x(self) -> float:
        return (self.xmax - self.xmin) / (self.nx - 1)

    @property
    def spacing_y(self) -> float:
        return (self.ymax - self.ymin) / (self.ny - 1)

    @property
    def n_points(self) -> int:
        return self.nx * self.ny

    def index_of(self, x: float, y: float) -> int:
        """Row-major index of the grid node nearest to (x, y); -1 if outside."""
        ix = round((x - self.xmin) / self.spacing_x)
        iy = round((self.ymax - y) / self.spacing_y)
        if not (0 <= ix < self.nx and 0 <= iy < self.ny):
            return -1
        return int(iy * self.nx + ix)

    def as_image(self, values: np.ndarray) -> np.ndarray:
        """Reshape a flat per-point array into (ny, nx) with top row = max y."""
        return np.asarray(values).reshape(self.ny, self.nx)


def imaging_grid(xmin: float, xmax: float, ymin: float, ymax: float,
                 nx: int, ny: int, exclusion=None) -> ImagingGrid:
    """Equispaced grid on [xmin, xmax] x [ymin, ymax].

    Ordering: top row (y = ymax) first, x increasing within a row.  The
    optional exclusion is a circle (center, radius); grid points with
    |p - center| <= radius are masked.
    """
    if nx < 2 or ny < 2:
        raise ValueError("nx and ny must be >= 2")
    if not (xmax > xmin and ymax > ymin):
        raise ValueError("degenerate grid bounds")
    xs = np.linspace(xmin, xmax, nx)
    ys = np.linspace(ymax, ymin, ny)
    gx, gy = np.meshgrid(xs, ys)           # row-major: y decreasing, x increasing
    points = np.column_stack([gx.ravel(), gy.ravel()])
    if exclusion is not None:
        center, radius = exclusion
        if radius < 0.0:
            raise ValueError("exclusion radius must be nonnegative")
        d = points - np.asarray(center, dtype=float)[None, :]
        mask = np.hypot(d[:, 0], d[:, 1]) <= radius
        excl = (float(center[0]), float(center[1]), float(radius))
    else:
        mask = np.zeros(points.shape[0], dtype=bool)
        excl = None
    return ImagingGrid(xmin=float(xmin), xmax=float(xmax), ymin=float(ymin),
                       ymax=float(ymax), nx=int(nx), ny=int(ny),
                       points=points, mask=mask, exclusion=excl)
