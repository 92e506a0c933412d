"""Compactly supported probability measures and their integral transforms.

A measure is a finite collection of atoms plus piecewise-linear density
pieces, together with declared support endpoints.  The declared endpoints
must contain the support but may extend beyond it, which is occasionally
useful for modelling limits of sequences whose extreme eigenvalues converge
to a point carrying no mass.

All transforms use the convention ``G(z) = integral of 1/(z - t)``, so that
``G`` is positive and strictly decreasing to the right of the support and
has non-positive imaginary part in the upper half-plane.
"""

from __future__ import annotations

import json
from dataclasses import dataclass

import numpy as np
from scipy.optimize import brentq, linprog
from scipy import sparse

from .errors import DivergenceError, DomainError, SingularityError

__all__ = [
    "Measure",
    "Semicircle",
    "TransformValue",
    "stieltjes",
    "inverse_stieltjes",
    "r_transform",
    "quantile_discretize",
    "dudley_distance",
    "levy_distance",
    "log_potential",
]

_MASS_TOL = 1e-12
_ATOM_CLEARANCE = 1e-12


@dataclass(frozen=True)
class TransformValue:
    """A transform evaluation together with the branch it was taken on."""

    argument: complex
    value: complex
    branch: str  # "outside-support" or "upper-half-plane"


def _as_segments(grid, values):
    """Return per-segment arrays (t0, t1, y0, y1) for one density piece."""
    t = np.asarray(grid, dtype=float)
    y = np.asarray(values, dtype=float)
    if t.ndim != 1 or t.size < 2 or t.shape != y.shape:
        raise ValueError("density piece needs matching 1-d grid/values of length >= 2")
    if np.any(np.diff(t) <= 0):
        raise ValueError("density grid must be strictly increasing")
    if np.any(y < 0):
        raise ValueError("density values must be nonnegative")
    return t[:-1], t[1:], y[:-1], y[1:]


class Measure:
    """Atoms plus piecewise-linear density pieces with declared endpoints.

    Parameters
    ----------
    atoms : iterable of (location, weight)
        Point masses; weights must be positive.
    density_pieces : iterable of (grid, values)
        Each pair is interpreted as a piecewise-linear probability density
        on ``[grid[0], grid[-1]]``.
    left_edge, right_edge : float, optional
        Declared support endpoints.  Default to the extremes of atoms and
        density grids.  May be declared wider than the actual support.
    """

    def __init__(self, atoms=(), density_pieces=(), left_edge=None, right_edge=None):
        locs, weights = [], []
        for loc, w in atoms:
            locs.append(float(loc))
            weights.append(float(w))
        order = np.argsort(locs) if locs else []
        self._atom_loc = np.asarray(locs, dtype=float)[order] if locs else np.empty(0)
        self._atom_w = np.asarray(weights, dtype=float)[order] if locs else np.empty(0)
        if np.any(self._atom_w <= 0):
            raise ValueError("atom weights must be positive")

        self._pieces = []
        for grid, values in density_pieces:
            g = np.array(grid, dtype=float)
            v = np.array(values, dtype=float)
            _as_segments(g, v)
            g.setflags(write=False)
            v.setflags(write=False)
            self._pieces.append((g, v))

        support_lo, support_hi = self._support_bounds()
        self.left_edge = support_lo if left_edge is None else float(left_edge)
        self.right_edge = support_hi if right_edge is None else float(right_edge)
        self._validate(support_lo, support_hi)
        self._atom_loc.setflags(write=False)
        self._atom_w.setflags(write=False)

    # -- construction helpers -------------------------------------------------

    @classmethod
    def point_mass(cls, location: float) -> "Measure":
        return cls(atoms=[(location, 1.0)])

    @classmethod
    def two_point(cls, a: float) -> "Measure":
        if a <= 0:
            raise ValueError("two-point parameter a must be positive")
        return cls(atoms=[(-a, 0.5), (a, 0.5)])

    @classmethod
    def uniform(cls, lo: float, hi: float) -> "Measure":
        if not hi > lo:
            raise ValueError("uniform endpoints must satisfy lo < hi")
        h = 1.0 / (hi - lo)
        return cls(density_pieces=[([lo, hi], [h, h])])

    @classmethod
    def from_points(cls, points, weights=None) -> "Measure":
        """Empirical-style measure; duplicate locations are merged."""
        pts = np.asarray(points, dtype=float).ravel()
        if pts.size == 0:
            raise ValueError("need at least one point")
        w = (np.full(pts.size, 1.0 / pts.size) if weights is None
             else np.asarray(weights, dtype=float).ravel())
        locs, inv = np.unique(pts, return_inverse=True)
        merged = np.zeros(locs.size)
        np.add.at(merged, inv, w)
        return cls(atoms=list(zip(locs, merged)))

    @classmethod
    def from_spec(cls, spec: dict) -> "Measure":
        """Build a measure from its JSON specification dictionary."""
        preset = spec.get("preset")
        if preset:
            params = spec.get("params", {})
            if preset == "semicircle":
                return Semicircle(float(params.get("sigma", 1.0)))
            if preset == "two-point":
                return cls.two_point(float(params.get("a", 1.0)))
            if preset == "uniform":
                lo, hi = params.get("endpoints", (0.0, 1.0))
                return cls.uniform(float(lo), float(hi))
            if preset == "point-mass":
                return cls.point_mass(float(params.get("location", 0.0)))
            raise ValueError(f"unknown preset {preset!r}")
        atoms = [(float(a), float(w)) for a, w in spec.get("atoms", [])]
        pieces = [(p["grid"], p["values"]) for p in spec.get("density", [])]
        kwargs = {}
        if "left_edge" in spec:
            kwargs["left_edge"] = float(spec["left_edge"])
        if "right_edge" in spec:
            kwargs["right_edge"] = float(spec["right_edge"])
        return cls(atoms=atoms, density_pieces=pieces, **kwargs)

    @classmethod
    def from_json(cls, path) -> "Measure":
        with open(path) as fh:
            return cls.from_spec(json.load(fh))

    # -- invariants ------------------------------------------------------------

    def _support_bounds(self):
        lo, hi = np.inf, -np.inf
        if self._atom_loc.size:
            lo, hi = self._atom_loc[0], self._atom_loc[-1]
        for g, _ in self._pieces:
            lo, hi = min(lo, g[0]), max(hi, g[-1])
        if not np.isfinite(lo):
            raise ValueError("measure needs at least one atom or density piece")
        return float(lo), float(hi)

    def _validate(self, support_lo, support_hi):
        if self.left_edge > self.right_edge:
            raise ValueError("left_edge must not exceed right_edge")
        if support_lo < self.left_edge - 1e-12 or support_hi > self.right_edge + 1e-12:
            raise ValueError("support exceeds declared edges")
        mass = self.mass()
        if abs(mass - 1.0) > _MASS_TOL:
            raise ValueError(f"total mass {mass!r} differs from 1 beyond 1e-12")

    def mass(self) -> float:
        m = float(self._atom_w.sum())
        for g, v in self._pieces:
            m += float(np.trapezoid(v, g))
        return m

    # -- basic descriptors -----------------------------------------------------

    @property
    def atoms(self):
        return list(zip(self._atom_loc.tolist(), self._atom_w.tolist()))

    @property
    def density_pieces(self):
        return list(self._pieces)

    @property
    def span(self) -> float:
        return self.right_edge - self.left_edge

    def mean(self) -> float:
        m = float(np.dot(self._atom_loc, self._atom_w))
        for t0, t1, y0, y1 in map(lambda p: _as_segments(*p), self._pieces):
            # integral of t * linear density over each segment
            m += float(np.sum((t1 - t0) * (t0 * (2 * y0 + y1) + t1 * (y0 + 2 * y1)) / 6.0))
        return m

    def second_moment(self) -> float:
        m = float(np.dot(self._atom_loc**2, self._atom_w))
        for t0, t1, y0, y1 in map(lambda p: _as_segments(*p), self._pieces):
            h = t1 - t0
            # integral of t^2 (y0 + s (t-t0)) dt with s the segment slope
            m += float(np.sum(h * (y0 * (3 * t0**2 + 2 * t0 * h + h**2) / 3.0
                                   + (y1 - y0) * (t0**2 / 2 + 2 * t0 * h / 3 + h**2 / 4))))
        return m

    def variance(self) -> float:
        return self.second_moment() - self.mean() ** 2

    def reflected(self) -> "Measure":
        """The pushforward under x -> -x (used to locate left edges)."""
        atoms = [(-loc, w) for loc, w in self.atoms]
        pieces = [(-g[::-1], v[::-1]) for g, v in self._pieces]
        return Measure(atoms=atoms, density_pieces=pieces,
                       left_edge=-self.right_edge, right_edge=-self.left_edge)

    # -- distribution function and quantiles ------------------------------------

    def cdf(self, x):
        x_arr = np.asarray(x, dtype=float)
        out = np.zeros_like(x_arr, dtype=float)
        if self._atom_loc.size:
            out += self._atom_w @ (self._atom_loc[:, None] <= x_arr.ravel()).reshape(
                (self._atom_loc.size,) + x_arr.shape)
        for g, v in self._pieces:
            out += _piece_cdf(g, v, x_arr)
        return float(out) if np.isscalar(x) or x_arr.ndim == 0 else out

    def _breakpoints(self):
        pts = [self._atom_loc]
        for g, _ in self._pieces:
            pts.append(g)
        return np.unique(np.concatenate(pts)) if pts else np.empty(0)

    def quantile(self, q: float) -> float:
        """Generalized inverse inf{x : F(x) >= q} for q in (0, 1]."""
        if not 0.0 < q <= 1.0:
            raise DomainError("quantile level must lie in (0, 1]")
        bp = self._breakpoints()
        fv = self.cdf(bp)
        idx = int(np.searchsorted(fv, q - 1e-15))
        if idx >= bp.size:
            idx = bp.size - 1
        # exact hit or jump at the breakpoint
        if idx == 0 or fv[idx - 1] >= q - 1e-15:
            return float(bp[idx]) if fv[idx] >= q - 1e-15 else float(bp[-1])
        lo, hi = bp[idx - 1], bp[idx]
        f_lo = fv[idx - 1]
        # crossing inside (lo, hi): only possible across a density segment
        target = q - f_lo
        for g, v in self._pieces:
            if g[0] <= lo and hi <= g[-1]:
                j = int(np.searchsorted(g, lo, side="right")) - 1
                j = min(max(j, 0), g.size - 2)
                y0 = v[j] + (v[j + 1] - v[j]) * (lo - g[j]) / (g[j + 1] - g[j])
                s = (v[j + 1] - v[j]) / (g[j + 1] - g[j])
                # solve y0 * d + s d^2 / 2 = target for d in (0, hi - lo]
                if abs(s) < 1e-300:
                    d = target / y0 if y0 > 0 else hi - lo
                else:
                    disc = y0 * y0 + 2 * s * target
                    d = (np.sqrt(max(disc, 0.0)) - y0) / s
                return float(min(lo + max(d, 0.0), hi))
        return float(hi)

    # -- transforms --------------------------------------------------------------

    def _check_real_argument(self, z: float):
        if self.left_edge <= z <= self.right_edge:
            raise DomainError(
                f"argument {z} lies inside the support [{self.left_edge}, {self.right_edge}]")
        if self._atom_loc.size and np.min(np.abs(self._atom_loc - z)) <= _ATOM_CLEARANCE:
            raise SingularityError(f"argument {z} collides with an atom")

    def _g(self, z):
        """Stieltjes transform at scalar or array argument; no domain checks."""
        z_arr = np.asarray(z)
        scalar = z_arr.ndim == 0
        zv = np.atleast_1d(z_arr)
        out = np.zeros(zv.shape, dtype=complex if np.iscomplexobj(zv) else float)
        if self._atom_loc.size:
            out += (self._atom_w / (zv[..., None] - self._atom_loc)).sum(axis=-1)
        for g, v in self._pieces:
            out += _piece_stieltjes(g, v, zv)
        return out[0] if scalar else out

    def inv_square_moment(self, w):
        """Integral of 1/(w - t)^2 against the measure, for w off-support."""
        w_arr = np.atleast_1d(np.asarray(w, dtype=float))
        out = np.zeros(w_arr.shape)
        if self._atom_loc.size:
            out += (self._atom_w / (w_arr[..., None] - self._atom_loc) ** 2).sum(axis=-1)
        for g, v in self._pieces:
            out += _piece_inv_square(g, v, w_arr)
        return float(out[0]) if np.isscalar(w) else out

    def log_integral(self, x: float) -> float:
        """Integral of log(x - t) against the measure, for x >= sup support.

        Raises DivergenceError when an atom sits exactly at ``x``.
        """
        x = float(x)
        total = 0.0
        if self._atom_loc.size:
            if np.min(np.abs(self._atom_loc - x)) <= _ATOM_CLEARANCE:
                raise DivergenceError(f"log potential diverges: atom at {x}")
            if np.max(self._atom_loc) > x:
                raise DomainError("log integral needs x above all atoms")
            total += float(np.dot(self._atom_w, np.log(x - self._atom_loc)))
        for g, v in self._pieces:
            if g[-1] > x + 1e-15:
                raise DomainError("log integral needs x at or above the density support")
            total += _piece_log_integral(g, v, x)
        return total

    def g_at_right_edge(self) -> float:
        """Limit of the Stieltjes transform from the right at the declared edge.

        Computed along ``right_edge + 2^{-k}`` with Aitken extrapolation;
        returns ``inf`` when the limit diverges.
        """
        r = self.right_edge
        if self._atom_loc.size and r - self._atom_loc[-1] <= _ATOM_CLEARANCE:
            return np.inf
        vals = []
        for k in range(2, 47):
            z = r + 2.0 ** (-k)
            if z == r:
                break
            try:
                self._check_real_argument(z)
                g = float(self._g(z))
            except SingularityError:
                return np.inf
            if g > 1e12:
                return np.inf
            vals.append(g)
        if len(vals) < 4:
            return np.inf
        scale = max(1.0, abs(vals[-1]))
        d1 = vals[-3] - vals[-4]
        d2 = vals[-2] - vals[-3]
        d3 = vals[-1] - vals[-2]
        if abs(d3) <= 1e-11 * scale:
            return vals[-1]
        ratio = d3 / d2 if d2 != 0 else 1.0
        if 0.0 < ratio < 0.98 and 0.0 < (d2 / d1 if d1 else 1.0) < 0.98:
            return vals[-1] + d3 * ratio / (1.0 - ratio)
        return np.inf

    def __repr__(self):
        return (f"Measure(atoms={self._atom_loc.size}, pieces={len(self._pieces)}, "
                f"support=[{self.left_edge:g}, {self.right_edge:g}])")


class Semicircle(Measure):
    """Semicircular measure of variance sigma^2, supported on [-2 sigma, 2 sigma].

    Transforms, distribution function, and log potentials use closed forms,
    so edge quantities are exact to rounding rather than grid resolution.
    """

    def __init__(self, sigma: float = 1.0):
        if sigma <= 0:
            raise ValueError("sigma must be positive")
        self.sigma = float(sigma)
        self._atom_loc = np.empty(0)
        self._atom_w = np.empty(0)
        self._pieces = []
        self.left_edge = -2.0 * self.sigma
        self.right_edge = 2.0 * self.sigma

    def mass(self) -> float:
        return 1.0

    def pdf(self, x):
        x = np.asarray(x, dtype=float)
        s2 = self.sigma**2
        return np.sqrt(np.clip(4 * s2 - x * x, 0.0, None)) / (2 * np.pi * s2)

    def cdf(self, x):
        xs = np.clip(np.asarray(x, dtype=float) / (2 * self.sigma), -1.0, 1.0)
        val = 0.5 + (xs * np.sqrt(1 - xs * xs) + np.arcsin(xs)) / np.pi
        return float(val) if np.isscalar(x) else val

    def quantile(self, q: float) -> float:
        if not 0.0 < q <= 1.0:
            raise DomainError("quantile level must lie in (0, 1]")
        if q == 1.0:
            return self.right_edge
        return float(brentq(lambda t: self.cdf(t) - q,
                            self.left_edge, self.right_edge, xtol=1e-15))

    def mean(self) -> float:
        return 0.0

    def second_moment(self) -> float:
        return self.sigma**2

    def reflected(self) -> "Semicircle":
        return self

    def _g(self, z):
        z_arr = np.asarray(z)
        scalar = z_arr.ndim == 0
        zv = np.atleast_1d(z_arr)
        two_s = 2.0 * self.sigma
        if np.iscomplexobj(zv):
            root = np.sqrt(zv - two_s) * np.sqrt(zv + two_s)
        else:
            root = np.sign(zv) * np.sqrt(zv * zv - two_s * two_s)
        out = (zv - root) / (2.0 * self.sigma**2)
        return out[0] if scalar else out

    def _check_real_argument(self, z: float):
        if self.left_edge <= z <= self.right_edge:
            raise DomainError(
                f"argument {z} lies inside the support [{self.left_edge}, {self.right_edge}]")

    def inv_square_moment(self, w):
        w_arr = np.atleast_1d(np.asarray(w, dtype=float))
        two_s = 2.0 * self.sigma
        root = np.sign(w_arr) * np.sqrt(w_arr * w_arr - two_s * two_s)
        out = (w_arr / root - 1.0) / (2.0 * self.sigma**2)
        return float(out[0]) if np.isscalar(w) else out

    def log_integral(self, x: float) -> float:
        x = float(x)
        if x < self.right_edge - 1e-15:
            raise DomainError("log integral needs x at or above the support")
        t = max(x / self.sigma, 2.0)
        root = np.sqrt(max(t * t - 4.0, 0.0))
        anti = 0.5 * t * root - 2.0 * np.log((t + root) / 2.0)
        return float(np.log(self.sigma) + 0.5 + (t * t - 4.0) / 4.0 - 0.5 * anti)

    def g_at_right_edge(self) -> float:
        return 1.0 / self.sigma

    def __repr__(self):
        return f"Semicircle(sigma={self.sigma:g})"


# -- closed-form segment integrals ------------------------------------------------


def _piece_stieltjes(grid, values, z):
    t0, t1, y0, y1 = _as_segments(grid, values)
    s = (y1 - y0) / (t1 - t0)
    alpha = y0 - s * t0
    zz = z[..., None]
    if np.iscomplexobj(z):
        log_term = np.log(zz - t0) - np.log(zz - t1)
    else:
        log_term = np.log((zz - t0) / (zz - t1))
    return ((alpha + s * zz) * log_term - s * (t1 - t0)).sum(axis=-1)


def _piece_inv_square(grid, values, w):
    t0, t1, y0, y1 = _as_segments(grid, values)
    s = (y1 - y0) / (t1 - t0)
    alpha = y0 - s * t0
    ww = w[..., None]
    val = (alpha + s * ww) * (1.0 / (ww - t1) - 1.0 / (ww - t0))
    val += s * np.log((ww - t1) / (ww - t0))
    return val.sum(axis=-1)


def _piece_log_integral(grid, values, x):
    t0, t1, y0, y1 = _as_segments(grid, values)
    s = (y1 - y0) / (t1 - t0)
    alpha = y0 - s * t0
    a_coef = alpha + s * x
    b_coef = -s

    def primitive(u):
        u = np.maximum(u, 0.0)
        lg = np.where(u > 0, np.log(np.maximum(u, 1e-300)), 0.0)
        return a_coef * (u * lg - u) + b_coef * (0.5 * u * u * lg - 0.25 * u * u)

    return float((primitive(x - t0) - primitive(x - t1)).sum())


def _piece_cdf(grid, values, x):
    t0, t1, y0, y1 = _as_segments(grid, values)
    node_mass = np.concatenate([[0.0], np.cumsum(0.5 * (y0 + y1) * (t1 - t0))])
    xx = np.atleast_1d(x)
    idx = np.clip(np.searchsorted(grid, xx, side="right") - 1, 0, len(grid) - 2)
    frac = np.clip(xx - grid[idx], 0.0, grid[idx + 1] - grid[idx])
    s = (values[idx + 1] - values[idx]) / (grid[idx + 1] - grid[idx])
    inside = node_mass[idx] + values[idx] * frac + 0.5 * s * frac * frac
    out = np.where(xx < grid[0], 0.0, np.where(xx >= grid[-1], node_mass[-1], inside))
    return out.reshape(np.shape(x)) if np.ndim(x) else float(out[0])


# -- public operations -------------------------------------------------------------


def stieltjes(mu: Measure, z) -> TransformValue:
    """Stieltjes transform G(z) of the measure.

    ``z`` may be a real number outside the support or a point in the open
    upper half-plane.  Atoms are summed exactly; density pieces use exact
    per-segment primitives.
    """
    z_c = complex(z)
    if z_c.imag > 0:
        return TransformValue(z_c, complex(mu._g(np.complex128(z_c))), "upper-half-plane")
    if z_c.imag < 0:
        raise DomainError("complex arguments must lie in the upper half-plane")
    x = z_c.real
    mu._check_real_argument(x)
    return TransformValue(x, float(mu._g(x)), "outside-support")


def _g_real(mu: Measure, x: float) -> float:
    mu._check_real_argument(x)
    return float(mu._g(x))


def inverse_stieltjes(mu: Measure, y: float) -> float:
    """Functional inverse of the Stieltjes transform.

    Solves ``G(x) = y`` by bracketed root-finding on the correct side of the
    support; the admissible range is ``(G(left_edge), G(right_edge))``
    excluding zero, with edge values understood as one-sided limits.
    """
    y = float(y)
    if y == 0.0:
        raise DomainError("y = 0 is outside the invertible range")
    span = max(mu.span, 1.0)
    if y > 0:
        g_lim = mu.g_at_right_edge()
        if y >= g_lim:
            # edge values are understood as one-sided limits
            if y <= g_lim * (1.0 + 1e-12):
                return mu.right_edge
            raise DomainError(f"y={y} is above the edge limit {g_lim}")
        hi = mu.right_edge + 10.0 * span
        while _g_real(mu, hi) > y:
            hi = mu.right_edge + 2.0 * (hi - mu.right_edge)
            if hi - mu.right_edge > 1e18:
                raise DomainError("y too close to zero to invert")
        # stay just clear of an atom pinned at the edge
        lo = mu.right_edge + 2.001e-12
        if _g_real(mu, lo) <= y:
            # y sits between G(lo) and the edge limit: the inverse is within
            # rounding distance of the edge itself
            return lo
        root = float(brentq(lambda s: _g_real(mu, s) - y, lo, hi, xtol=1e-13, rtol=8.9e-16))
        # Newton polish against the exact derivative tightens the residual
        for _ in range(3):
            slope = -mu.inv_square_moment(root)
            if slope == 0:
                break
            step = (float(mu._g(root)) - y) / slope
            cand = root - step
            if cand <= mu.right_edge:
                break
            root = cand
            if abs(step) < 1e-15 * max(1.0, abs(root)):
                break
        return root
    refl = mu.reflected()
    return -inverse_stieltjes(refl, -y)


def r_transform(mu: Measure, y: float) -> float:
    """Voiculescu R-transform, R(y) = K(y) - 1/y."""
    return inverse_stieltjes(mu, y) - 1.0 / float(y)


def quantile_discretize(mu: Measure, n: int, top_override: float | None = None) -> np.ndarray:
    """The 1/n quantiles of the measure, optionally with the top value replaced.

    Returns the nondecreasing vector ``inf{x : F(x) >= j/n}`` for
    ``j = 1..n``.  When ``top_override`` is given it replaces the last entry,
    modelling a sequence whose top point is pinned at a prescribed location.
    """
    if n < 1:
        raise DomainError("n must be at least 1")
    if top_override is not None and top_override < mu.right_edge - 1e-12:
        raise DomainError("top_override must be at least the right edge")
    qs = np.array([mu.quantile(j / n) for j in range(1, n + 1)])
    if top_override is not None:
        qs[-1] = float(top_override)
    return qs


def _grid_masses(mu: Measure, edges: np.ndarray) -> np.ndarray:
    cdf_vals = np.asarray(mu.cdf(edges))
    return np.diff(np.concatenate([[0.0], cdf_vals]))


def dudley_distance(mu: Measure, nu: Measure, grid_step: float | None = None) -> float:
    """Bounded-Lipschitz distance via a grid linear program.

    Both measures are binned to a common grid of the requested step; the LP
    maximizes ``sum f_i (mu_i - nu_i)`` over grid functions subject to
    ``|f_i| <= C``, ``|f_{i+1} - f_i| <= L * step`` and ``C + L <= 1``.  The
    value converges to the true distance as the step shrinks.
    """
    lo = min(mu.left_edge, nu.left_edge)
    hi = max(mu.right_edge, nu.right_edge)
    span = max(hi - lo, 1e-9)
    step = span / 2000.0 if grid_step is None else float(grid_step)
    if step <= 0:
        raise DomainError("grid_step must be positive")
    n_bins = int(np.ceil(span / step)) + 1
    edges = lo - step / 2.0 + step * np.arange(n_bins + 1)
    w = _grid_masses(mu, edges) - _grid_masses(nu, edges)
    n = w.size

    # variables: f_0..f_{n-1}, C, L
    rows, cols, data = [], [], []
    rhs = []
    r = 0
    for i in range(n):  # f_i - C <= 0 and -f_i - C <= 0
        rows += [r, r, r + 1, r + 1]
        cols += [i, n, i, n]
        data += [1.0, -1.0, -1.0, -1.0]
        rhs += [0.0, 0.0]
        r += 2
    for i in range(n - 1):  # |f_{i+1} - f_i| <= L * step
        rows += [r, r, r, r + 1, r + 1, r + 1]
        cols += [i + 1, i, n + 1, i + 1, i, n + 1]
        data += [1.0, -1.0, -step, -1.0, 1.0, -step]
        rhs += [0.0, 0.0]
        r += 2
    rows += [r, r]
    cols += [n, n + 1]
    data += [1.0, 1.0]
    rhs += [1.0]
    r += 1

    a_ub = sparse.coo_matrix((data, (rows, cols)), shape=(r, n + 2)).tocsr()
    c = np.concatenate([-w, [0.0, 0.0]])
    bounds = [(None, None)] * n + [(0.0, 1.0), (0.0, None)]
    res = linprog(c, A_ub=a_ub, b_ub=np.asarray(rhs), bounds=bounds, method="highs")
    if not res.success:
        raise RuntimeError(f"distance LP failed: {res.message}")
    return float(-res.fun)


def levy_distance(mu: Measure, nu: Measure) -> float:
    """Levy distance, computed by bisection on the band width epsilon."""
    brk = np.unique(np.concatenate([
        mu._breakpoints(), nu._breakpoints(),
        np.linspace(min(mu.left_edge, nu.left_edge) - 1.0,
                    max(mu.right_edge, nu.right_edge) + 1.0, 513),
    ]))
    probe = np.unique(np.concatenate([brk, brk - 1e-9, brk + 1e-9]))

    def fits(eps: float) -> bool:
        f_nu = np.asarray(nu.cdf(probe))
        lo_band = np.asarray(mu.cdf(probe - eps)) - eps
        hi_band = np.asarray(mu.cdf(probe + eps)) + eps
        return bool(np.all(lo_band <= f_nu + 1e-12) and np.all(f_nu <= hi_band + 1e-12))

    lo, hi = 0.0, 1.0
    if fits(0.0):
        return 0.0
    for _ in range(40):
        mid = 0.5 * (lo + hi)
        if fits(mid):
            hi = mid
        else:
            lo = mid
    return hi


def log_potential(mu: Measure, x: float) -> float:
    """Integral of log(x - y) against the measure for x at or above the edge."""
    x = float(x)
    if x < mu.right_edge - 1e-12:
        raise DomainError(f"log potential needs x >= right edge {mu.right_edge}")
    return mu.log_integral(max(x, mu.right_edge))
