"""Large-deviation rate functions for the largest eigenvalue.

The rate function is the Legendre-type supremum over the tilt parameter
``theta`` of

    J(fc, theta, x) - theta^2 / beta - J(mu_D, theta, r(mu_D)),

where ``J`` is the limit of normalized rank-one spherical integrals and
``fc`` is the free convolution of the semicircle law with the deformation
``mu_D``.  The supremum is attained at a unique tilt; below the critical
point ``x_crit`` it solves a subordination equation, at or above it the
maximizer is affine in ``x`` and the value has a closed form.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from scipy.optimize import brentq

from .errors import ConsistencyError, DivergenceError, DomainError
from .freeconv import FreeConvolution, free_convolution
from .measures import Measure, inverse_stieltjes

__all__ = [
    "RateContext",
    "RatePoint",
    "RateProfile",
    "thresholds",
    "spherical_limit",
    "optimal_tilt",
    "rate",
    "tilt_derivative",
    "rate_profile",
    "make_context",
]

_EDGE_ATOL = 1e-11


@dataclass(frozen=True)
class RateContext:
    """Everything needed to evaluate the rate function for one deformation."""

    deformation: Measure
    fc: FreeConvolution
    beta: int
    g_deformation_edge: float  # transform limit of mu_D at its right edge
    theta_crit: float          # tilt threshold, possibly inf
    x_crit: float              # location threshold, possibly inf


@dataclass(frozen=True)
class RatePoint:
    x: float
    theta: float
    value_beta1: float
    value_beta2: float
    branch: str  # below-edge | at-edge | subcritical | supercritical


@dataclass(frozen=True)
class RateProfile:
    rows: list


def thresholds(mu_d: Measure, fc: FreeConvolution, beta: int = 1) -> RateContext:
    """Critical tilt and location thresholds for a deformation measure."""
    if beta not in (1, 2):
        raise DomainError("beta must be 1 or 2")
    g_edge = mu_d.g_at_right_edge()
    theta_crit = 0.5 * beta * g_edge if np.isfinite(g_edge) else math.inf
    x_crit = mu_d.right_edge + g_edge if np.isfinite(g_edge) else math.inf
    if np.isfinite(x_crit) and x_crit < fc.right_edge - 1e-9:
        raise ConsistencyError(
            f"x_crit {x_crit} fell below the free-convolution edge {fc.right_edge}")
    return RateContext(deformation=mu_d, fc=fc, beta=beta,
                       g_deformation_edge=g_edge, theta_crit=theta_crit, x_crit=x_crit)


def make_context(mu_d: Measure, beta: int = 1, **fc_kwargs) -> RateContext:
    """Convenience constructor: compute the free convolution, then thresholds."""
    return thresholds(mu_d, free_convolution(mu_d, **fc_kwargs), beta=beta)


def spherical_limit(nu: Measure, theta: float, top: float, beta: int = 1) -> float:
    """Limit of normalized rank-one spherical integrals.

    ``top`` is the limit of the largest eigenvalue of the matrix sequence,
    which must be at least the right edge of the limiting spectral measure
    ``nu``.  The two analytic branches meet continuously where
    ``2 theta / beta`` equals the transform value at ``top``.
    """
    theta = float(theta)
    top = float(top)
    if theta < 0:
        raise DomainError("theta must be nonnegative")
    if top < nu.right_edge - 1e-12:
        raise DomainError(f"top {top} is below the right edge of the measure")
    if theta == 0.0:
        return 0.0
    u = 2.0 * theta / beta
    g_top = nu.g_at_right_edge() if top <= nu.right_edge else float(nu._g(top))
    if u <= g_top:
        k = inverse_stieltjes(nu, u)
        r_val = k - 1.0 / u
        return theta * r_val - 0.5 * beta * (math.log(u) + nu.log_integral(k))
    try:
        log_pot = nu.log_integral(max(top, nu.right_edge))
    except DivergenceError as exc:
        raise DivergenceError(
            f"spherical limit diverges: log potential at top={top} is infinite") from exc
    return theta * top - 0.5 * beta * (1.0 + math.log(u)) - 0.5 * beta * log_pot


def _subcritical_u(ctx: RateContext, x: float) -> float:
    """Solve s + G_muD(s) = x on the decreasing branch below the subordination point.

    Returns ``u = G_muD(s)``, the scaled tilt ``2 theta_x / beta``.  The map
    ``s + G(s)`` decreases from ``x_crit`` to the edge as ``s`` runs from the
    deformation edge up to the subordination point, so the bracket is
    ``(r(mu_D), w*)``.
    """
    mu_d = ctx.deformation
    w_star = ctx.fc.subordination_point
    r = mu_d.right_edge

    def h(s):
        return s + float(mu_d._g(s)) - x

    gap = 0.5 * (w_star - r)
    lo = r + gap
    for _ in range(200):
        try:
            if h(lo) > 0:
                break
        except Exception:
            pass
        gap *= 0.5
        lo = r + gap
        if gap < 1e-300:
            raise ConsistencyError("failed to bracket the subcritical tilt equation")
    s_root = brentq(h, lo, w_star, xtol=1e-14, rtol=8.9e-16)
    return float(mu_d._g(s_root))


def optimal_tilt(ctx: RateContext, x: float) -> float:
    """The unique maximizing tilt theta_x for x at or above the edge.

    At the edge the stated convention is ``(beta/2) G_fc(edge)``; between the
    edge and ``x_crit`` the tilt solves the subordination equation; at or
    above ``x_crit`` it equals ``(beta/2)(x - r(mu_D))``.
    """
    x = float(x)
    edge = ctx.fc.right_edge
    if x < edge - _EDGE_ATOL * max(1.0, abs(edge)):
        raise DomainError(f"x={x} lies below the right edge {edge}")
    half_beta = 0.5 * ctx.beta
    if x <= edge + _EDGE_ATOL * max(1.0, abs(edge)):
        return half_beta * ctx.fc.edge_stieltjes
    if x >= ctx.x_crit:
        return half_beta * (x - ctx.deformation.right_edge)
    return half_beta * _subcritical_u(ctx, x)


def rate(ctx: RateContext, x: float) -> RatePoint:
    """Rate-function value at ``x`` for both symmetry classes.

    Below the edge the value is infinite.  The two finite branches share the
    scaled tilt, so the beta = 2 value is exactly twice the beta = 1 value.
    """
    x = float(x)
    edge = ctx.fc.right_edge
    tol = _EDGE_ATOL * max(1.0, abs(edge))
    if x < edge - tol:
        return RatePoint(x=x, theta=math.nan, value_beta1=math.inf,
                         value_beta2=math.inf, branch="below-edge")
    if x <= edge + tol:
        return RatePoint(x=x, theta=0.5 * ctx.beta * ctx.fc.edge_stieltjes,
                         value_beta1=0.0, value_beta2=0.0, branch="at-edge")
    mu_d = ctx.deformation
    if x >= ctx.x_crit:
        r = mu_d.right_edge
        try:
            edge_log = mu_d.log_integral(r)
        except DivergenceError as exc:
            raise ConsistencyError(
                "divergent deformation log potential with finite x_crit") from exc
        v1 = 0.5 * (0.5 * (x - r) ** 2 - ctx.fc.log_potential(x) + edge_log)
        u = x - r
        branch = "supercritical"
    else:
        u = _subcritical_u(ctx, x)
        v1 = 0.25 * u * u + 0.5 * mu_d.log_integral(x - u) - 0.5 * ctx.fc.log_potential(x)
        branch = "subcritical"
    v1 = float(v1)
    return RatePoint(x=x, theta=0.5 * ctx.beta * u, value_beta1=v1,
                     value_beta2=2.0 * v1, branch=branch)


def tilt_derivative(ctx: RateContext, x: float, theta: float) -> float:
    """Derivative in theta of the tilted objective, in its three phases.

    Vanishes identically while ``2 theta / beta`` is below the transform of
    the free convolution at ``x``; in the middle phase it is
    ``x - u - K_muD(u)`` with ``u = 2 theta / beta``; beyond the deformation
    edge transform it is ``x - u - r(mu_D)``.
    """
    x = float(x)
    theta = float(theta)
    edge = ctx.fc.right_edge
    if theta < 0:
        raise DomainError("theta must be nonnegative")
    if x < edge - _EDGE_ATOL * max(1.0, abs(edge)):
        raise DomainError(f"x={x} lies below the right edge {edge}")
    if theta == 0.0:
        return 0.0
    u = 2.0 * theta / ctx.beta
    if x <= edge + _EDGE_ATOL * max(1.0, abs(edge)):
        g_fc_x = ctx.fc.edge_stieltjes
    else:
        g_fc_x = float(np.real(ctx.fc.stieltjes(x)))
    if u <= g_fc_x:
        return 0.0
    if u >= ctx.g_deformation_edge:
        return x - u - ctx.deformation.right_edge
    return x - u - inverse_stieltjes(ctx.deformation, u)


def rate_profile(ctx: RateContext, x_lo: float, x_hi: float, n: int) -> RateProfile:
    """Tabulate the rate function over a uniform grid."""
    if n < 2:
        raise DomainError("profile needs at least two points")
    xs = np.linspace(float(x_lo), float(x_hi), int(n))
    return RateProfile(rows=[rate(ctx, x) for x in xs])
