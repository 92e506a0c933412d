"""Matrix Dyson Equation solver for diagonal deformations.

For a diagonal deformation both self-energy operators map diagonal matrices
to diagonal matrices, so the solver iterates N scalars

    m_i <- -1 / (z - d_i + s + extra_i),    s = (1/N) sum_j m_j,

with ``extra_i = m_i / N`` for the full self-energy and ``0`` for the
Wigner-type one.  This module follows the local-law sign convention
``Im m_i > 0``, so the normalized trace approximates minus the Stieltjes
transform of the limiting spectral measure; the sign flip to the rest of
the toolkit happens only inside :func:`wig_pastur_check`.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import DomainError, IterationError
from .freeconv import pastur_stieltjes
from .measures import Measure

__all__ = ["MDEProblem", "MDESolution", "solve_mde", "wig_pastur_check", "mde_wig_gap"]

_MAX_ITER = 10_000


@dataclass(frozen=True)
class MDEProblem:
    d: np.ndarray
    z: complex
    kind: str = "mde"  # "mde" (full self-energy) or "wig" (trace only)
    tol: float = 1e-12

    def __post_init__(self):
        object.__setattr__(self, "d", np.asarray(self.d, dtype=float))
        if self.d.ndim != 1 or self.d.size == 0:
            raise DomainError("d must be a nonempty vector")
        if complex(self.z).imag <= 0:
            raise DomainError("z must lie in the open upper half-plane")
        if self.kind not in ("mde", "wig"):
            raise DomainError("kind must be 'mde' or 'wig'")
        if self.tol <= 0:
            raise DomainError("tol must be positive")


@dataclass(frozen=True)
class MDESolution:
    m: np.ndarray
    residual: float
    iterations: int
    normalized_trace: complex


def _residual(m, d, z, full_self_energy):
    n = m.size
    s = m.mean()
    extra = m / n if full_self_energy else 0.0
    return float(np.max(np.abs(1.0 + (z - d + s + extra) * m)))


def solve_mde(p: MDEProblem) -> MDESolution:
    """Solve the constrained equation by damped fixed-point iteration.

    The iteration is damped by 1/2 and keeps the imaginary parts positive;
    the residual is ``max_i |1 + (z - d_i + s + extra_i) m_i|``.
    """
    z = complex(p.z)
    d = p.d
    n = d.size
    full = p.kind == "mde"
    m = np.full(n, -1.0 / z, dtype=complex)
    for it in range(1, _MAX_ITER + 1):
        s = m.mean()
        extra = m / n if full else 0.0
        update = -1.0 / (z - d + s + extra)
        step = 0.5
        m_new = (1.0 - step) * m + step * update
        while np.any(m_new.imag <= 0.0) and step > 1e-8:
            step *= 0.5
            m_new = (1.0 - step) * m + step * update
        delta = float(np.max(np.abs(m_new - m)))
        m = m_new
        if delta <= 0.25 * p.tol:
            res = _residual(m, d, z, full)
            if res <= p.tol:
                return MDESolution(m=m, residual=res, iterations=it,
                                   normalized_trace=complex(m.mean()))
    res = _residual(m, d, z, full)
    if res <= p.tol:
        return MDESolution(m=m, residual=res, iterations=_MAX_ITER,
                           normalized_trace=complex(m.mean()))
    raise IterationError(
        f"MDE iteration stalled after {_MAX_ITER} steps: residual {res:.3e}",
        residual=res)


def wig_pastur_check(d, z, tol: float = 1e-12) -> float:
    """Distance between the trace of the Wigner-type solution and the Pastur solver.

    Returns ``| -(1/N) tr M_wig(z) - G(z) |`` where ``G`` is the transform of
    the free convolution of the semicircle law with the empirical measure of
    ``d``.  The two quantities solve the same fixed-point equation through
    different code paths, so this is a cross-implementation consistency gap.
    """
    sol = solve_mde(MDEProblem(d=np.asarray(d, dtype=float), z=z, kind="wig", tol=tol))
    emp = Measure.from_points(np.asarray(d, dtype=float))
    g = pastur_stieltjes(emp, z, tol=tol)
    return float(abs(-sol.normalized_trace - g))


def mde_wig_gap(d, z, tol: float = 1e-12):
    """Normalized-trace gap between the two self-energy operators.

    Returns ``(gap, budget)`` with ``budget = 1 / (N eta^2)``, the norm bound
    on the perturbation through which the Wigner-type solution approximately
    solves the full equation.
    """
    d = np.asarray(d, dtype=float)
    z = complex(z)
    sol_mde = solve_mde(MDEProblem(d=d, z=z, kind="mde", tol=tol))
    sol_wig = solve_mde(MDEProblem(d=d, z=z, kind="wig", tol=tol))
    gap = float(abs(sol_mde.normalized_trace - sol_wig.normalized_trace))
    budget = 1.0 / (d.size * z.imag**2)
    return gap, budget
