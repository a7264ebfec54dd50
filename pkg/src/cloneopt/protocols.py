"""Unambiguous discrimination and the protocols that compare it with cloning.

``cloning_by_discrimination`` runs optimal UD on the inputs and prepares clones
of the identified state.  ``discrimination_by_cloning`` runs the optimal cloner
and then UD on its clones; for general priors the second stage uses the
Bayes-updated priors of the successful clones, which is a construction of this
package.
"""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass
from typing import Sequence

import numpy as np

from .curve_core import CloningProblem
from .errors import DomainError, NumericError
from .optimal_cloner import PriorWeights, as_priors, solve


class UDRegime(str, enum.Enum):
    GENERALIZED_3_OUTCOME = "Generalized3Outcome"
    PROJECTIVE_2_OUTCOME = "Projective2Outcome"


@dataclass(frozen=True)
class UDSolution:
    q_ud: float
    regime: UDRegime


@dataclass(frozen=True)
class CompositeResult:
    """Two-stage protocol: first-stage failure, second-stage failure, total."""

    q_cloning: float
    q_second: float
    total: float


@dataclass(frozen=True)
class TransitionScan:
    s: float
    m: int
    n_values: tuple[int, ...]
    eta_star: float
    peak_d2: tuple[float, ...]
    jump_limit: float
    d2_projective: float
    d2_generalized: float


def critical_prior(s: float, copies: int) -> float:
    """Prior below which optimal UD degenerates to a projective measurement."""
    s2 = s ** (2 * copies)
    return s2 / (1.0 + s2)


def ud_failure(s_eff: float, copies: int, priors: PriorWeights | float) -> UDSolution:
    """Optimal unambiguous-discrimination failure for ``copies`` of each state."""
    if not 0.0 <= s_eff < 1.0:
        raise DomainError(f"overlap must satisfy 0 <= s < 1, got {s_eff!r}")
    if copies < 1:
        raise DomainError(f"copies must be positive, got {copies!r}")
    priors = as_priors(priors)
    eta1, eta2 = sorted((priors.eta1, priors.eta2))
    sm = s_eff**copies
    if eta1 >= critical_prior(s_eff, copies):
        return UDSolution(2.0 * math.sqrt(eta1 * eta2) * sm, UDRegime.GENERALIZED_3_OUTCOME)
    return UDSolution(eta1 + sm * sm * eta2, UDRegime.PROJECTIVE_2_OUTCOME)


def cloning_by_discrimination(
    problem: CloningProblem, priors: PriorWeights | float
) -> CompositeResult:
    """Identify the input by UD, then prepare ``n`` clones deterministically."""
    q = ud_failure(problem.s, problem.m, priors).q_ud
    return CompositeResult(q_cloning=q, q_second=0.0, total=q)


def discrimination_by_cloning(
    problem: CloningProblem, priors: PriorWeights | float
) -> CompositeResult:
    """Clone optimally, then discriminate the ``n`` clones unambiguously."""
    priors = as_priors(priors)
    sol = solve(problem, priors)
    success = priors.eta1 * sol.p1 + priors.eta2 * sol.p2
    if success <= 0.0:
        raise NumericError("the cloner never succeeds; posterior priors undefined")
    q_c = priors.eta1 * sol.q1 + priors.eta2 * sol.q2
    post1 = 0.0 if priors.eta1 == 0.0 or sol.p1 == 0.0 else priors.eta1 * sol.p1 / success
    post1 = min(post1, 1.0)
    # n clones with pairwise overlap s**n count as one copy of overlap s**n
    q_second = ud_failure(problem.sn, 1, PriorWeights(post1, 1.0 - post1)).q_ud
    return CompositeResult(q_cloning=q_c, q_second=q_second, total=q_c + success * q_second)


def convergence_gap(problem: CloningProblem, priors: PriorWeights | float) -> float:
    """How far optimal cloning still beats cloning by discrimination."""
    return ud_failure(problem.s, problem.m, priors).q_ud - solve(problem, priors).q_min


def one_sided_second_difference(f, x: float, h: float) -> float:
    """Second-order accurate second derivative from ``x, x+h, x+2h, x+3h``.

    A negative ``h`` samples to the left.
    """
    return (2.0 * f(x) - 5.0 * f(x + h) + 4.0 * f(x + 2 * h) - f(x + 3 * h)) / (h * h)


def ud_curvature_limits(s: float, m: int) -> tuple[float, float]:
    """Analytic second derivatives of ``q_ud(eta1)`` on either side of ``eta*``.

    Returns ``(projective side, generalized side)``.
    """
    s2m = s ** (2 * m)
    return 0.0, -((1.0 + s2m) ** 3) / (2.0 * s2m)


def ud_curvature_fd(
    s: float, m: int, fd_step: float = 1e-4, *, richardson: bool = False
) -> tuple[float, float]:
    """One-sided finite-difference second derivatives of ``q_ud`` at ``eta*``.

    Returns ``(projective side, generalized side)``.  With ``richardson``
    the steps ``h`` and ``h/2`` are combined to cancel the ``h**2`` error.
    """
    eta_star = critical_prior(s, m)
    if fd_step <= 0.0 or eta_star - 3.0 * fd_step <= 0.0 or eta_star + 3.0 * fd_step > 0.5:
        raise DomainError(f"fd_step={fd_step!r} does not fit around eta*={eta_star!r}")

    def q_ud(e: float) -> float:
        return ud_failure(s, m, e).q_ud

    def side(h: float) -> float:
        coarse = one_sided_second_difference(q_ud, eta_star, h)
        if not richardson:
            return coarse
        fine = one_sided_second_difference(q_ud, eta_star, 0.5 * h)
        return (4.0 * fine - coarse) / 3.0

    return side(-fd_step), side(fd_step)


def transition_scan(
    s: float,
    m: int,
    n_values: Sequence[int],
    fd_step: float = 1e-4,
    half_width: int = 10,
) -> TransitionScan:
    """Peak curvature of ``q_min(eta1)`` near ``eta*`` for each ``n``.

    Centered second differences are taken on ``eta* + k*fd_step`` for
    ``|k| < half_width``; the ``n -> inf`` limit ``q_ud`` has a jump of
    ``jump_limit`` in its second derivative at ``eta*``.
    """
    if not 0.0 < s < 1.0:
        raise DomainError("the transition needs 0 < s < 1")
    eta_star = critical_prior(s, m)
    if fd_step <= 0.0 or eta_star - half_width * fd_step <= 0.0 or eta_star + half_width * fd_step >= 0.5:
        raise DomainError(
            f"fd_step={fd_step!r} too large: eta* +- {half_width}*fd_step must lie in (0, 1/2)"
        )
    grid = eta_star + fd_step * np.arange(-half_width, half_width + 1)
    peaks = []
    for n in n_values:
        problem = CloningProblem(s, m, n)
        q = np.array([solve(problem, float(e)).q_min for e in grid])
        d2 = (q[2:] - 2.0 * q[1:-1] + q[:-2]) / fd_step**2
        peaks.append(float(np.max(np.abs(d2))))
    left, right = ud_curvature_limits(s, m)
    d2_proj, d2_gen = ud_curvature_fd(s, m, fd_step)
    return TransitionScan(
        s=s,
        m=m,
        n_values=tuple(int(n) for n in n_values),
        eta_star=eta_star,
        peak_d2=tuple(peaks),
        jump_limit=abs(right - left),
        d2_projective=d2_proj,
        d2_generalized=d2_gen,
    )
