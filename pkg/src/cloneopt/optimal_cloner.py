"""Minimum-failure cloner for arbitrary priors.

The optimum is the point where the cost line ``eta1*q1 + eta2*q2 = Q`` touches
the convex feasible set.  Along the lower half of the curve the tangency prior
``eta1(t)`` falls monotonically from 1/2 to 0, so a prior is inverted by
bisection and the cost is read off at the located point.

``brute_force_oracle`` checks this route by sampling the curve along rays from
the vertex ``(1, 1)``; it shares no code with the parametric path.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, replace

import numpy as np

from .curve_core import (
    CloningProblem,
    CurvePoint,
    _one_minus_sq,
    boundary_along_ray,
    ray_boundary_point,
    point_from_tau,
    tau_bounds,
    tau_of_t,
    t_bounds,
)
from .errors import DomainError, NumericError

INV_PHI = (math.sqrt(5.0) - 1.0) / 2.0


@dataclass(frozen=True)
class PriorWeights:
    """Prior probabilities of the two input states."""

    eta1: float
    eta2: float

    def __post_init__(self) -> None:
        e1, e2 = float(self.eta1), float(self.eta2)
        if not (0.0 <= e1 <= 1.0 and 0.0 <= e2 <= 1.0) or abs(e1 + e2 - 1.0) > 1e-12:
            raise DomainError(f"priors must be probabilities summing to 1, got ({e1}, {e2})")
        object.__setattr__(self, "eta1", e1)
        object.__setattr__(self, "eta2", e2)

    @classmethod
    def from_eta1(cls, eta1: float) -> PriorWeights:
        eta1 = float(eta1)
        return cls(eta1, 1.0 - eta1)

    def swapped(self) -> PriorWeights:
        return PriorWeights(self.eta2, self.eta1)


def as_priors(priors: PriorWeights | float) -> PriorWeights:
    if isinstance(priors, PriorWeights):
        return priors
    return PriorWeights.from_eta1(priors)


@dataclass(frozen=True)
class OptimalSolution:
    """Optimal operating point.

    ``tau_star`` is the segment coordinate of the tangency point (see
    :mod:`cloneopt.curve_core`); it pins the point more precisely than
    ``t_star`` when ``s**(n - m)`` is small.  ``swapped`` records that the
    labels were exchanged because ``eta1 > 1/2``.
    """

    t_star: float
    q1: float
    q2: float
    p1: float
    p2: float
    q_min: float
    swapped: bool = False
    tau_star: float = 0.0


@dataclass(frozen=True)
class EndpointFailures:
    q_0: float
    q_minus1: float


def endpoint_failures(problem: CloningProblem) -> EndpointFailures:
    """Minimum failure for ``eta1 -> 0`` and for equal priors."""
    s, m, n = problem.s, problem.m, problem.n
    q_0 = (s ** (2 * m) - s ** (2 * n)) / (1.0 - s ** (2 * n))
    q_minus1 = (s**m - s**n) / (1.0 - s**n)
    return EndpointFailures(q_0=q_0, q_minus1=q_minus1)


def _prior_at_point(problem: CloningProblem, pt: CurvePoint) -> float:
    # Both slopes are multiplied by sqrt(1 - y**2), which removes their common
    # divergence at the symmetric point; the factor cancels in the ratio.
    sn = problem.sn
    omx = _one_minus_sq(pt.x)
    a = (1.0 + sn) * math.sqrt(_one_minus_sq(pt.y) / omx)
    b = 1.0 - sn
    d1 = math.sqrt(pt.q1 * pt.p1) * (a + b)
    d2 = math.sqrt(pt.q2 * pt.p2) * (a - b)
    return d2 / (d2 - d1)


def _prior_of_tau(problem: CloningProblem, tau: float) -> float:
    tau_0, tau_minus1 = tau_bounds(problem)
    if tau >= tau_minus1:
        return 0.5
    if tau <= tau_0:
        return 0.0
    return min(max(_prior_at_point(problem, point_from_tau(problem, tau)), 0.0), 0.5)


def prior_of_t(problem: CloningProblem, t: float) -> float:
    """Prior ``eta1`` whose cost line is tangent to the curve at ``t``.

    Equals 1/2 at ``t_minus1`` and 0 at ``t_0``, strictly decreasing between.
    """
    t = float(t)
    t_minus1, t_0 = t_bounds(problem)
    slack = 4.0 * np.finfo(float).eps
    if not t_minus1 - slack <= t <= t_0 + slack:
        raise DomainError(f"t={t!r} outside [{t_minus1!r}, {t_0!r}]")
    if problem.s == 0.0 or t <= t_minus1:
        return 0.5
    if t >= t_0:
        return 0.0
    return _prior_of_tau(problem, tau_of_t(problem, t))


def _locate_tau(problem: CloningProblem, eta1: float, max_iter: int = 200) -> float:
    # eta1(tau) increases with tau; bisect down to adjacent floats
    lo, hi = tau_bounds(problem)
    for _ in range(max_iter):
        mid = 0.5 * (lo + hi)
        if not lo < mid < hi:
            return mid
        if _prior_of_tau(problem, mid) < eta1:
            lo = mid
        else:
            hi = mid
    if hi - lo > 1e-12:
        raise NumericError(f"prior inversion did not converge: [{lo!r}, {hi!r}]")
    return 0.5 * (lo + hi)


def _mirror(sol: OptimalSolution) -> OptimalSolution:
    return replace(sol, q1=sol.q2, q2=sol.q1, p1=sol.p2, p2=sol.p1, swapped=not sol.swapped)


def solve(problem: CloningProblem, priors: PriorWeights | float) -> OptimalSolution:
    """Optimal operating point and minimum average failure for ``priors``."""
    priors = as_priors(priors)
    if priors.eta1 > 0.5:
        return _mirror(solve(problem, priors.swapped()))
    eta1, eta2 = priors.eta1, priors.eta2

    if problem.s == 0.0:
        return OptimalSolution(t_star=1.0, q1=0.0, q2=0.0, p1=1.0, p2=1.0, q_min=0.0, tau_star=1.0)

    ends = endpoint_failures(problem)
    tau_0, tau_minus1 = tau_bounds(problem)
    if eta1 == 0.5:
        q = ends.q_minus1
        return OptimalSolution(
            t_star=t_bounds(problem)[0], q1=q, q2=q, p1=1.0 - q, p2=1.0 - q, q_min=q,
            tau_star=tau_minus1,
        )
    if eta1 == 0.0:
        pt = point_from_tau(problem, tau_0)
        return OptimalSolution(
            t_star=t_bounds(problem)[1], q1=pt.q1, q2=ends.q_0, p1=pt.p1,
            p2=1.0 - ends.q_0, q_min=ends.q_0, tau_star=tau_0,
        )

    tau = _locate_tau(problem, eta1)
    pt = point_from_tau(problem, tau)
    # first-order insensitive to the location error of the tangency point
    q_min = eta1 * pt.q1 + eta2 * pt.q2
    return OptimalSolution(
        t_star=pt.t, q1=pt.q1, q2=pt.q2, p1=pt.p1, p2=pt.p2, q_min=q_min, tau_star=tau
    )


def sweep(problem: CloningProblem, num_points: int) -> list[tuple[float, float]]:
    """``(eta1, q_min)`` pairs from ``t`` sampled uniformly on ``[t_minus1, t_0]``.

    Ordered by ``eta1`` ascending from 0 to 1/2.
    """
    if num_points < 2:
        raise DomainError("a sweep needs at least two points")
    if problem.s == 0.0:
        return [(float(e), 0.0) for e in np.linspace(0.0, 0.5, num_points)]
    ends = endpoint_failures(problem)
    tau_0, tau_minus1 = tau_bounds(problem)
    rows = [(0.0, ends.q_0)]
    # t is affine in tau, so a uniform tau grid is a uniform t grid
    for tau in np.linspace(tau_0, tau_minus1, num_points)[1:-1]:
        pt = point_from_tau(problem, float(tau))
        eta1 = _prior_of_tau(problem, float(tau))
        rows.append((eta1, eta1 * pt.q1 + (1.0 - eta1) * pt.q2))
    rows.append((0.5, ends.q_minus1))
    return rows


def golden_section_min(f, a: float, b: float, tol: float = 1e-12, max_iter: int = 500):
    """Minimize a unimodal ``f`` on ``[a, b]``; returns ``(x, f(x))``."""
    c = b - INV_PHI * (b - a)
    d = a + INV_PHI * (b - a)
    fc, fd = f(c), f(d)
    for _ in range(max_iter):
        if b - a <= tol:
            break
        if fc < fd:
            b, d, fd = d, c, fc
            c = b - INV_PHI * (b - a)
            fc = f(c)
        else:
            a, c, fc = c, d, fd
            d = a + INV_PHI * (b - a)
            fd = f(d)
    x = 0.5 * (a + b)
    return x, f(x)


def brute_force_oracle(
    problem: CloningProblem, priors: PriorWeights | float, grid_size: int = 2000
) -> float:
    """Minimum of ``eta1*q1 + eta2*q2`` over the curve by dense sampling.

    The curve is sampled along rays from ``(1, 1)``, which reach every
    boundary point once; the best grid cell is refined by golden section.
    """
    if grid_size < 1000:
        raise DomainError("grid_size must be at least 1000")
    priors = as_priors(priors)
    eta1, eta2 = priors.eta1, priors.eta2
    if problem.s == 0.0:
        return 0.0

    angles = np.linspace(0.0, 0.5 * np.pi, grid_size)
    q1, q2 = boundary_along_ray(problem, 1.0, angles)
    cost = eta1 * q1 + eta2 * q2
    best = int(np.argmin(cost))
    a = angles[max(best - 1, 0)]
    b = angles[min(best + 1, grid_size - 1)]

    def along(phi: float) -> float:
        u, v = ray_boundary_point(problem, 1.0, phi)
        return eta1 * u + eta2 * v

    _, value = golden_section_min(along, float(a), float(b), tol=1e-11)
    return min(value, float(cost[best]))
