"""Unitarity curve of the two-state probabilistic cloner and its geometry.

A cloner that turns ``m`` copies of one of two pure states with overlap ``s``
into ``n`` perfect clones fails with probabilities ``(q1, q2)``.  Unitarity
restricts these to the region

    sqrt((1 - q1)(1 - q2)) * s**n * alpha + sqrt(q1 * q2) - s**m >= 0

where ``alpha`` is the overlap of the two success flags.  For ``alpha = 1``
the boundary becomes a straight segment in the variables
``x = cos(theta1 + theta2)``, ``y = cos(theta1 - theta2)`` with
``sqrt(q_i) = sin(theta_i)``; this module works internally with the
well-conditioned coordinate ``tau = sqrt(p1 * p2) = (1 - t) / s**(n - m)``
along that segment, and exposes the segment parameter ``t``.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .errors import DomainError, NumericError, SingularityError

# values of 1 - v**2 inside [-_CLAMP, 0] are rounding noise at the segment ends
_CLAMP = 1e-14


@dataclass(frozen=True)
class CloningProblem:
    """Cloning instance: overlap ``s`` of the two states, ``m`` inputs, ``n`` clones."""

    s: float
    m: int
    n: int

    def __post_init__(self) -> None:
        s = float(self.s)
        if not math.isfinite(s) or not 0.0 <= s < 1.0:
            raise DomainError(f"overlap s must satisfy 0 <= s < 1, got {self.s!r}")
        for name in ("m", "n"):
            value = getattr(self, name)
            if isinstance(value, bool) or int(value) != value:
                raise DomainError(f"{name} must be an integer, got {value!r}")
        m, n = int(self.m), int(self.n)
        if not 1 <= m < n:
            raise DomainError(f"need 1 <= m < n, got m={m}, n={n}")
        object.__setattr__(self, "s", s)
        object.__setattr__(self, "m", m)
        object.__setattr__(self, "n", n)

    @property
    def sm(self) -> float:
        return self.s**self.m

    @property
    def sn(self) -> float:
        return self.s**self.n

    @property
    def s2m(self) -> float:
        return self.s ** (2 * self.m)

    @property
    def s_nm(self) -> float:
        # s**(n - m), the scale of the segment parameter
        return self.s ** (self.n - self.m)


@dataclass(frozen=True)
class FlagOverlap:
    """Overlap ``<alpha_1|alpha_2>`` of the two success flags."""

    alpha: float

    def __post_init__(self) -> None:
        a = float(self.alpha)
        if not 0.0 <= a <= 1.0:
            raise DomainError(f"flag overlap must lie in [0, 1], got {self.alpha!r}")
        object.__setattr__(self, "alpha", a)

    def __float__(self) -> float:
        return self.alpha


def as_alpha(alpha: float | FlagOverlap) -> float:
    if isinstance(alpha, FlagOverlap):
        return alpha.alpha
    return FlagOverlap(alpha).alpha


@dataclass(frozen=True)
class CurvePoint:
    """Point on the lower half (``q1 >= q2``) of the ``alpha = 1`` curve.

    ``p1`` and ``p2`` are the matching success probabilities, computed
    without the cancellation in ``1 - q_i``.
    """

    t: float
    x: float
    y: float
    q1: float
    q2: float
    p1: float
    p2: float

    def mirrored(self) -> tuple[float, float]:
        """Return the failure pair of the mirror point on the upper half."""
        return self.q2, self.q1


def _check_probability(name: str, value) -> None:
    arr = np.asarray(value, dtype=float)
    if np.any(~np.isfinite(arr)) or np.any(arr < 0.0) or np.any(arr > 1.0):
        raise DomainError(f"{name} must lie in [0, 1], got {value!r}")


def _residual(problem: CloningProblem, alpha: float, q1, q2):
    p1 = np.clip(1.0 - np.asarray(q1, dtype=float), 0.0, None)
    p2 = np.clip(1.0 - np.asarray(q2, dtype=float), 0.0, None)
    return np.sqrt(p1 * p2) * problem.sn * alpha + np.sqrt(q1 * q2) - problem.sm


def constraint_residual(
    problem: CloningProblem, alpha: float | FlagOverlap, q1, q2
) -> float | np.ndarray:
    """Unitarity residual; zero exactly on the curve for this flag overlap.

    Accepts scalars or broadcastable arrays for ``q1`` and ``q2``.
    """
    a = as_alpha(alpha)
    _check_probability("q1", q1)
    _check_probability("q2", q2)
    r = _residual(problem, a, np.asarray(q1, dtype=float), np.asarray(q2, dtype=float))
    return float(r) if np.ndim(r) == 0 else r


def s_alpha_contains(problem: CloningProblem, alpha: float | FlagOverlap, q1, q2):
    """Membership of ``(q1, q2)`` in the feasible set for flag overlap ``alpha``."""
    r = constraint_residual(problem, alpha, q1, q2)
    return bool(r >= 0.0) if np.ndim(r) == 0 else r >= 0.0


def t_bounds(problem: CloningProblem) -> tuple[float, float]:
    """Parameters where the lower half has slope -1 and slope 0."""
    s, m, n = problem.s, problem.m, problem.n
    t_minus1 = (1.0 - s ** (n - m)) / (1.0 - s**n)
    t_0 = (1.0 - s ** (2 * (n - m))) / (1.0 - s ** (2 * n))
    return t_minus1, t_0


def tau_bounds(problem: CloningProblem) -> tuple[float, float]:
    """``tau`` at slope 0 and at slope -1 (``tau`` decreases as ``t`` grows)."""
    s, m, n = problem.s, problem.m, problem.n
    tau_0 = s ** (n - m) * (1.0 - s ** (2 * m)) / (1.0 - s ** (2 * n))
    tau_minus1 = (1.0 - s**m) / (1.0 - s**n)
    return tau_0, tau_minus1


def _one_minus_sq(v: float) -> float:
    w = (1.0 - v) * (1.0 + v)
    if w < 0.0:
        if w < -_CLAMP:
            raise NumericError(f"|{v!r}| exceeds 1 beyond rounding")
        return 0.0
    return w


def _degenerate_point() -> CurvePoint:
    # s = 0: orthogonal states are cloned without failure
    return CurvePoint(t=1.0, x=1.0, y=1.0, q1=0.0, q2=0.0, p1=1.0, p2=1.0)


def point_from_tau(problem: CloningProblem, tau: float) -> CurvePoint:
    """Lower-half point at segment coordinate ``tau`` in ``[0, tau_minus1]``.

    ``tau = 0`` is the endpoint ``(1, s**2m)``; ``tau_minus1`` is the
    symmetric point ``q1 = q2``.
    """
    if problem.s == 0.0:
        return _degenerate_point()
    sm, sn = problem.sm, problem.sn
    x = (1.0 + sn) * tau - sm
    y = (1.0 - sn) * tau + sm
    t = 1.0 - problem.s_nm * tau
    xy = x * y
    root = math.sqrt(_one_minus_sq(x) * _one_minus_sq(y))
    q1 = 0.5 * (1.0 - xy + root)
    p2 = 0.5 * (1.0 + xy + root)
    # sqrt(q1 q2) = s**m t and sqrt(p1 p2) = tau hold exactly on the segment
    q2 = (sm * t) ** 2 / q1
    p1 = tau**2 / p2
    return CurvePoint(t=t, x=x, y=y, q1=q1, q2=q2, p1=p1, p2=p2)


def tau_of_t(problem: CloningProblem, t: float) -> float:
    return (1.0 - t) / problem.s_nm


def _check_t(problem: CloningProblem, t: float, upper: float) -> None:
    lo, _ = t_bounds(problem)
    slack = 4.0 * np.finfo(float).eps
    if not (lo - slack <= t <= upper + slack):
        raise DomainError(f"t={t!r} outside [{lo!r}, {upper!r}]")


def point_at(problem: CloningProblem, t: float, *, full_branch: bool = False) -> CurvePoint:
    """Lower-half curve point at segment parameter ``t``.

    By default ``t`` must lie in ``[t_minus1, t_0]``, the stretch where the
    slope runs from -1 to 0.  ``full_branch=True`` extends the range to
    ``t = 1``, the endpoint ``(1, s**2m)``.
    """
    t = float(t)
    if problem.s == 0.0:
        if t != 1.0:
            raise DomainError("for s = 0 the curve parameter is pinned at t = 1")
        return _degenerate_point()
    _check_t(problem, t, 1.0 if full_branch else t_bounds(problem)[1])
    tau_0, tau_minus1 = tau_bounds(problem)
    tau = min(max(tau_of_t(problem, t), 0.0 if full_branch else tau_0), tau_minus1)
    return point_from_tau(problem, tau)


def derivatives_at(problem: CloningProblem, t: float) -> tuple[float, float]:
    """``(dq1/dt, dq2/dt)`` on the lower half, for ``t`` in ``(t_minus1, t_0]``."""
    t = float(t)
    if problem.s == 0.0:
        raise DomainError("the curve parameter range is empty for s = 0")
    t_minus1, t_0 = t_bounds(problem)
    _check_t(problem, t, t_0)
    if t <= t_minus1:
        raise SingularityError("dq/dt diverges at t_minus1; use prior_of_t for the ratio")
    tau_0, _ = tau_bounds(problem)
    return derivatives_at_tau(problem, max(tau_of_t(problem, t), tau_0))


def derivatives_at_tau(problem: CloningProblem, tau: float) -> tuple[float, float]:
    """:func:`derivatives_at` addressed by ``tau`` instead of ``t``.

    Near ``t ~ 1`` a float ``t`` resolves the curve only to ``ulp(t) / s**(n-m)``;
    ``tau`` keeps full relative precision.
    """
    pt = point_from_tau(problem, tau)
    sn = problem.sn
    inv_x = 1.0 / math.sqrt(_one_minus_sq(pt.x))
    omy = _one_minus_sq(pt.y)
    if omy == 0.0:
        raise SingularityError(f"y rounds to 1 at tau={tau!r}")
    inv_y = 1.0 / math.sqrt(omy)
    scale = problem.s_nm
    dq1 = math.sqrt(pt.q1 * pt.p1) / scale * ((1.0 + sn) * inv_x + (1.0 - sn) * inv_y)
    dq2 = math.sqrt(pt.q2 * pt.p2) / scale * ((1.0 + sn) * inv_x - (1.0 - sn) * inv_y)
    return dq1, dq2


def q2_on_curve(
    problem: CloningProblem,
    alpha: float | FlagOverlap,
    q1: float,
    *,
    tol: float = 1e-12,
    max_iter: int = 200,
) -> float:
    """Lower boundary ``q2`` of the feasible set above ``q1``.

    For ``q1`` in ``[s**2m, 1]`` the residual is concave in ``q2``, negative
    at ``q2 = 0`` and nonnegative at ``q2 = 1``, so there is a single sign
    change and bisection over ``[0, 1]`` brackets it.
    """
    a = as_alpha(alpha)
    q1 = float(q1)
    s2m = problem.s2m
    if not s2m <= q1 <= 1.0:
        raise DomainError(f"q1={q1!r} outside the feasible band [{s2m!r}, 1]")
    if q1 == 1.0 or problem.s == 0.0 and q1 > 0.0:
        return s2m
    if q1 == s2m:
        return 1.0
    if a == 0.0:
        return s2m / q1

    lo, hi = 0.0, 1.0
    f_lo = float(_residual(problem, a, q1, lo))
    f_hi = float(_residual(problem, a, q1, hi))
    if f_lo > 0.0 or f_hi < 0.0:
        raise NumericError(
            f"no sign change on [{lo}, {hi}]: residuals {f_lo!r}, {f_hi!r}"
        )
    for _ in range(max_iter):
        mid = 0.5 * (lo + hi)
        if _residual(problem, a, q1, mid) >= 0.0:
            hi = mid
        else:
            lo = mid
        if hi - lo <= tol:
            return 0.5 * (lo + hi)
    raise NumericError(f"bisection stalled with bracket [{lo!r}, {hi!r}]")


def _ray_direction(angle):
    # cos(pi/2) is 6e-17 in floating point; a q1 one ulp below 1 puts a 1e-8 term
    # into the constraint, so the end rays are made exactly axis-aligned
    half_pi = 0.5 * np.pi
    c = np.where(angle == half_pi, 0.0, np.cos(angle))
    sn_ = np.where(angle == 0.0, 0.0, np.sin(angle))
    if np.ndim(angle) == 0:
        return float(c), float(sn_)
    return c, sn_


def ray_boundary_point(
    problem: CloningProblem, alpha: float, angle: float, *, tol: float = 1e-13
) -> tuple[float, float]:
    """Scalar form of :func:`boundary_along_ray`."""
    c, sn_ = _ray_direction(angle)
    sm, wn = problem.sm, problem.sn * alpha
    lo, hi = 0.0, 1.0 / max(c, sn_)
    while hi - lo > tol:
        mid = 0.5 * (lo + hi)
        q1 = min(max(1.0 - mid * c, 0.0), 1.0)
        q2 = min(max(1.0 - mid * sn_, 0.0), 1.0)
        if math.sqrt((1.0 - q1) * (1.0 - q2)) * wn + math.sqrt(q1 * q2) - sm >= 0.0:
            lo = mid
        else:
            hi = mid
    r = 0.5 * (lo + hi)
    return min(max(1.0 - r * c, 0.0), 1.0), min(max(1.0 - r * sn_, 0.0), 1.0)


def boundary_along_ray(
    problem: CloningProblem,
    alpha: float | FlagOverlap,
    angle,
    *,
    tol: float = 1e-13,
    max_iter: int = 200,
) -> tuple[np.ndarray, np.ndarray]:
    """Boundary points met by rays leaving the vertex ``(1, 1)``.

    The ray at ``angle`` in ``[0, pi/2]`` runs along ``-(cos, sin)``.  Angle
    0 lands on ``(s**2m, 1)`` and ``pi/2`` on ``(1, s**2m)``, so the sweep
    covers both halves of the curve.  Vectorized over ``angle``.
    """
    a = as_alpha(alpha)
    phi = np.atleast_1d(np.asarray(angle, dtype=float))
    if np.any(phi < 0.0) or np.any(phi > 0.5 * np.pi):
        raise DomainError("ray angles must lie in [0, pi/2]")
    c, sn_ = _ray_direction(phi)
    # the ray leaves the unit square on q1 = 0 or q2 = 0, where the residual is < 0
    lo = np.zeros_like(phi)
    hi = 1.0 / np.maximum(c, sn_)
    for _ in range(max_iter):
        mid = 0.5 * (lo + hi)
        q1 = np.clip(1.0 - mid * c, 0.0, 1.0)
        q2 = np.clip(1.0 - mid * sn_, 0.0, 1.0)
        inside = _residual(problem, a, q1, q2) >= 0.0
        lo = np.where(inside, mid, lo)
        hi = np.where(inside, hi, mid)
        if np.max(hi - lo) <= tol:
            break
    else:
        raise NumericError("ray bisection did not reach tolerance")
    r = 0.5 * (lo + hi)
    return np.clip(1.0 - r * c, 0.0, 1.0), np.clip(1.0 - r * sn_, 0.0, 1.0)
