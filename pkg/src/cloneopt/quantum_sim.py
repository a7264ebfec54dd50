"""Explicit state-vector realization of the probabilistic cloner.

The two single-copy states live in a qubit, ``psi1 = (1, 0)`` and
``psi2 = (s, sqrt(1 - s**2))``.  The machine acts on ``m`` input qubits, ``n - m``
blank qubits and a flag register.  Qubit registers are ordered input first, so
after the unitary the first ``n`` qubits are read as the clone register.
"""

from __future__ import annotations

import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from functools import reduce

import numpy as np

from .curve_core import CloningProblem, as_alpha, constraint_residual
from .errors import DomainError, InfeasiblePointError, NumericError
from .optimal_cloner import PriorWeights, as_priors

MAX_DIM = 4096
CHUNK_TRIALS = 1 << 18


@dataclass(frozen=True)
class PureStatePair:
    psi1: np.ndarray
    psi2: np.ndarray
    s: float

    @classmethod
    def from_overlap(cls, s: float) -> PureStatePair:
        if not 0.0 <= s <= 1.0:
            raise DomainError(f"overlap must lie in [0, 1], got {s!r}")
        psi1 = np.array([1.0, 0.0], dtype=complex)
        psi2 = np.array([s, math.sqrt(1.0 - s * s)], dtype=complex)
        return cls(psi1, psi2, float(s))


def tensor_power(state: np.ndarray, k: int) -> np.ndarray:
    """``k``-fold tensor product of ``state`` with itself."""
    if k < 1:
        raise DomainError(f"k must be positive, got {k!r}")
    state = np.asarray(state, dtype=complex)
    return reduce(np.kron, [state] * k)


def complete_basis(vectors: list[np.ndarray], dim: int) -> np.ndarray:
    """Unitary matrix whose leading columns are the given orthonormal vectors."""
    cols = np.column_stack(list(vectors) + [np.eye(dim, dtype=complex)])
    q, r = np.linalg.qr(cols)
    for k in range(len(vectors)):
        # Householder QR fixes columns only up to a phase
        d = r[k, k]
        if abs(d) > 0.0:
            q[:, k] *= d / abs(d)
    return q


@dataclass(frozen=True)
class CloningUnitary:
    """Unitary on (input qubits) x (blank qubits) x (flag)."""

    matrix: np.ndarray
    dims: tuple[int, int, int]
    flag_states: tuple[np.ndarray, np.ndarray, np.ndarray]
    failure_state: np.ndarray
    reference_state: np.ndarray
    inputs: tuple[np.ndarray, np.ndarray]
    targets: tuple[np.ndarray, np.ndarray]
    q: tuple[float, float]

    def unitarity_error(self) -> float:
        u = self.matrix
        return float(np.max(np.abs(u.conj().T @ u - np.eye(u.shape[0]))))

    def output(self, i: int) -> np.ndarray:
        """State after the unitary acts on input ``i`` (1 or 2)."""
        return self.matrix @ self.inputs[i - 1]

    def amplitudes(self, i: int) -> tuple[complex, complex]:
        """Overlaps of the output with the success and failure branches."""
        out = self.output(i)
        alpha_i = self.flag_states[i - 1]
        clones = self.targets[i - 1]
        success = np.kron(clones, alpha_i)
        failure = np.kron(self.failure_state, self.flag_states[2])
        return complex(np.vdot(success, out)), complex(np.vdot(failure, out))

    def failure_probability(self, i: int) -> float:
        out = self.output(i).reshape(-1, self.dims[2])
        amp = out @ self.flag_states[2].conj()
        return float(np.vdot(amp, amp).real)


def build_unitary(
    problem: CloningProblem,
    operating_point: tuple[float, float],
    *,
    alpha: float = 1.0,
    atol: float = 1e-9,
) -> CloningUnitary:
    """Complete the prescribed action on the two inputs to a full unitary.

    The input Gram entry ``s**m`` must equal the output one,
    ``sqrt(p1 p2) s**n alpha + sqrt(q1 q2)``; otherwise the point is rejected.
    """
    a = as_alpha(alpha)
    q1, q2 = (float(v) for v in operating_point)
    mismatch = abs(constraint_residual(problem, a, q1, q2))
    if mismatch > atol:
        raise InfeasiblePointError(
            f"(q1, q2)=({q1!r}, {q2!r}) misses the unitarity constraint by {mismatch:.3e}"
        )
    m, n = problem.m, problem.n
    flag_dim = 2 if a == 1.0 else 3
    dims = (2**m, 2 ** (n - m), flag_dim)
    dim = 2**n * flag_dim
    if dim > MAX_DIM:
        raise DomainError(f"composite dimension {dim} exceeds {MAX_DIM}")

    pair = PureStatePair.from_overlap(problem.s)
    flags = np.eye(flag_dim, dtype=complex)
    alpha1 = flags[0]
    alpha0 = flags[1]
    alpha2 = alpha1 if flag_dim == 2 else a * flags[0] + math.sqrt(1.0 - a * a) * flags[2]
    phi = np.zeros(2**n, dtype=complex)
    phi[0] = 1.0
    reference = np.kron(tensor_power(np.array([1.0, 0.0]), n - m), alpha1)

    inputs = tuple(np.kron(tensor_power(psi, m), reference) for psi in (pair.psi1, pair.psi2))
    clones = tuple(tensor_power(psi, n) for psi in (pair.psi1, pair.psi2))
    images = tuple(
        math.sqrt(max(1.0 - q, 0.0)) * np.kron(c, fl) + math.sqrt(q) * np.kron(phi, alpha0)
        for q, c, fl in ((q1, clones[0], alpha1), (q2, clones[1], alpha2))
    )

    # orthonormal frame of the input span and its prescribed image
    g = np.vdot(inputs[0], inputs[1])
    norm = math.sqrt(max(1.0 - abs(g) ** 2, 0.0))
    e2 = (inputs[1] - g * inputs[0]) / norm
    f2 = (images[1] - g * images[0]) / norm
    frame_in = complete_basis([inputs[0], e2], dim)
    frame_out = complete_basis([images[0], f2], dim)
    matrix = frame_out @ frame_in.conj().T

    cu = CloningUnitary(
        matrix=matrix,
        dims=dims,
        flag_states=(alpha1, alpha2, alpha0),
        failure_state=phi,
        reference_state=reference,
        inputs=inputs,
        targets=clones,
        q=(q1, q2),
    )
    err = cu.unitarity_error()
    if err > 1e-10:
        raise NumericError(f"completed matrix deviates from unitarity by {err:.3e}")
    return cu


@dataclass(frozen=True)
class MonteCarloTally:
    trials: int
    failures: int
    failures_by_state: tuple[int, int]
    trials_by_state: tuple[int, int]
    seed: int
    empirical_q: float


def _success_fidelity(cu: CloningUnitary, i: int) -> float:
    out = cu.output(i).reshape(-1, cu.dims[2])
    branch = out @ cu.flag_states[i - 1].conj()
    weight = float(np.vdot(branch, branch).real)
    if weight == 0.0:
        return 1.0
    return abs(np.vdot(cu.targets[i - 1], branch)) ** 2 / weight


def _run_chunk(args) -> tuple[int, int, int, int]:
    seed_seq, size, eta1, fail1, fail2 = args
    rng = np.random.default_rng(seed_seq)
    first = rng.random(size) < eta1
    draws = rng.random(size)
    failed = draws < np.where(first, fail1, fail2)
    n1 = int(np.count_nonzero(first))
    f1 = int(np.count_nonzero(failed & first))
    f2 = int(np.count_nonzero(failed & ~first))
    return n1, size - n1, f1, f2


def simulate(
    problem: CloningProblem,
    priors: PriorWeights | float,
    operating_point: tuple[float, float],
    trials: int,
    seed: int,
    *,
    workers: int = 1,
) -> MonteCarloTally:
    """Sample inputs and flag outcomes of the explicit machine.

    Trials are split into fixed-size chunks with RNG streams spawned from
    ``seed``, so the tally does not depend on ``workers``.
    """
    if trials < 1:
        raise DomainError("trials must be positive")
    priors = as_priors(priors)
    cu = build_unitary(problem, operating_point)
    for i in (1, 2):
        fid = _success_fidelity(cu, i)
        if fid < 1.0 - 1e-10:
            raise NumericError(f"success branch of input {i} has clone fidelity {fid!r}")
    fail1, fail2 = cu.failure_probability(1), cu.failure_probability(2)

    sizes = [CHUNK_TRIALS] * (trials // CHUNK_TRIALS)
    if trials % CHUNK_TRIALS:
        sizes.append(trials % CHUNK_TRIALS)
    streams = np.random.SeedSequence(seed).spawn(len(sizes))
    jobs = [(ss, size, priors.eta1, fail1, fail2) for ss, size in zip(streams, sizes)]
    if workers > 1:
        with ThreadPoolExecutor(max_workers=workers) as pool:
            parts = list(pool.map(_run_chunk, jobs))
    else:
        parts = [_run_chunk(job) for job in jobs]
    n1, n2, f1, f2 = (sum(col) for col in zip(*parts))
    return MonteCarloTally(
        trials=trials,
        failures=f1 + f2,
        failures_by_state=(f1, f2),
        trials_by_state=(n1, n2),
        seed=seed,
        empirical_q=(f1 + f2) / trials,
    )
