import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from cloneopt.curve_core import (
    CloningProblem,
    constraint_residual,
    derivatives_at_tau,
    t_bounds,
)
from cloneopt.errors import DomainError
from cloneopt.optimal_cloner import (
    PriorWeights,
    brute_force_oracle,
    endpoint_failures,
    golden_section_min,
    prior_of_t,
    solve,
    sweep,
)
from cloneopt.protocols import ud_failure

P = CloningProblem(0.5, 1, 2)

GRID = [
    CloningProblem(s, m, n)
    for s in (0.1, 0.3, 0.5, 0.7, 0.9)
    for m in (1, 2)
    for n in (m + 1, m + 2, m + 4)
]


class TestPriorWeights:
    def test_from_eta1(self):
        assert PriorWeights.from_eta1(0.3) == PriorWeights(0.3, 0.7)

    @pytest.mark.parametrize("e1,e2", [(0.3, 0.3), (-0.1, 1.1), (1.2, -0.2)])
    def test_invalid(self, e1, e2):
        with pytest.raises(DomainError):
            PriorWeights(e1, e2)


class TestPriorOfT:
    def test_symmetric_end(self):
        assert prior_of_t(P, 2.0 / 3.0) == 0.5

    def test_slope_zero_end(self):
        assert prior_of_t(P, 0.8) == 0.0

    def test_golden_interior(self):
        # mpmath, 50 digits: eta1 = q2'/(q2' - q1') with numerically differentiated q_i(t)
        assert prior_of_t(P, 0.75) == pytest.approx(0.082205870057441267637, rel=1e-12)

    def test_out_of_bounds(self):
        with pytest.raises(DomainError):
            prior_of_t(P, 0.81)

    @pytest.mark.parametrize("problem", GRID, ids=str)
    def test_strictly_decreasing(self, problem):
        lo, hi = t_bounds(problem)
        etas = np.array([prior_of_t(problem, t) for t in np.linspace(lo, hi, 1000)])
        assert etas[0] == 0.5 and etas[-1] == 0.0
        assert np.all(np.diff(etas) < 0)


class TestEndpointFailures:
    def test_reference_values(self):
        ends = endpoint_failures(P)
        assert ends.q_0 == pytest.approx(0.2, abs=1e-15)
        assert ends.q_minus1 == pytest.approx(1.0 / 3.0, abs=1e-15)

    def test_orthogonal(self):
        ends = endpoint_failures(CloningProblem(0.0, 1, 3))
        assert (ends.q_0, ends.q_minus1) == (0.0, 0.0)

    def test_many_clone_limit(self):
        ends = endpoint_failures(CloningProblem(0.5, 1, 60))
        assert ends.q_0 == pytest.approx(0.25, abs=1e-15)
        assert ends.q_minus1 == pytest.approx(0.5, abs=1e-15)
        assert ends.q_minus1 == pytest.approx(ud_failure(0.5, 1, 0.5).q_ud, abs=1e-15)
        assert ends.q_0 == pytest.approx(ud_failure(0.5, 1, 0.0).q_ud, abs=1e-15)

    @pytest.mark.parametrize("problem", GRID, ids=str)
    def test_ordering(self, problem):
        ends = endpoint_failures(problem)
        assert ends.q_0 <= ends.q_minus1


class TestSolve:
    def test_equal_priors(self):
        sol = solve(P, 0.5)
        assert sol.q_min == pytest.approx(1.0 / 3.0, abs=1e-15)
        assert (sol.q1, sol.q2) == pytest.approx((1.0 / 3.0, 1.0 / 3.0), abs=1e-15)

    def test_one_state_never_sent(self):
        sol = solve(P, 0.0)
        assert sol.q_min == pytest.approx(0.2, abs=1e-15)
        assert (sol.q1, sol.q2) == pytest.approx((0.8, 0.2), abs=1e-15)

    @pytest.mark.parametrize(
        "problem,eta1,expected",
        [
            # mpmath, 50 digits: golden section over sqrt(q1) = sin(theta1)
            (P, 0.3, 0.31503280751277789341),
            (CloningProblem(0.7, 2, 4), 0.25, 0.29955588603012838681),
        ],
    )
    def test_high_precision_golden(self, problem, eta1, expected):
        assert solve(problem, eta1).q_min == pytest.approx(expected, abs=1e-13)

    def test_matches_oracle(self):
        assert abs(solve(P, 0.3).q_min - brute_force_oracle(P, 0.3)) <= 1e-7

    def test_orthogonal(self):
        sol = solve(CloningProblem(0.0, 1, 2), 0.3)
        assert sol.q_min == 0.0

    @settings(max_examples=60, deadline=None)
    @given(
        st.sampled_from(GRID),
        st.floats(0.0, 1.0),
    )
    def test_invariants(self, problem, eta1):
        sol = solve(problem, eta1)
        assert sol.p1 + sol.q1 == pytest.approx(1.0, abs=1e-12)
        assert sol.p2 + sol.q2 == pytest.approx(1.0, abs=1e-12)
        assert sol.q_min == pytest.approx(eta1 * sol.q1 + (1 - eta1) * sol.q2, abs=1e-12)
        assert abs(constraint_residual(problem, 1.0, sol.q1, sol.q2)) <= 1e-12
        assert 0.0 <= sol.q1 <= 1.0 and 0.0 <= sol.q2 <= 1.0

    @pytest.mark.parametrize("eta1", [0.05, 0.2, 0.37, 0.49])
    def test_symmetry(self, eta1):
        problem = CloningProblem(0.7, 1, 3)
        a, b = solve(problem, eta1), solve(problem, 1.0 - eta1)
        assert b.swapped and not a.swapped
        assert b.q_min == pytest.approx(a.q_min, abs=1e-14)
        assert (b.q1, b.q2) == (a.q2, a.q1)

    @pytest.mark.parametrize("problem", GRID, ids=str)
    def test_tangency(self, problem):
        for eta1 in np.arange(1, 10) * 0.05:
            sol = solve(problem, eta1)
            d1, d2 = derivatives_at_tau(problem, sol.tau_star)
            assert abs(eta1 * d1 + (1 - eta1) * d2) <= 1e-8

    @pytest.mark.parametrize("problem", GRID, ids=str)
    def test_nondecreasing_in_prior(self, problem):
        q = [solve(problem, e).q_min for e in np.linspace(0.0, 0.5, 101)]
        assert np.all(np.diff(q) >= -1e-15)


class TestSweep:
    def test_endpoints(self):
        rows = sweep(P, 20)
        ends = endpoint_failures(P)
        assert rows[0] == (0.0, ends.q_0)
        assert rows[-1] == (0.5, ends.q_minus1)

    def test_orthogonal(self):
        rows = sweep(CloningProblem(0.0, 1, 3), 10)
        assert len(rows) == 10 and all(q == 0.0 for _, q in rows)

    def test_round_trip(self):
        problem = CloningProblem(0.5, 1, 5)
        rows = sweep(problem, 100)
        etas = [e for e, _ in rows]
        assert etas == sorted(etas)
        qs = [q for _, q in rows]
        assert np.all(np.diff(qs) >= 0)
        for eta1, q in rows:
            assert solve(problem, eta1).q_min == pytest.approx(q, abs=1e-9)

    def test_too_few_points(self):
        with pytest.raises(DomainError):
            sweep(P, 1)


class TestOracle:
    def test_equal_priors(self):
        assert brute_force_oracle(P, 0.5) == pytest.approx(1.0 / 3.0, abs=1e-7)

    def test_orthogonal(self):
        assert brute_force_oracle(CloningProblem(0.0, 2, 3), 0.4) == 0.0

    def test_golden(self):
        value = brute_force_oracle(CloningProblem(0.7, 2, 4), 0.25)
        assert value == pytest.approx(0.29955588603012838681, abs=1e-10)

    def test_small_grid_rejected(self):
        with pytest.raises(DomainError):
            brute_force_oracle(P, 0.3, grid_size=10)

    def test_golden_section(self):
        # a kink locates to tol; a smooth minimum only to sqrt(machine epsilon)
        x, fx = golden_section_min(lambda v: abs(v - 0.3) + 1.0, 0.0, 1.0, tol=1e-10)
        assert x == pytest.approx(0.3, abs=1e-10)
        assert fx == pytest.approx(1.0, abs=1e-10)
        x, _ = golden_section_min(lambda v: (v - 0.3) ** 2, 0.0, 1.0, tol=1e-10)
        assert x == pytest.approx(0.3, abs=1e-7)
