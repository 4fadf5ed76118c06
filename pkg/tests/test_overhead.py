"""Tests for the overhead model and the schedule optimizer."""

import itertools
import math
from decimal import Decimal

import numpy as np
import pytest

from rhgverify.errors import InfeasibleScheduleError, InputError
from rhgverify.models import BudgetSet, CostParams, DistillationSchedule, SearchBounds, Species
from rhgverify.overhead import (
    _front_2d,
    distill,
    epsilon_topo,
    mean_retries,
    omega_grid,
    optimize,
    overhead_clifford,
    overhead_magic_S,
    overhead_T,
    pareto_front,
    summarize,
    sweep,
)

from test_helpers import d_distill, d_epsilon_topo, d_exp, relative_error

COMPACT = BudgetSet.builtin("compact")
NAIVE = BudgetSet.builtin("naive")
PARAMS = CostParams()
DEFAULT_BOUNDS = SearchBounds(lambda_max=60, d_max=15, l_cap=3)


def budget_table(budgets):
    return {name: (budgets[name].V, budgets[name].L) for name in ("A", "Y", "T", "T_RE")}


class TestEpsilonTopo:
    """Tests for the topological error rate."""

    def test_value(self):
        """Test one hand-computed value."""
        expected = 10 * 2 * (math.exp(-4 * 0.93 * 4) + 2 * 4 * math.exp(-0.93 * 7))
        assert epsilon_topo(2, 10, 3, 0.93) == pytest.approx(expected, rel=1e-15)

    @pytest.mark.parametrize("args", [(1, 3, 0, 0.93), (1, 3, 3, 0.93), (0.5, 5, 1, 0.93), (1, 5, 1, 0.0)])
    def test_domain(self, args):
        """Test that out-of-domain arguments are input errors."""
        with pytest.raises(InputError):
            epsilon_topo(*args)

    def test_monotone(self):
        """Test monotonicity in L, kappa and (on the error-dominated range) lambda."""
        rng = np.random.default_rng(1)
        for _ in range(200):
            d = int(rng.integers(1, 10))
            lam = int(rng.integers(d + 2, d + 2 * (d + 1)))
            L = float(rng.uniform(1, 300))
            kappa = float(rng.uniform(0.5, 2.0))
            base = epsilon_topo(L, lam, d, kappa)
            assert epsilon_topo(L + 1, lam, d, kappa) > base
            assert epsilon_topo(L, lam, d, kappa + 0.1) < base
            assert epsilon_topo(L, lam + 1, d, 0.93) < epsilon_topo(L, lam, d, 0.93)


class TestFloors:
    """Tests for the error-free limits."""

    def test_mean_retries(self):
        """Test the expected number of attempts."""
        assert mean_retries(0) == 1
        assert mean_retries(0.5) == 2
        with pytest.raises(InputError):
            mean_retries(1)

    @pytest.mark.parametrize("gate", ["CNOT", "H", "S"])
    def test_clifford_without_errors(self, gate):
        """Test that vanishing errors leave exactly the volume cost."""
        params = CostParams(kappa=1e6)
        budget = COMPACT[gate]
        for lam, d in [(2, 1), (7, 3), (31, 15)]:
            result = overhead_clifford(budget, lam, d, 1e10, params)
            assert result.overhead == 24 * lam**3 * budget.V

    def test_distill_without_errors(self):
        """Test that perfect injection and no topological errors stay perfect."""
        params = CostParams(kappa=1e6, eps0_A=0.0, eps0_Y=0.0)
        schedule = DistillationSchedule.of([(6, 2), (9, 3), (12, 4), (15, 5)])
        for species in Species:
            levels = distill(species, schedule, COMPACT, params)
            assert [lvl.eps for lvl in levels] == [0.0] * 4

    def test_distilled_error_decreases(self):
        """Test that error rates fall level by level on a growing feasible schedule."""
        schedule = DistillationSchedule.of([(30, 10), (36, 12), (42, 14), (48, 16)])
        for species in Species:
            errors = [lvl.eps for lvl in distill(species, schedule, COMPACT, PARAMS)]
            assert all(later < earlier for earlier, later in zip(errors, errors[1:]))

    def test_overhead_at_least_prefactor(self):
        """Test that retries never make a gate cheaper than its prefactor."""
        schedule = DistillationSchedule.of([(30, 10), (40, 12)])
        result = overhead_T(schedule, COMPACT, 1e6, PARAMS)
        prefactor = result.breakdown["A_states"] + result.breakdown["Y_states"] + result.breakdown["circuit"]
        assert result.overhead >= prefactor
        assert result.overhead == pytest.approx(prefactor * result.breakdown["retry_factor"])


class TestFormulaFidelity:
    """Tests against an extended-precision re-evaluation."""

    def test_epsilon_topo(self):
        """Test 100 random points of the topological error rate."""
        rng = np.random.default_rng(2)
        for _ in range(100):
            d = int(rng.integers(1, 16))
            lam = int(rng.integers(d + 1, 61))
            L, kappa = float(rng.uniform(1, 400)), float(rng.uniform(0.3, 2.0))
            assert relative_error(epsilon_topo(L, lam, d, kappa), d_epsilon_topo(L, lam, d, kappa)) < 1e-12

    def test_overhead_clifford(self):
        """Test 100 random Clifford overheads."""
        rng = np.random.default_rng(3)
        for _ in range(100):
            budget = COMPACT[["CNOT", "H", "S"][int(rng.integers(0, 3))]]
            d = int(rng.integers(1, 16))
            lam = int(rng.integers(d + 1, 61))
            eps = d_epsilon_topo(budget.L, lam, d, PARAMS.kappa)
            # keep the retry exponent in a range where doubles stay accurate
            omega = float(Decimal(repr(float(rng.uniform(0.01, 30)))) / eps)
            result = overhead_clifford(budget, lam, d, omega, PARAMS)
            expected = Decimal(24) * Decimal(lam) ** 3 * Decimal(repr(budget.V)) * d_exp(eps * Decimal(repr(omega)))
            assert relative_error(result.overhead, expected) < 1e-12

    @staticmethod
    def _random_schedules(rng, count):
        """Schedules whose distillation denominators stay well away from zero."""
        a_length = COMPACT["A"].L
        found = 0
        while found < count:
            levels = []
            for _ in range(int(rng.integers(1, 5))):
                d = int(rng.integers(3, 11))
                levels.append((int(rng.integers(d + 8, d + 30)), d))
            if any(epsilon_topo(a_length, lam, d, PARAMS.kappa) > 0.1 for lam, d in levels[:-1]):
                continue
            found += 1
            yield DistillationSchedule.of(levels)

    def test_distill(self):
        """Test 100 random schedules of both species."""
        rng = np.random.default_rng(4)
        table = budget_table(COMPACT)
        for schedule in self._random_schedules(rng, 100):
            a_ref, y_ref = d_distill(schedule.levels, table, PARAMS.kappa, 24, 0.0134, 0.0134)
            for species, reference in ((Species.A, a_ref), (Species.Y, y_ref)):
                levels = distill(species, schedule, COMPACT, PARAMS)
                assert len(levels) == schedule.l_max + 1
                for level, (eps, cost) in zip(levels, reference):
                    assert relative_error(level.eps, eps) < 1e-12
                    assert relative_error(level.overhead, cost) < 1e-12

    @pytest.mark.parametrize("rebit", [False, True])
    def test_overhead_T(self, rebit):
        """Test 100 random T gates, plain and rebit."""
        rng = np.random.default_rng(5 + rebit)
        table = budget_table(COMPACT)
        a_count, y_count, coefficient, gate = (2, Decimal("1.5"), 24, "T_RE") if rebit else (1, Decimal("0.5"), 36, "T")
        for schedule in self._random_schedules(rng, 100):
            a_ref, y_ref = d_distill(schedule.levels, table, PARAMS.kappa, 24, 0.0134, 0.0134)
            lam, d = schedule.levels[-1]
            v, L = table[gate]
            per_gate = a_count * a_ref[-1][0] + y_count * y_ref[-1][0] + d_epsilon_topo(L, lam, d, PARAMS.kappa)
            omega = float(Decimal(repr(float(rng.uniform(0.01, 30)))) / per_gate)
            result = overhead_T(schedule, COMPACT, omega, PARAMS, rebit=rebit)
            prefactor = (
                a_count * a_ref[-1][1] + y_count * y_ref[-1][1]
                + coefficient * Decimal(lam) ** 3 * Decimal(repr(float(v)))
            )
            expected = prefactor * d_exp(per_gate * Decimal(repr(omega)))
            assert relative_error(result.overhead, expected) < 1e-12


class TestGates:
    """Tests for individual gate evaluations."""

    def test_rebit_prefactor(self):
        """Test the 2 A + 1.5 Y mix of the rebit T gate at a shared schedule."""
        schedule = DistillationSchedule.of([(30, 10), (40, 12)])
        plain = overhead_T(schedule, COMPACT, 1e6, PARAMS)
        rebit = overhead_T(schedule, COMPACT, 1e6, PARAMS, rebit=True)
        a = distill(Species.A, schedule, COMPACT, PARAMS)[-1].overhead
        y = distill(Species.Y, schedule, COMPACT, PARAMS)[-1].overhead
        assert rebit.breakdown["A_states"] == pytest.approx(2 * a)
        assert rebit.breakdown["Y_states"] == pytest.approx(1.5 * y)
        assert plain.breakdown["A_states"] == pytest.approx(a)
        assert plain.breakdown["Y_states"] == pytest.approx(0.5 * y)
        assert rebit.gate == "T_RE" and plain.gate == "T"

    def test_plain_t_coefficient_is_configurable(self):
        """Test that the circuit coefficient can be normalized to 24."""
        schedule = DistillationSchedule.of([(30, 10), (40, 12)])
        plain = overhead_T(schedule, COMPACT, 1e6, PARAMS)
        normalized = overhead_T(schedule, COMPACT, 1e6, CostParams(plain_t_coefficient=24))
        assert normalized.breakdown["circuit"] == pytest.approx(plain.breakdown["circuit"] * 24 / 36)
        assert any("normalized" in note for note in normalized.assumptions)

    def test_infeasible_level(self):
        """Test that a level failing with certainty is reported."""
        schedule = DistillationSchedule.of([(2, 1), (3, 1)])
        with pytest.raises(InfeasibleScheduleError) as info:
            overhead_T(schedule, NAIVE, 1e6, PARAMS)
        assert info.value.level == 1

    def test_magic_s_ignores_a_states(self):
        """Test that the S baseline only needs Y distillation."""
        schedule = DistillationSchedule.of([(30, 10), (40, 12)])
        result = overhead_magic_S(schedule, COMPACT, 1e4, PARAMS)
        y = distill(Species.Y, schedule, COMPACT, PARAMS)[-1]
        assert result.eps_Y == y.eps
        assert result.eps_A is None
        assert any("extrapolated" in note for note in result.assumptions)

    def test_assumptions_recorded(self):
        """Test the assumption ledger of a T result."""
        schedule = DistillationSchedule.of([(30, 10), (40, 12)])
        notes = overhead_T(schedule, COMPACT, 1e6, PARAMS).assumptions
        assert any("eps0_Y" in note for note in notes)
        assert any("L_Y" in note for note in notes)

    def test_omega_must_be_positive(self):
        """Test the circuit size domain."""
        with pytest.raises(InputError):
            overhead_clifford(COMPACT["H"], 5, 2, 0, PARAMS)


class TestFrontiers:
    """Tests for the pruning helpers."""

    def test_pareto_front(self):
        """Test that exactly the non-dominated rows survive, ties broken by the tiebreak."""
        points = np.array([[1, 5], [2, 2], [3, 3], [5, 1], [2, 2], [1, 6]], dtype=float)
        kept = pareto_front(points, np.array([0, 9, 0, 0, 1, 0], dtype=float))
        assert kept.tolist() == [0, 3, 4]

    def test_pareto_front_blocks(self):
        """Test that blocking does not change the result."""
        rng = np.random.default_rng(7)
        points = rng.random((500, 3))
        tiebreak = np.zeros(500)
        assert pareto_front(points, tiebreak, block=7).tolist() == pareto_front(points, tiebreak).tolist()
        kept = set(pareto_front(points, tiebreak).tolist())
        for i in range(500):
            dominated = np.any(np.all(points <= points[i], axis=1) & np.any(points < points[i], axis=1))
            assert (i not in kept) == bool(dominated)

    def test_front_2d(self):
        """Test the staircase of cost against error."""
        cost = np.array([1.0, 2.0, 2.0, 3.0, 4.0])
        error = np.array([5.0, 3.0, 4.0, 3.0, 1.0])
        assert _front_2d(cost, error, np.zeros(5)).tolist() == [0, 1, 4]


def exhaustive_best(gate, omega, params, bounds, budgets, rebit=False):
    """Minimum over every schedule on the grid, one overhead evaluation each."""
    pairs = bounds.pairs()
    best = math.inf
    for l_max in range(bounds.l_cap + 1):
        for levels in itertools.product(pairs, repeat=l_max + 1):
            schedule = DistillationSchedule.of(levels)
            try:
                if gate == "S_MAGIC":
                    value = overhead_magic_S(schedule, budgets, omega, params).overhead
                else:
                    value = overhead_T(schedule, budgets, omega, params, rebit=rebit).overhead
            except InfeasibleScheduleError:
                continue
            best = min(best, value)
    return best


class TestOptimize:
    """Tests for the schedule search."""

    # a steep error decay makes distillation feasible on a grid small enough to enumerate
    STEEP = CostParams(kappa=2.5)
    SMALL = SearchBounds(lambda_max=8, d_max=3, l_cap=2)

    @pytest.mark.parametrize("gate", ["CNOT", "H", "S"])
    def test_clifford_matches_scan(self, gate):
        """Test the Clifford optimum against a scan of every (lambda, d)."""
        bounds = SearchBounds(lambda_max=40, d_max=12, l_cap=0)
        for omega in (1e3, 1e6):
            schedule, result = optimize(gate, omega, PARAMS, bounds, COMPACT)
            scan = min(overhead_clifford(COMPACT[gate], lam, d, omega, PARAMS).overhead for lam, d in bounds.pairs())
            assert result.overhead == pytest.approx(scan, rel=1e-12)
            assert schedule.l_max == 0
            assert result.budgets == "compact"

    def test_no_error_pressure(self):
        """Test that the smallest scale wins when errors vanish."""
        schedule, _ = optimize("H", 1e8, CostParams(kappa=1e6), SearchBounds(lambda_max=20, d_max=5), COMPACT)
        assert schedule.levels == ((2, 1),)
        schedule, _ = optimize("T", 1e8, CostParams(kappa=1e6, eps0_A=0.0, eps0_Y=0.0), self.SMALL, COMPACT)
        assert schedule.levels == ((2, 1),)

    @pytest.mark.parametrize("gate,rebit,omega", [
        ("T", False, 1e2),
        ("T", False, 1e4),
        ("T", True, 1e3),
        ("S_MAGIC", False, 1e3),
    ])
    def test_distilled_matches_exhaustive(self, gate, rebit, omega):
        """Test the pruned search against every schedule on a small grid."""
        expected = exhaustive_best(gate, omega, self.STEEP, self.SMALL, COMPACT, rebit)
        assert math.isfinite(expected)
        _, result = optimize(gate, omega, self.STEEP, self.SMALL, COMPACT, rebit=rebit)
        assert result.overhead == pytest.approx(expected, rel=1e-9)

    def test_never_worse_than_reference_grid(self):
        """Test the optimum against a coarse grid of two-level schedules."""
        bounds = SearchBounds(lambda_max=30, d_max=10, l_cap=2)
        _, result = optimize("T", 1e4, PARAMS, bounds, COMPACT)
        for lam0 in range(6, 31, 6):
            for lam1 in range(6, 31, 6):
                schedule = DistillationSchedule.of([(lam0, lam0 // 3), (lam1, lam1 // 3)])
                try:
                    value = overhead_T(schedule, COMPACT, 1e4, PARAMS).overhead
                except InfeasibleScheduleError:
                    continue
                assert result.overhead <= value * (1 + 1e-12)

    def test_result_is_reproducible(self):
        """Test that the result comes back through the scalar formulas."""
        schedule, result = optimize("T", 1e3, self.STEEP, self.SMALL, COMPACT)
        again = overhead_T(schedule, COMPACT, 1e3, self.STEEP)
        assert result.overhead == again.overhead
        assert result.schedule == schedule

    def test_infeasible(self):
        """Test that an impossible grid is reported."""
        with pytest.raises(InfeasibleScheduleError):
            optimize("T", 1e6, PARAMS, SearchBounds(lambda_max=3, d_max=1, l_cap=2), NAIVE)

    def test_unknown_gate(self):
        """Test gate name validation."""
        with pytest.raises(InputError):
            optimize("TOFFOLI", 1e6, PARAMS, self.SMALL)


class TestSweep:
    """Tests for sweeps over circuit sizes."""

    def test_omega_grid(self):
        """Test log spacing and its domain."""
        grid = omega_grid(1e6, 1e10, 5)
        assert grid == pytest.approx([1e6, 1e7, 1e8, 1e9, 1e10])
        assert omega_grid(5.0, 5.0, 1) == [5.0]
        with pytest.raises(InputError):
            omega_grid(1e6, 1e10, 0)
        with pytest.raises(InputError):
            omega_grid(0, 1e10, 3)

    def test_cnot_nondecreasing(self):
        """Test that the optimized CNOT overhead grows with the circuit size."""
        results = sweep("CNOT", omega_grid(1e2, 1e12, 20), PARAMS, DEFAULT_BOUNDS, COMPACT, workers=2)
        values = [r.overhead for r in results]
        assert len(values) == 20
        assert values == sorted(values)

    def test_h_below_cnot(self):
        """Test that H is pointwise cheaper than CNOT."""
        omegas = omega_grid(1e4, 1e12, 9)
        h = sweep("H", omegas, PARAMS, DEFAULT_BOUNDS, COMPACT)
        cnot = sweep("CNOT", omegas, PARAMS, DEFAULT_BOUNDS, COMPACT)
        assert all(a.overhead <= b.overhead for a, b in zip(h, cnot))

    def test_s_has_no_distillation(self):
        """Test that the topological S gate uses its own volume only."""
        result = sweep("S", [1e8], PARAMS, DEFAULT_BOUNDS, COMPACT)[0]
        lam = result.schedule.levels[0][0]
        assert result.schedule.l_max == 0
        assert result.breakdown["volume"] == 24 * lam**3 * 48
        assert result.eps_A is None

    def test_summarize(self):
        """Test the min/max summary."""
        results = sweep("H", [1e4, 1e8], PARAMS, DEFAULT_BOUNDS, COMPACT)
        summary = summarize(results)
        assert summary["min_overhead"] == results[0].overhead
        assert summary["max_overhead"] == results[1].overhead


@pytest.fixture(scope="module")
def t_results():
    """Optimized T overheads for both budget sets, computed once."""
    omegas = [1e6, 1e7, 1e8, 1e9, 1e10]
    return {
        label: sweep("T", omegas, PARAMS, DEFAULT_BOUNDS, budgets)
        for label, budgets in (("compact", COMPACT), ("naive", NAIVE))
    }


class TestDefaultModelOrderings:
    """Tests of the orderings claimed for the default model."""

    def test_compact_distillation_is_cheaper(self, t_results):
        """Test that compact distillation beats naive distillation at every size."""
        for compact, naive in zip(t_results["compact"], t_results["naive"]):
            assert compact.overhead < naive.overhead
            assert 1.5 <= naive.overhead / compact.overhead <= 6

    def test_naive_ratio_never_exceeds_same_schedule_ratio(self, t_results):
        """Test that the optimized ratio is at most naive over compact on the compact optimum."""
        for compact, naive in zip(t_results["compact"], t_results["naive"]):
            same = overhead_T(compact.schedule, NAIVE, compact.omega, PARAMS)
            assert naive.overhead <= same.overhead * (1 + 1e-9)
            assert naive.overhead / compact.overhead < 2

    @pytest.mark.parametrize("levels", [
        [(10, 2), (25, 4)],
        [(12, 3), (20, 5)],
        [(8, 2), (30, 6), (40, 8)],
    ])
    def test_budget_ratio_is_bounded_by_volumes(self, levels):
        """Test that without topological errors the budgets only scale cell counts, by at most V_A ratio."""
        params = CostParams(kappa=1e6)
        bound = max(NAIVE[g].V / COMPACT[g].V for g in ("A", "Y"))
        assert bound == pytest.approx(336 / 192)
        schedule = DistillationSchedule.of(levels)
        naive = overhead_T(schedule, NAIVE, 1e3, params)
        compact = overhead_T(schedule, COMPACT, 1e3, params)
        assert 1 < naive.overhead / compact.overhead <= bound * (1 + 1e-12)

    @pytest.mark.parametrize("omega", [1e8, 1e9])
    def test_topological_s_beats_magic_s(self, omega):
        """Test that braided S is at least five times cheaper than S by injection of naively distilled |Y>."""
        _, topological = optimize("S", omega, PARAMS, DEFAULT_BOUNDS, COMPACT)
        _, magic = optimize("S_MAGIC", omega, PARAMS, DEFAULT_BOUNDS, NAIVE)
        assert magic.overhead >= 5 * topological.overhead

    @pytest.mark.parametrize("omega", [1e8, 1e9])
    def test_compact_injection_narrows_the_gap(self, omega):
        """Test that compact |Y> distillation makes injection cheaper but still well above braided S."""
        _, topological = optimize("S", omega, PARAMS, DEFAULT_BOUNDS, COMPACT)
        _, naive = optimize("S_MAGIC", omega, PARAMS, DEFAULT_BOUNDS, NAIVE)
        _, compact = optimize("S_MAGIC", omega, PARAMS, DEFAULT_BOUNDS, COMPACT)
        assert topological.overhead * 3 <= compact.overhead < naive.overhead
