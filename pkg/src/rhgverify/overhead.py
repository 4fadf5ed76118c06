"""Fault-tolerance overhead of logical gates on the RHG lattice.

A gate occupying ``V`` unit cells at scale ``lambda`` costs
``ops_per_cell * lambda**3 * V`` operations and fails with the topological
error rate ``epsilon_topo``; across a circuit of ``omega`` gates the retries
multiply the cost by ``exp(epsilon * omega)``. T gates (and the magic-state
S baseline) also pay for recursively distilled |A> and |Y> states.
"""

import logging
import math
from concurrent.futures import ThreadPoolExecutor
from typing import Dict, List, Optional, Sequence, Tuple

import numpy as np

from .config import worker_count
from .errors import InfeasibleScheduleError, InputError
from .models import (
    BudgetSet,
    CostParams,
    DistillationLevel,
    DistillationSchedule,
    GateBudget,
    OverheadResult,
    SearchBounds,
    Species,
)

logger = logging.getLogger(__name__)

A_FACTOR = 35
A_INPUTS = 15
Y_FACTOR = 7
Y_INPUTS = 7
# |Y> states consumed per A level by the S gates of the 15-to-1 circuit
Y_PER_A = 1705 / 512

CLIFFORD_GATES = ("CNOT", "H", "S")
DISTILLED_GATES = ("T", "S_MAGIC")


def epsilon_topo(L_G: float, lam: float, d: float, kappa: float) -> float:
    """Probability of a logical error cycle in a gate with line length ``L_G``."""
    if not d >= 1:
        raise InputError(f"d must be at least 1, got {d}")
    if not lam > d:
        raise InputError(f"lambda must exceed d, got lambda={lam}, d={d}")
    if not L_G >= 1:
        raise InputError(f"line length must be at least 1, got {L_G}")
    if not kappa > 0:
        raise InputError(f"kappa must be positive, got {kappa}")
    return lam * L_G * (math.exp(-4 * kappa * (d + 1)) + 2 * (d + 1) * math.exp(-kappa * (lam - d)))


def mean_retries(eps: float) -> float:
    """Expected number of attempts until a gate with failure rate ``eps`` succeeds."""
    if not 0 <= eps < 1:
        raise InputError(f"failure probability must lie in [0, 1), got {eps}")
    return 1 / (1 - eps)


def _retry_factor(exponent: float) -> float:
    try:
        return math.exp(exponent)
    except OverflowError:
        return math.inf


def _check_omega(omega: float) -> None:
    if not omega > 0:
        raise InputError(f"omega must be positive, got {omega}")


def overhead_clifford(
    budget: GateBudget, lam: int, d: int, omega: float, params: CostParams
) -> OverheadResult:
    _check_omega(omega)
    eps = epsilon_topo(budget.L, lam, d, params.kappa)
    volume = params.ops_per_cell * lam**3 * budget.V
    factor = _retry_factor(eps * omega)
    return OverheadResult(
        gate=budget.name,
        omega=omega,
        schedule=DistillationSchedule.of([(lam, d)]),
        overhead=volume * factor,
        breakdown={"volume": volume, "eps_topo": eps, "retry_factor": factor},
        assumptions=[],
    )


def _distill_both(
    schedule: DistillationSchedule, budgets: BudgetSet, params: CostParams, with_a: bool = True
) -> Tuple[List[DistillationLevel], List[DistillationLevel]]:
    lam0 = schedule.levels[0][0]
    start = params.ops_per_cell * lam0**3 * params.injection_volume
    a_levels = [DistillationLevel(level=0, eps=params.eps0_A, overhead=start)]
    y_levels = [DistillationLevel(level=0, eps=params.eps0_Y_value, overhead=start)]
    A, Y = budgets["A"], budgets["Y"]
    a_error_length = Y.L if params.a_error_length == "L_Y" else A.L
    for level in range(1, schedule.l_max + 1):
        lam, d = schedule.levels[level - 1]
        prev_a, prev_y = a_levels[-1], y_levels[-1]
        t_y = epsilon_topo(Y.L, lam, d, params.kappa)
        t_a = epsilon_topo(A.L, lam, d, params.kappa)
        t_a_error = epsilon_topo(a_error_length, lam, d, params.kappa)

        denominator = 1 - Y_INPUTS * prev_y.eps - t_y
        if denominator <= 0:
            raise InfeasibleScheduleError(
                f"Y distillation at level {level} fails with probability >= 1", level=level
            )
        y_cost = (Y_INPUTS * prev_y.overhead + params.ops_per_cell * Y.V * lam**3) / denominator
        y_eps = Y_FACTOR * prev_y.eps**3 + t_y

        if not with_a:
            y_levels.append(DistillationLevel(level=level, eps=y_eps, overhead=y_cost))
            continue
        denominator = 1 - A_INPUTS * prev_a.eps - t_a
        if denominator <= 0:
            raise InfeasibleScheduleError(
                f"A distillation at level {level} fails with probability >= 1", level=level
            )
        a_cost = (
            A_INPUTS * prev_a.overhead + Y_PER_A * prev_y.overhead + params.ops_per_cell * A.V * lam**3
        ) / denominator
        a_eps = A_FACTOR * prev_a.eps**3 + t_a_error

        a_levels.append(DistillationLevel(level=level, eps=a_eps, overhead=a_cost))
        y_levels.append(DistillationLevel(level=level, eps=y_eps, overhead=y_cost))
    return a_levels, y_levels


def distill(
    species: Species, schedule: DistillationSchedule, budgets: BudgetSet, params: CostParams
) -> List[DistillationLevel]:
    """Error rate and cost of a distilled state for every level 0..l_max.

    Level ``l`` runs its distillation circuit at ``(lambda_{l-1}, d_{l-1})``;
    level 0 is the raw injected state. An A level consumes Y states of the
    level below.
    """
    species = Species(species)
    a_levels, y_levels = _distill_both(schedule, budgets, params, with_a=species is Species.A)
    return a_levels if species is Species.A else y_levels


def overhead_T(
    schedule: DistillationSchedule,
    budgets: BudgetSet,
    omega: float,
    params: CostParams,
    rebit: bool = False,
) -> OverheadResult:
    """T gate fed by distilled states of level ``l_max``, plain or rebit-encoded."""
    _check_omega(omega)
    a_levels, y_levels = _distill_both(schedule, budgets, params)
    a, y = a_levels[-1], y_levels[-1]
    lam, d = schedule.levels[-1]
    if rebit:
        gate = budgets["T_RE"]
        a_count, y_count, coefficient = 2.0, 1.5, params.ops_per_cell
    else:
        gate = budgets["T"]
        a_count, y_count, coefficient = 1.0, 0.5, params.plain_t_coefficient
    circuit = coefficient * lam**3 * gate.V
    eps_circuit = epsilon_topo(gate.L, lam, d, params.kappa)
    prefactor = a_count * a.overhead + y_count * y.overhead + circuit
    exponent = (a_count * a.eps + y_count * y.eps + eps_circuit) * omega
    factor = _retry_factor(exponent)
    return OverheadResult(
        gate="T_RE" if rebit else "T",
        omega=omega,
        schedule=schedule,
        budgets=budgets.label,
        rebit=rebit,
        eps_A=a.eps,
        eps_Y=y.eps,
        overhead=prefactor * factor,
        breakdown={
            "A_states": a_count * a.overhead,
            "Y_states": y_count * y.overhead,
            "circuit": circuit,
            "eps_circuit": eps_circuit,
            "retry_factor": factor,
        },
        assumptions=params.assumptions(),
    )


def overhead_magic_S(
    schedule: DistillationSchedule, budgets: BudgetSet, omega: float, params: CostParams
) -> OverheadResult:
    """S gate by |Y> injection; an extrapolated baseline, not a derived cost.

    The baseline stands for S as built before the braided phase gate, so it is
    normally evaluated with the naive budget set.
    """
    _check_omega(omega)
    _, y_levels = _distill_both(schedule, budgets, params, with_a=False)
    y = y_levels[-1]
    lam, d = schedule.levels[-1]
    gate = budgets["S_MAGIC"]
    circuit = params.ops_per_cell * lam**3 * gate.V
    eps_circuit = epsilon_topo(gate.L, lam, d, params.kappa)
    factor = _retry_factor((y.eps + eps_circuit) * omega)
    return OverheadResult(
        gate="S_MAGIC",
        omega=omega,
        schedule=schedule,
        budgets=budgets.label,
        eps_Y=y.eps,
        overhead=(y.overhead + circuit) * factor,
        breakdown={"Y_states": y.overhead, "circuit": circuit, "eps_circuit": eps_circuit, "retry_factor": factor},
        assumptions=params.assumptions()
        + [f"magic-state S baseline extrapolated with an injection circuit of V={gate.V:g}, L={gate.L:g}"],
    )


# ---------------------------------------------------------------------------
# Optimizer
# ---------------------------------------------------------------------------

def _eps_topo_grid(L_G: float, lam: np.ndarray, d: np.ndarray, kappa: float) -> np.ndarray:
    return lam * L_G * (np.exp(-4 * kappa * (d + 1)) + 2 * (d + 1) * np.exp(-kappa * (lam - d)))


# (state, pair) combinations evaluated per numpy batch
CHUNK = 1 << 19


def pareto_front(points: np.ndarray, tiebreak: np.ndarray, block: int = 1024) -> np.ndarray:
    """Indices of rows no other row dominates (every column minimized).

    Among identical rows the one with the smallest ``tiebreak`` survives.
    Rows are visited in lexicographic order, so a row can only be dominated by
    one visited before it.
    """
    n, k = points.shape
    if n == 0:
        return np.zeros(0, dtype=np.int64)
    order = np.lexsort((tiebreak,) + tuple(points[:, c] for c in reversed(range(k))))
    ordered = points[order]
    front = np.empty((0, k))
    kept = []
    for start in range(0, n, block):
        chunk = ordered[start:start + block]
        dominated = np.zeros(len(chunk), dtype=bool)
        for f in range(0, len(front), block):
            part = front[f:f + block]
            dominated |= np.all(part[None, :, :] <= chunk[:, None, :], axis=2).any(axis=1)
        inner = np.tril(np.all(chunk[None, :, :] <= chunk[:, None, :], axis=2), k=-1)
        dominated |= inner.any(axis=1)
        survivors = np.flatnonzero(~dominated)
        front = np.vstack([front, chunk[survivors]])
        kept.extend(order[start + survivors].tolist())
    return np.sort(np.array(kept, dtype=np.int64))


def _front_2d(cost: np.ndarray, error: np.ndarray, tiebreak: np.ndarray) -> np.ndarray:
    """Rows on the (cost, error) staircase; exact for the last step of the search."""
    if cost.size == 0:
        return np.zeros(0, dtype=np.int64)
    order = np.lexsort((tiebreak, error, cost))
    ordered = error[order]
    best_before = np.concatenate(([np.inf], np.minimum.accumulate(ordered)[:-1]))
    return np.sort(order[ordered < best_before])


class _Level:
    """States after some number of distillation levels, one entry per row."""

    __slots__ = ("a_cost", "y_cost", "a_eps", "y_eps", "lam_sum", "parent", "pair")

    def __init__(self, a_cost, y_cost, a_eps, y_eps, lam_sum, parent, pair):
        self.a_cost = a_cost
        self.y_cost = y_cost
        self.a_eps = a_eps
        self.y_eps = y_eps
        self.lam_sum = lam_sum
        self.parent = parent
        self.pair = pair

    def __len__(self) -> int:
        return len(self.a_cost)

    def take(self, rows: np.ndarray) -> "_Level":
        return _Level(*(getattr(self, name)[rows] for name in self.__slots__))

    @staticmethod
    def concat(parts: List["_Level"]) -> "_Level":
        return _Level(*(np.concatenate([getattr(p, name) for p in parts]) for name in _Level.__slots__))


class _DistilledSearch:
    """Exact search over schedules for gates fed by distilled states.

    A state is the (cost, error) of the A and Y states a level produces. Every
    later formula is nondecreasing in all four, so dominated states are
    dropped, and a state whose cheapest completion already costs more than the
    best overhead found is dropped too. Only the combined cost and combined
    error enter the final gate, which makes a two-column frontier enough for
    the final evaluation.
    """

    def __init__(self, gate: str, budgets: BudgetSet, params: CostParams, bounds: SearchBounds, rebit: bool):
        self.gate = gate
        self.budgets = budgets
        self.params = params
        self.bounds = bounds
        self.rebit = rebit
        pairs = bounds.pairs()
        self.pairs = pairs
        self.lam = np.array([p[0] for p in pairs], dtype=np.float64)
        d = np.array([p[1] for p in pairs], dtype=np.float64)
        A, Y = budgets["A"], budgets["Y"]
        kappa = params.kappa
        cube = params.ops_per_cell * self.lam**3
        self.t_y = _eps_topo_grid(Y.L, self.lam, d, kappa)
        self.t_a = _eps_topo_grid(A.L, self.lam, d, kappa)
        self.t_a_error = self.t_y if params.a_error_length == "L_Y" else _eps_topo_grid(A.L, self.lam, d, kappa)
        self.cost_a = cube * A.V
        self.cost_y = cube * Y.V
        self.injection = cube * params.injection_volume
        if gate == "S_MAGIC":
            target = budgets["S_MAGIC"]
            self.a_count, self.y_count, coefficient = 0.0, 1.0, params.ops_per_cell
        elif rebit:
            target = budgets["T_RE"]
            self.a_count, self.y_count, coefficient = 2.0, 1.5, params.ops_per_cell
        else:
            target = budgets["T"]
            self.a_count, self.y_count, coefficient = 1.0, 0.5, params.plain_t_coefficient
        self.uses_a = self.a_count > 0
        self.circuit = coefficient * self.lam**3 * target.V
        self.t_circuit = _eps_topo_grid(target.L, self.lam, d, kappa)
        self.circuit_floor = float(self.circuit.min())
        # S by injection only needs Y states, so the A columns never matter
        self.columns = [0, 1, 2, 3] if self.uses_a else [1, 3]

    def _weighted(self, a: np.ndarray, y: np.ndarray) -> np.ndarray:
        total = self.y_count * y
        if self.uses_a:
            total = total + self.a_count * a
        return total

    def _level_zero(self) -> _Level:
        size = len(self.pairs)
        index = np.arange(size, dtype=np.int64)
        return _Level(
            self.injection.copy(),
            self.injection.copy(),
            np.full(size, self.params.eps0_A),
            np.full(size, self.params.eps0_Y_value),
            np.zeros(size),
            index,
            index.copy(),
        )

    def _step(self, states: _Level, parent: np.ndarray, pair: np.ndarray) -> _Level:
        """One distillation level for each (parent row, pair) combination."""
        a_cost, y_cost = states.a_cost[parent], states.y_cost[parent]
        a_eps, y_eps = states.a_eps[parent], states.y_eps[parent]
        with np.errstate(over="ignore", divide="ignore", invalid="ignore"):
            a_den = 1 - A_INPUTS * a_eps - self.t_a[pair]
            y_den = 1 - Y_INPUTS * y_eps - self.t_y[pair]
            new_a = (A_INPUTS * a_cost + Y_PER_A * y_cost + self.cost_a[pair]) / a_den
            new_y = (Y_INPUTS * y_cost + self.cost_y[pair]) / y_den
            new_a_eps = A_FACTOR * a_eps**3 + self.t_a_error[pair]
            new_y_eps = Y_FACTOR * y_eps**3 + self.t_y[pair]
        new_a[a_den <= 0] = np.inf
        new_y[y_den <= 0] = np.inf
        lam_sum = states.lam_sum[parent] + self.lam[pair]
        return _Level(new_a, new_y, new_a_eps, new_y_eps, lam_sum, parent, pair)

    def _viable(self, states: _Level, incumbent: float) -> np.ndarray:
        ok = np.isfinite(states.y_cost)
        if self.uses_a:
            ok &= np.isfinite(states.a_cost)
        with np.errstate(invalid="ignore"):
            floor = self._weighted(states.a_cost, states.y_cost) + self.circuit_floor
        return ok & (floor <= incumbent)

    def _expandable(self, states: _Level, incumbent: float) -> np.ndarray:
        """Rows worth another level, reduced to their four-column frontier."""
        floor = self._weighted(A_INPUTS * states.a_cost, Y_INPUTS * states.y_cost) + self.circuit_floor
        rows = np.flatnonzero(floor <= incumbent)
        points = np.stack([states.a_cost, states.y_cost, states.a_eps, states.y_eps], axis=1)[rows]
        return rows[pareto_front(points[:, self.columns], states.lam_sum[rows])]

    def _children(self, states: _Level, rows: np.ndarray, incumbent: float) -> Optional[_Level]:
        size = len(self.pairs)
        step = max(1, CHUNK // size)
        parts = []
        for start in range(0, len(rows), step):
            block = rows[start:start + step]
            parent = np.repeat(block, size)
            pair = np.tile(np.arange(size, dtype=np.int64), len(block))
            children = self._step(states, parent, pair)
            parts.append(children.take(np.flatnonzero(self._viable(children, incumbent))))
        if not parts:
            return None
        return _Level.concat(parts)

    def _evaluate(self, states: _Level, rows: np.ndarray, omega: float, diagonal: bool = False):
        """Best (overhead, lambda sum, row, final pair) over ``rows`` and final pairs."""
        size = len(self.pairs)
        best = None
        step = len(rows) if diagonal else max(1, CHUNK // size)
        for start in range(0, len(rows), step):
            block = rows[start:start + step]
            cost = self._weighted(states.a_cost[block], states.y_cost[block])
            error = self._weighted(states.a_eps[block], states.y_eps[block])
            if diagonal:
                # injection and final gate share lambda_0
                final = states.pair[block]
                lam_total = states.lam_sum[block] + self.lam[final]
                with np.errstate(over="ignore", invalid="ignore"):
                    values = (cost + self.circuit[final]) * np.exp((error + self.t_circuit[final]) * omega)
                row_of, pair_of = block, final
            else:
                with np.errstate(over="ignore", invalid="ignore"):
                    values = (cost[:, None] + self.circuit[None, :]) * np.exp(
                        (error[:, None] + self.t_circuit[None, :]) * omega
                    )
                lam_total = (states.lam_sum[block][:, None] + self.lam[None, :]).ravel()
                values = values.ravel()
                row_of = np.repeat(block, size)
                pair_of = np.tile(np.arange(size, dtype=np.int64), len(block))
            values[~np.isfinite(values)] = np.inf
            low = values.min()
            if not math.isfinite(low):
                continue
            ties = np.flatnonzero(values == low)
            pick = int(ties[np.argmin(lam_total[ties])])
            found = (float(low), float(lam_total[pick]), int(row_of[pick]), int(pair_of[pick]))
            if best is None or found[:2] < best[:2]:
                best = found
        return best

    def _schedule(self, history: List[_Level], row: int, final_pair: int) -> List[Tuple[int, int]]:
        levels = [self.pairs[final_pair]]
        index = row
        for depth in range(len(history) - 1, 0, -1):
            states = history[depth]
            levels.append(self.pairs[int(states.pair[index])])
            index = int(states.parent[index])
        return list(reversed(levels))

    def run(self, omega: float) -> OverheadResult:
        level0 = self._level_zero()
        history = [level0]
        best = None
        found = self._evaluate(level0, np.arange(len(level0)), omega, diagonal=True)
        if found is not None:
            best = (found[0], self._schedule(history, found[2], found[3]))
        states = level0
        rows = np.arange(len(level0))
        for l_max in range(1, self.bounds.l_cap + 1):
            incumbent = best[0] if best else np.inf
            if l_max == 1:
                # the first distillation circuit runs at the injection scale lambda_0
                children = self._step(level0, rows, rows)
                children = children.take(np.flatnonzero(self._viable(children, incumbent)))
            else:
                children = self._children(states, rows, incumbent)
            if children is None or len(children) == 0:
                break
            states = children
            history.append(states)
            front = _front_2d(
                self._weighted(states.a_cost, states.y_cost),
                self._weighted(states.a_eps, states.y_eps),
                states.lam_sum,
            )
            found = self._evaluate(states, front, omega)
            # a deeper schedule only wins when strictly cheaper
            if found is not None and (best is None or found[0] < best[0]):
                best = (found[0], self._schedule(history, found[2], found[3]))
            logger.debug("Level %d: %d states, best so far %s", l_max, len(states), best and best[0])
            if l_max < self.bounds.l_cap:
                rows = self._expandable(states, best[0] if best else np.inf)
                if len(rows) == 0:
                    break
        if best is None:
            raise InfeasibleScheduleError(f"no feasible schedule for {self.gate} at omega={omega:g}")
        schedule = DistillationSchedule.of(best[1])
        if self.gate == "S_MAGIC":
            return overhead_magic_S(schedule, self.budgets, omega, self.params)
        return overhead_T(schedule, self.budgets, omega, self.params, rebit=self.rebit)


def _optimize_clifford(gate: str, omega: float, params: CostParams, bounds: SearchBounds, budgets: BudgetSet):
    budget = budgets[gate]
    pairs = bounds.pairs()
    lam = np.array([p[0] for p in pairs], dtype=np.float64)
    d = np.array([p[1] for p in pairs], dtype=np.float64)
    with np.errstate(over="ignore", invalid="ignore"):
        eps = _eps_topo_grid(budget.L, lam, d, params.kappa)
        values = params.ops_per_cell * lam**3 * budget.V * np.exp(eps * omega)
    values[~np.isfinite(values)] = np.inf
    best = int(np.argmin(values))
    if not math.isfinite(values[best]):
        raise InfeasibleScheduleError(f"no feasible scale for {gate} at omega={omega:g}")
    result = overhead_clifford(budget, pairs[best][0], pairs[best][1], omega, params)
    return result.model_copy(update={"budgets": budgets.label})


def optimize(
    gate: str,
    omega: float,
    params: CostParams,
    bounds: SearchBounds,
    budgets: Optional[BudgetSet] = None,
    rebit: bool = False,
) -> Tuple[DistillationSchedule, OverheadResult]:
    """Cheapest schedule on the search grid for ``gate`` at circuit size ``omega``.

    Ties go to the fewest distillation levels, then the smallest sum of lambdas.
    """
    _check_omega(omega)
    gate = gate.upper()
    budgets = budgets or BudgetSet.builtin("compact")
    if gate in CLIFFORD_GATES:
        result = _optimize_clifford(gate, omega, params, bounds, budgets)
    elif gate in DISTILLED_GATES:
        result = _DistilledSearch(gate, budgets, params, bounds, rebit).run(omega)
    else:
        raise InputError(f"unknown gate {gate!r}; choose from {', '.join(CLIFFORD_GATES + DISTILLED_GATES)}")
    logger.debug("Optimized %s at omega=%g: %s", gate, omega, result.schedule.levels)
    return result.schedule, result


def omega_grid(omega_min: float, omega_max: float, points: int) -> List[float]:
    """Log-spaced circuit sizes from ``omega_min`` to ``omega_max`` inclusive."""
    if points < 1:
        raise InputError(f"a sweep needs at least one point, got {points}")
    if not 0 < omega_min <= omega_max:
        raise InputError(f"need 0 < omega_min <= omega_max, got {omega_min:g} and {omega_max:g}")
    if points == 1:
        return [float(omega_min)]
    return [float(v) for v in np.logspace(math.log10(omega_min), math.log10(omega_max), points)]


def sweep(
    gate: str,
    omegas: Sequence[float],
    params: CostParams,
    bounds: SearchBounds,
    budgets: Optional[BudgetSet] = None,
    rebit: bool = False,
    workers: Optional[int] = None,
) -> List[OverheadResult]:
    """One optimized result per circuit size, in the order given."""

    def point(omega: float) -> OverheadResult:
        return optimize(gate, omega, params, bounds, budgets, rebit)[1]

    threads = worker_count(workers)
    if threads > 1 and len(omegas) > 1:
        with ThreadPoolExecutor(max_workers=threads) as pool:
            results = list(pool.map(point, omegas))
    else:
        results = [point(omega) for omega in omegas]
    logger.info("Swept %s over %d points", gate, len(results))
    return results


def summarize(results: Sequence[OverheadResult]) -> Dict[str, float]:
    values = [r.overhead for r in results]
    return {"min_overhead": min(values), "max_overhead": max(values)}
