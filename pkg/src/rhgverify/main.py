"""Main application logic for rhgverify."""

import logging
import sys
from typing import Dict, List, Optional

from .catalog import catalog, get_entry
from .cli import configure_logging, create_parser
from .complex import LatticeInfo, LatticeShape, build_complex
from .config import (
    budgets_from_config,
    cost_params_from_config,
    load_budget_file,
    load_config,
    search_bounds_from_config,
)
from .errors import InfeasibleScheduleError, InputError, RHGError
from .models import DISTILLATION_BUDGETS, BudgetSet, DistillationSchedule, OverheadResult, SearchBounds
from .overhead import (
    CLIFFORD_GATES,
    omega_grid,
    optimize,
    overhead_clifford,
    overhead_magic_S,
    overhead_T,
    sweep,
)
from .pattern import corrupt, load_circuit, save_circuit, serialize_circuit
from .renderers import BaseRenderer, get_renderer
from .verifier import verify
from .writers import SweepWriter

logger = logging.getLogger(__name__)

EXIT_OK = 0
EXIT_FAILED = 1
EXIT_INPUT = 2


def resolve_budgets(name: str, config: Dict, allow_both: bool = False) -> List[BudgetSet]:
    """Budget sets named on the command line: a built-in label, ``both`` or a TOML file."""
    if name in DISTILLATION_BUDGETS:
        return [budgets_from_config(config, name)]
    if name == "both":
        if not allow_both:
            raise InputError("--budgets both is only available for sweeps")
        return [budgets_from_config(config, label) for label in ("naive", "compact")]
    return [load_budget_file(name)]


def search_bounds(args, config: Dict) -> SearchBounds:
    bounds = search_bounds_from_config(config)
    overrides = {
        "lambda_max": args.lambda_max,
        "d_max": args.d_max,
        "l_cap": args.levels,
    }
    values = bounds.model_dump()
    values.update({k: v for k, v in overrides.items() if v is not None})
    return search_bounds_from_config({"search": values})


def _log_assumptions(result: OverheadResult) -> None:
    for note in result.assumptions:
        logger.info("Assumption: %s", note)


def run_lattice(args, config: Dict, renderer: BaseRenderer) -> int:
    complex_ = build_complex(LatticeShape.of(args.shape))
    print(renderer.lattice(LatticeInfo.of(complex_)))
    return EXIT_OK


def run_verify(args, config: Dict, renderer: BaseRenderer) -> int:
    spec = get_entry(args.catalog) if args.catalog else load_circuit(args.file)
    if args.corrupt is not None:
        logger.info("Test hook: un-measuring measured cell %d of %s", args.corrupt, spec.name)
        spec = spec.model_copy(update={"pattern": corrupt(spec.pattern, args.corrupt)})
    complex_ = build_complex(spec.pattern.shape)
    report = verify(complex_, spec, want_witness=args.witness, workers=args.workers)
    print(renderer.report(report))
    return EXIT_OK if report.accepted else EXIT_FAILED


def run_catalog(args, config: Dict, renderer: BaseRenderer) -> int:
    if args.catalog_command == "list":
        print(renderer.catalog(catalog()))
        return EXIT_OK
    spec = get_entry(args.name)
    if args.out:
        save_circuit(spec, args.out)
        logger.info("Wrote %s to %s", spec.name, args.out)
    else:
        sys.stdout.write(serialize_circuit(spec))
    return EXIT_OK


def _fixed_schedule(args) -> DistillationSchedule:
    if not args.lambdas or not args.ds:
        raise InputError("give --optimize, or --lambda and --d for every level")
    if len(args.lambdas) != len(args.ds):
        raise InputError(f"--lambda has {len(args.lambdas)} values but --d has {len(args.ds)}")
    return DistillationSchedule.of(zip(args.lambdas, args.ds))


def evaluate_gate(gate: str, args, params, bounds, budgets: BudgetSet) -> OverheadResult:
    """Optimized or fixed-schedule overhead of one gate."""
    if args.optimize:
        return optimize(gate, args.omega, params, bounds, budgets, rebit=args.rebit)[1]
    schedule = _fixed_schedule(args)
    if gate in CLIFFORD_GATES:
        if schedule.l_max != 0:
            raise InputError(f"{gate} takes a single --lambda and --d")
        lam, d = schedule.levels[0]
        result = overhead_clifford(budgets[gate], lam, d, args.omega, params)
        return result.model_copy(update={"budgets": budgets.label})
    if gate == "S_MAGIC":
        return overhead_magic_S(schedule, budgets, args.omega, params)
    return overhead_T(schedule, budgets, args.omega, params, rebit=args.rebit)


def run_overhead(args, config: Dict, renderer: BaseRenderer) -> int:
    params = cost_params_from_config(config)
    bounds = search_bounds(args, config)
    budgets = resolve_budgets(args.budgets, config)[0]
    if args.rebit and args.gate != "T":
        raise InputError("--rebit applies to the T gate only")
    if args.compare_magic_s and args.gate != "S":
        raise InputError("--compare-magic-s applies to the S gate only")
    result = evaluate_gate(args.gate, args, params, bounds, budgets)
    baseline = None
    if args.compare_magic_s:
        baseline_budgets = resolve_budgets(args.baseline_budgets, config)[0]
        baseline = optimize("S_MAGIC", args.omega, params, bounds, baseline_budgets)[1]
        _log_assumptions(baseline)
    _log_assumptions(result)
    print(renderer.overhead(result, baseline))
    if not result.feasible:
        logger.error("Overhead of %s at omega=%g overflows: the schedule cannot run this circuit",
                     result.gate, result.omega)
        return EXIT_FAILED
    return EXIT_OK


def run_sweep(args, config: Dict, renderer: BaseRenderer) -> int:
    params = cost_params_from_config(config)
    bounds = search_bounds(args, config)
    if args.rebit and args.gate != "T":
        raise InputError("--rebit applies to the T gate only")
    omegas = omega_grid(args.omega_min, args.omega_max, args.points)
    groups = {}
    for budgets in resolve_budgets(args.budgets, config, allow_both=True):
        logger.info("Sweeping %s with %s budgets over %d points", args.gate, budgets.label, len(omegas))
        groups[budgets.label] = sweep(args.gate, omegas, params, bounds, budgets, args.rebit, args.workers)
    SweepWriter().write(args.out, groups)
    print(renderer.sweep_summary(args.gate, groups, args.out))
    if not all(r.feasible for results in groups.values() for r in results):
        logger.error("Some sweep points overflow")
        return EXIT_FAILED
    return EXIT_OK


COMMANDS = {
    "lattice": run_lattice,
    "verify": run_verify,
    "catalog": run_catalog,
    "overhead": run_overhead,
    "sweep": run_sweep,
}


def main(argv: Optional[List[str]] = None) -> int:
    """Main application entry point; returns the process exit status."""
    parser = create_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as e:
        # argparse exits 2 on bad flags and 0 for --help/--version
        return e.code if isinstance(e.code, int) else EXIT_INPUT

    configure_logging(args.debug)

    try:
        config = load_config(args.config)
        renderer = get_renderer(args.format or config["output"].get("format", "text"))
        return COMMANDS[args.command](args, config, renderer)
    except InfeasibleScheduleError as e:
        logger.error("Infeasible schedule: %s", e)
        if args.debug:
            logger.exception("Traceback")
        return EXIT_FAILED
    except InputError as e:
        logger.error("%s", e)
        if args.debug:
            logger.exception("Traceback")
        return EXIT_INPUT
    except RHGError as e:
        logger.error("%s", e)
        return EXIT_INPUT


if __name__ == "__main__":
    sys.exit(main())
