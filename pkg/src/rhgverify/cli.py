"""Command line interface for rhgverify."""

import argparse
import importlib.metadata
import logging

logger = logging.getLogger(__name__)

GATES = ["CNOT", "H", "S", "T", "S_MAGIC"]


def get_version():
    """Get version from package metadata."""
    try:
        return importlib.metadata.version("rhgverify")
    except importlib.metadata.PackageNotFoundError:
        return "unknown"


def _gate(value: str) -> str:
    gate = value.upper()
    if gate not in GATES:
        raise argparse.ArgumentTypeError(f"unknown gate {value!r}; choose from {', '.join(GATES)}")
    return gate


def create_parser():
    """Create and configure the argument parser."""
    parser = argparse.ArgumentParser(
        prog="rhgverify",
        description="Verify Z-measurement patterns on the RHG cluster state and estimate gate overheads",
        formatter_class=argparse.RawDescriptionHelpFormatter,
        epilog="""
Examples:
  rhgverify lattice info --shape 3 3 3          # Cell counts and boundary matrix sizes
  rhgverify verify circuit.rhg --witness        # Verify a circuit file, print surfaces
  rhgverify verify --catalog cnot               # Verify a built-in circuit
  rhgverify verify --catalog cnot --corrupt 1   # Negative control: drop the first measured cell
  rhgverify catalog list                        # Built-in circuits
  rhgverify catalog export identity             # Circuit file of a built-in circuit
  rhgverify overhead S --omega 1e8 --optimize   # Cheapest topological S gate
  rhgverify overhead T --omega 1e8 --optimize --budgets naive
  rhgverify overhead T --omega 1e8 --lambda 10 14 --d 4 6
  rhgverify sweep T --omega-min 1e6 --omega-max 1e10 --points 20 --budgets both --out t.csv
        """,
    )

    parser.add_argument("-v", "--version", action="version", version=f"%(prog)s {get_version()}")
    # shared by every subcommand so the flags may follow it
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("-d", "--debug", action="store_true", help="Enable debug logging.")
    common.add_argument("--config", metavar="PATH", help="Configuration file (default: user config dir).")
    common.add_argument("--format", choices=["text", "machine"],
                        help="Report format (default from config, else text).")

    commands = parser.add_subparsers(dest="command", metavar="COMMAND")
    commands.required = True

    # lattice info
    lattice = commands.add_parser("lattice", help="Inspect a lattice.")
    lattice_commands = lattice.add_subparsers(dest="lattice_command", metavar="ACTION")
    lattice_commands.required = True
    info = lattice_commands.add_parser("info", parents=[common], help="Print cell counts and boundary matrix dimensions.")
    info.add_argument("--shape", nargs=3, type=int, required=True, metavar=("S1", "S2", "S3"),
                      help="Lattice side lengths.")

    # verify
    verify = commands.add_parser("verify", parents=[common], help="Check the targets of a circuit.")
    source = verify.add_mutually_exclusive_group(required=True)
    source.add_argument("file", nargs="?", help="Circuit file.")
    source.add_argument("--catalog", metavar="NAME", help="Use a built-in circuit instead of a file.")
    verify.add_argument("--witness", action="store_true", help="Print a surface for every accepted target.")
    verify.add_argument("--corrupt", type=int, metavar="N",
                        help="Test hook: un-measure the N-th measured cell before verifying.")
    verify.add_argument("--workers", type=int, metavar="N",
                        help="Worker threads (default: RHG_THREADS, else all CPUs).")

    # catalog
    catalog = commands.add_parser("catalog", help="Built-in circuits.")
    catalog_commands = catalog.add_subparsers(dest="catalog_command", metavar="ACTION")
    catalog_commands.required = True
    catalog_commands.add_parser("list", parents=[common], help="List the built-in circuits.")
    export = catalog_commands.add_parser("export", parents=[common], help="Print a built-in circuit in the file format.")
    export.add_argument("name", help="Catalog entry.")
    export.add_argument("--out", metavar="PATH", help="Write to a file instead of stdout.")

    # overhead
    overhead = commands.add_parser("overhead", parents=[common], help="Overhead of one gate.")
    overhead.add_argument("gate", type=_gate, help=f"Gate: {', '.join(GATES)}.")
    overhead.add_argument("--omega", type=float, required=True, help="Number of gates in the circuit.")
    overhead.add_argument("--optimize", action="store_true", help="Search the cheapest schedule.")
    overhead.add_argument("--lambda", dest="lambdas", type=int, nargs="+", metavar="L",
                          help="Scale factor per level (lambda_0 .. lambda_lmax).")
    overhead.add_argument("--d", dest="ds", type=int, nargs="+", metavar="D",
                          help="Defect circumference per level.")
    overhead.add_argument("--lambda-max", type=int, help="Optimizer bound on lambda.")
    overhead.add_argument("--d-max", type=int, help="Optimizer bound on d.")
    overhead.add_argument("--levels", type=int, metavar="N", help="Optimizer bound on distillation levels.")
    overhead.add_argument("--rebit", action="store_true", help="T gate in the rebit encoding.")
    overhead.add_argument("--budgets", default="compact", metavar="SET",
                          help="Budget set: naive, compact or a TOML budget file (default: compact).")
    overhead.add_argument("--compare-magic-s", action="store_true",
                          help="Also show the extrapolated magic-state S baseline (S gate only).")
    overhead.add_argument("--baseline-budgets", default="naive", metavar="SET",
                          help="Budget set of the magic-state S baseline (default: naive).")

    # sweep
    sweep = commands.add_parser("sweep", parents=[common], help="Optimized overhead over a range of circuit sizes.")
    sweep.add_argument("gate", type=_gate, help=f"Gate: {', '.join(GATES)}.")
    sweep.add_argument("--omega-min", type=float, default=1e6, help="Smallest circuit size (default: 1e6).")
    sweep.add_argument("--omega-max", type=float, default=1e10, help="Largest circuit size (default: 1e10).")
    sweep.add_argument("--points", type=int, default=20, help="Number of log-spaced points (default: 20).")
    sweep.add_argument("--out", default="sweep.csv", metavar="PATH", help="CSV file (default: sweep.csv).")
    sweep.add_argument("--budgets", default="compact", metavar="SET",
                       help="Budget set: naive, compact, both or a TOML budget file.")
    sweep.add_argument("--rebit", action="store_true", help="T gate in the rebit encoding.")
    sweep.add_argument("--lambda-max", type=int, help="Optimizer bound on lambda.")
    sweep.add_argument("--d-max", type=int, help="Optimizer bound on d.")
    sweep.add_argument("--levels", type=int, metavar="N", help="Optimizer bound on distillation levels.")
    sweep.add_argument("--workers", type=int, metavar="N",
                       help="Worker threads (default: RHG_THREADS, else all CPUs).")

    return parser


def configure_logging(debug: bool = False):
    """Configure logging based on debug flag."""
    level = logging.DEBUG if debug else logging.INFO
    logging.basicConfig(level=level, format="%(levelname)s: %(message)s")
    logger.setLevel(level)
