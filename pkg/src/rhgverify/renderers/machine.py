"""Line-oriented key/value renderer for scripts.

Every record starts with a ``record=<kind>`` line followed by one
``key=value`` line per field; records are separated by a blank line. Values
run to the end of the line, so they may contain spaces.
"""

from typing import Dict, List, Optional, Sequence, Tuple

from ..complex import LatticeInfo
from ..errors import InputError
from ..models import OverheadResult
from ..overhead import summarize
from ..pattern import CircuitSpec
from ..verifier import VerificationReport
from .base import BaseRenderer, format_float, join_ints

Record = List[Tuple[str, str]]


def _clean(value) -> str:
    return " ".join(str(value).split())


def dump_records(records: Sequence[Record]) -> str:
    blocks = ["\n".join(f"{key}={_clean(value)}" for key, value in record) for record in records]
    return "\n\n".join(blocks)


def parse_records(text: str) -> List[Dict[str, str]]:
    """Read records back; repeated keys keep their last value."""
    records: List[Dict[str, str]] = []
    current: Optional[Dict[str, str]] = None
    for number, line in enumerate(text.splitlines(), start=1):
        if not line.strip():
            current = None
            continue
        key, sep, value = line.partition("=")
        if not sep:
            raise InputError(f"line {number}: expected key=value, got {line!r}")
        if key == "record":
            current = {"record": value}
            records.append(current)
        elif current is None:
            raise InputError(f"line {number}: field {key!r} outside a record")
        else:
            current[key] = value
    return records


def exit_code_for(records: Sequence[Dict[str, str]]) -> int:
    """Exit status implied by a machine report: 1 on any rejection or infeasibility."""
    for record in records:
        if record.get("record") == "target" and record.get("verdict") != "accepted":
            return 1
        if record.get("record") == "overhead" and record.get("feasible") != "true":
            return 1
    return 0


def _overhead_record(result: OverheadResult, kind: str = "overhead") -> Record:
    record: Record = [
        ("record", kind),
        ("gate", result.gate),
        ("omega", format_float(result.omega)),
        ("budgets", result.budgets or "-"),
        ("rebit", str(result.rebit).lower()),
        ("feasible", str(result.feasible).lower()),
        ("overhead", format_float(result.overhead)),
        ("l_max", str(result.schedule.l_max)),
        ("lambdas", join_ints(result.schedule.lambdas)),
        ("ds", join_ints(result.schedule.ds)),
        ("eps_A", format_float(result.eps_A)),
        ("eps_Y", format_float(result.eps_Y)),
    ]
    record.extend((f"breakdown.{key}", format_float(value)) for key, value in result.breakdown.items())
    record.extend(("assumption", note) for note in result.assumptions)
    return record


class MachineRenderer(BaseRenderer):
    """Key/value records; ``parse_records`` reads them back."""

    @property
    def format_name(self) -> str:
        return "machine"

    def lattice(self, info: LatticeInfo) -> str:
        return dump_records([[
            ("record", "lattice"),
            ("shape", "x".join(str(s) for s in info.shape)),
            ("m0", info.m0),
            ("m1", info.m1),
            ("m2", info.m2),
            ("m3", info.m3),
            ("d1", "x".join(str(s) for s in info.d1)),
            ("d2", "x".join(str(s) for s in info.d2)),
            ("d3", "x".join(str(s) for s in info.d3)),
        ]])

    def report(self, report: VerificationReport) -> str:
        records: List[Record] = [[
            ("record", "report"),
            ("name", report.name),
            ("shape", "x".join(str(s) for s in report.shape)),
            ("targets", len(report.results)),
            ("accepted", sum(r.accepted for r in report.results)),
            ("elapsed", f"{report.elapsed:.3f}"),
        ] + [("warning", w) for w in report.warnings]]
        for r in report.results:
            records.append([
                ("record", "target"),
                ("id", r.id),
                ("kind", r.kind.value),
                ("verdict", "accepted" if r.accepted else "rejected"),
                ("rank", r.rank),
                ("aug_rank", r.aug_rank),
                ("witness_size", "-" if r.witness_size is None else r.witness_size),
            ])
        return dump_records(records)

    def overhead(self, result: OverheadResult, baseline: Optional[OverheadResult] = None) -> str:
        records = [_overhead_record(result)]
        if baseline is not None:
            records.append(_overhead_record(baseline, kind="baseline"))
        return dump_records(records)

    def catalog(self, specs: Sequence[CircuitSpec]) -> str:
        return dump_records([
            [
                ("record", "circuit"),
                ("name", spec.name),
                ("shape", str(spec.pattern.shape)),
                ("targets", len(spec.targets)),
                ("gate", spec.metadata.get("gate", "-")),
            ]
            for spec in specs
        ])

    def sweep_summary(self, gate: str, groups: Dict[str, Sequence[OverheadResult]], path: str) -> str:
        records = []
        for label, results in groups.items():
            stats = summarize(results)
            records.append([
                ("record", "sweep"),
                ("gate", gate),
                ("budgets", label),
                ("points", len(results)),
                ("path", path),
                ("min_overhead", format_float(stats["min_overhead"])),
                ("max_overhead", format_float(stats["max_overhead"])),
            ])
        return dump_records(records)
