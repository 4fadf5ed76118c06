"""Human-readable report renderer."""

from typing import Dict, List, Optional, Sequence

from ..complex import LatticeInfo
from ..models import OverheadResult
from ..overhead import summarize
from ..pattern import CircuitSpec
from ..verifier import VerificationReport
from .base import BaseRenderer


def _dims(shape) -> str:
    return f"{shape[0]} x {shape[1]}"


def _schedule(result: OverheadResult) -> str:
    levels = ", ".join(f"(lambda={lam}, d={d})" for lam, d in result.schedule.levels)
    return f"l_max={result.schedule.l_max}: {levels}"


class TextRenderer(BaseRenderer):
    """Plain text for terminals."""

    @property
    def format_name(self) -> str:
        return "text"

    def lattice(self, info: LatticeInfo) -> str:
        shape = "x".join(str(s) for s in info.shape)
        return "\n".join([
            f"Lattice {shape}",
            f"  cells: m0={info.m0} m1={info.m1} m2={info.m2} m3={info.m3}",
            f"  d1 (vertices x edges): {_dims(info.d1)}",
            f"  d2 (edges x faces):    {_dims(info.d2)}",
            f"  d3 (faces x cubes):    {_dims(info.d3)}",
        ])

    def report(self, report: VerificationReport) -> str:
        shape = "x".join(str(s) for s in report.shape)
        lines = [f"Circuit {report.name} on a {shape} lattice"]
        for warning in report.warnings:
            lines.append(f"  warning: {warning}")
        for r in report.results:
            verdict = "ACCEPTED" if r.accepted else "REJECTED"
            line = f"  [{verdict}] {r.id} ({r.kind.value}) rank {r.rank}, augmented {r.aug_rank}"
            if r.description:
                line += f"  {r.description}"
            lines.append(line)
            if r.witness is not None:
                lines.append(f"    witness: {r.witness_size} cells")
                lines.extend(f"      {cell.to_text()}" for cell in r.witness)
        accepted = sum(r.accepted for r in report.results)
        lines.append(f"{accepted}/{len(report.results)} targets accepted in {report.elapsed:.2f}s")
        return "\n".join(lines)

    def overhead(self, result: OverheadResult, baseline: Optional[OverheadResult] = None) -> str:
        lines = self._overhead_lines(result)
        if baseline is not None:
            lines.append("")
            lines.append("Magic-state S baseline (extrapolated):")
            lines.extend(f"  {line}" for line in self._overhead_lines(baseline))
            if baseline.feasible and result.feasible:
                lines.append(f"Baseline / {result.gate}: {baseline.overhead / result.overhead:.3g}")
        return "\n".join(lines)

    def _overhead_lines(self, result: OverheadResult) -> List[str]:
        label = f" [{result.budgets}]" if result.budgets else ""
        lines = [
            f"{result.gate}{label} at omega={result.omega:g}",
            f"  schedule: {_schedule(result)}",
            f"  overhead: {result.overhead:.6g} operations per gate",
        ]
        if result.eps_A is not None:
            lines.append(f"  eps_A: {result.eps_A:.6g}")
        if result.eps_Y is not None:
            lines.append(f"  eps_Y: {result.eps_Y:.6g}")
        for key, value in result.breakdown.items():
            lines.append(f"  {key}: {value:.6g}")
        if result.assumptions:
            lines.append("  assumptions:")
            lines.extend(f"    - {note}" for note in result.assumptions)
        return lines

    def catalog(self, specs: Sequence[CircuitSpec]) -> str:
        lines = []
        for spec in specs:
            gate = spec.metadata.get("gate", "")
            lines.append(f"{spec.name:<16} {str(spec.pattern.shape):<8} {len(spec.targets):>2} targets  {gate}")
        return "\n".join(lines)

    def sweep_summary(self, gate: str, groups: Dict[str, Sequence[OverheadResult]], path: str) -> str:
        lines = [f"Sweep of {gate} written to {path}"]
        for label, results in groups.items():
            stats = summarize(results)
            lines.append(
                f"  {label}: {len(results)} points, overhead "
                f"{stats['min_overhead']:.4g} .. {stats['max_overhead']:.4g}"
            )
        return "\n".join(lines)
