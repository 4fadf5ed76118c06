"""Base report renderer class."""

from abc import ABC, abstractmethod
from typing import Dict, Optional, Sequence

from ..complex import LatticeInfo
from ..models import OverheadResult
from ..pattern import CircuitSpec
from ..verifier import VerificationReport


def format_float(value: Optional[float]) -> str:
    """Shortest round-trippable text for a float; ``-`` when absent."""
    if value is None:
        return "-"
    return repr(float(value))


def join_ints(values: Sequence[int]) -> str:
    return ";".join(str(v) for v in values)


class BaseRenderer(ABC):
    """Abstract base class for report renderers."""

    @property
    @abstractmethod
    def format_name(self) -> str:
        """Return the name used by ``--format``."""
        pass

    @abstractmethod
    def lattice(self, info: LatticeInfo) -> str:
        """Cell counts and boundary-matrix dimensions."""
        pass

    @abstractmethod
    def report(self, report: VerificationReport) -> str:
        """Per-target verdicts of one verification run."""
        pass

    @abstractmethod
    def overhead(self, result: OverheadResult, baseline: Optional[OverheadResult] = None) -> str:
        """One overhead result, optionally beside the magic-state S baseline."""
        pass

    @abstractmethod
    def catalog(self, specs: Sequence[CircuitSpec]) -> str:
        """Summary of the built-in circuits."""
        pass

    @abstractmethod
    def sweep_summary(self, gate: str, groups: Dict[str, Sequence[OverheadResult]], path: str) -> str:
        """Summary of a sweep written to ``path``, one group per budget set."""
        pass
