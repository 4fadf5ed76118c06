"""Pydantic models for the fault-tolerance cost model."""

import math
from enum import Enum
from typing import Dict, List, Literal, Optional, Tuple

from pydantic import BaseModel, ConfigDict, Field, ValidationError, field_validator, model_validator

from .errors import InputError


class Species(str, Enum):
    """Magic states that are distilled."""
    A = "A"
    Y = "Y"


class GateBudget(BaseModel):
    """Unit-cell volume and total Z-line length of a gate."""

    model_config = ConfigDict(frozen=True)

    name: str = Field(..., description="Gate or sub-circuit name")
    V: float = Field(..., description="Volume in unit cells")
    L: float = Field(..., description="Total defect-line length in unit cells")

    @field_validator("V", "L")
    @classmethod
    def at_least_one(cls, v: float) -> float:
        if not v >= 1:
            raise ValueError(f"gate volume and length must be at least 1, got {v}")
        return v


# Volumes and lengths per gate. The two distillation sets differ only in the
# A and Y circuits.
CLIFFORD_BUDGETS = {
    "CNOT": (12, 22),
    "H": (6, 6),
    "S": (48, 48),
    "T": (2, 3),
    "T_RE": (89, 89),
    "S_MAGIC": (2, 3),
}
DISTILLATION_BUDGETS = {
    "naive": {"A": (336, 362), "Y": (120, 120)},
    "compact": {"A": (192, 288), "Y": (70, 105)},
}


class BudgetSet(BaseModel):
    """A complete table of gate budgets under one label."""

    model_config = ConfigDict(frozen=True)

    label: str = Field(..., description="Name of the distillation budget set")
    gates: Dict[str, GateBudget] = Field(default_factory=dict)

    def __getitem__(self, name: str) -> GateBudget:
        try:
            return self.gates[name.upper()]
        except KeyError:
            raise InputError(f"no budget for gate {name!r} in set {self.label}") from None

    def __hash__(self) -> int:
        return hash((self.label, tuple(sorted(self.gates.items()))))

    @classmethod
    def builtin(cls, label: str) -> "BudgetSet":
        if label not in DISTILLATION_BUDGETS:
            raise InputError(f"unknown budget set {label!r}; choose from {', '.join(DISTILLATION_BUDGETS)}")
        table = dict(CLIFFORD_BUDGETS)
        table.update(DISTILLATION_BUDGETS[label])
        return cls(label=label, gates={k: GateBudget(name=k, V=v, L=l) for k, (v, l) in table.items()})

    def with_overrides(self, overrides: Dict[str, Dict[str, float]], label: Optional[str] = None) -> "BudgetSet":
        """Replace V and/or L of selected gates, e.g. from a ``[budgets.<gate>]`` table."""
        gates = dict(self.gates)
        for name, values in overrides.items():
            key = name.upper()
            base = gates.get(key)
            merged = {"name": key, "V": base.V if base else None, "L": base.L if base else None}
            merged.update({k: v for k, v in values.items() if k in ("V", "L")})
            try:
                gates[key] = GateBudget(**merged)
            except ValidationError as e:
                raise InputError(f"budget override for {key}: {e.errors()[0]['msg']}") from e
        return BudgetSet(label=label or self.label, gates=gates)


class CostParams(BaseModel):
    """Physical and accounting constants of the cost model."""

    model_config = ConfigDict(frozen=True)

    kappa: float = Field(0.93, description="Decay constant of topological errors")
    ops_per_cell: float = Field(24.0, description="Elementary operations per unit cell")
    eps0_A: float = Field(0.0134, description="Infidelity of an injected |A> state")
    eps0_Y: Optional[float] = Field(None, description="Infidelity of an injected |Y> state; defaults to eps0_A")
    injection_volume: float = Field(1.0, description="Unit cells used by one state injection")
    plain_t_coefficient: float = Field(36.0, description="Coefficient of lambda^3 V_T in the plain T gate")
    a_error_length: Literal["L_Y", "L_A"] = Field(
        "L_Y", description="Line length feeding the topological error of an A level"
    )

    @field_validator("eps0_Y", mode="before")
    @classmethod
    def blank_means_default(cls, v):
        if v == "" or v is None:
            return None
        return v

    @field_validator("kappa", "ops_per_cell", "injection_volume", "plain_t_coefficient")
    @classmethod
    def positive(cls, v: float) -> float:
        if not v > 0:
            raise ValueError(f"must be positive, got {v}")
        return v

    @field_validator("eps0_A", "eps0_Y")
    @classmethod
    def probability(cls, v: Optional[float]) -> Optional[float]:
        if v is not None and not 0 <= v < 1:
            raise ValueError(f"an infidelity must lie in [0, 1), got {v}")
        return v

    @property
    def eps0_Y_value(self) -> float:
        return self.eps0_A if self.eps0_Y is None else self.eps0_Y

    def assumptions(self) -> List[str]:
        """Modelling choices that change results, for report ledgers."""
        notes = [
            f"raw state injection costs ops_per_cell * lambda_0^3 * {self.injection_volume:g}",
            f"A-level error uses epsilon_topo({self.a_error_length}); the A cost denominator uses L_A",
        ]
        if self.eps0_Y is None:
            notes.append(f"eps0_Y not given; using eps0_A = {self.eps0_A:g}")
        if self.plain_t_coefficient != 36:
            notes.append(f"plain T coefficient normalized to {self.plain_t_coefficient:g} (default 36)")
        return notes


class SearchBounds(BaseModel):
    """Integer grid searched by the optimizer."""

    model_config = ConfigDict(frozen=True)

    lambda_max: int = Field(60, description="Largest scale factor lambda")
    d_max: int = Field(15, description="Largest defect circumference d")
    l_cap: int = Field(3, description="Largest number of distillation levels")

    @model_validator(mode="after")
    def check_ranges(self) -> "SearchBounds":
        if self.d_max < 1:
            raise ValueError(f"d_max must be at least 1, got {self.d_max}")
        if self.lambda_max < 2:
            raise ValueError(f"lambda_max must be at least 2, got {self.lambda_max}")
        if self.l_cap < 0:
            raise ValueError(f"l_cap must be nonnegative, got {self.l_cap}")
        return self

    def pairs(self) -> List[Tuple[int, int]]:
        """All (lambda, d) with 1 <= d <= d_max and d < lambda <= lambda_max, lambda-major."""
        return [
            (lam, d)
            for lam in range(2, self.lambda_max + 1)
            for d in range(1, min(self.d_max, lam - 1) + 1)
        ]


class DistillationSchedule(BaseModel):
    """Scale parameters (lambda_l, d_l) for levels l = 0..l_max."""

    model_config = ConfigDict(frozen=True)

    levels: Tuple[Tuple[int, int], ...] = Field(..., description="(lambda, d) per level")

    @field_validator("levels")
    @classmethod
    def check_levels(cls, v):
        if not v:
            raise ValueError("a schedule needs at least one level")
        for lam, d in v:
            if d < 1:
                raise ValueError(f"d must be at least 1, got {d}")
            if lam <= d:
                raise ValueError(f"lambda must exceed d, got lambda={lam}, d={d}")
        return v

    @classmethod
    def of(cls, levels) -> "DistillationSchedule":
        try:
            return cls(levels=tuple(tuple(level) for level in levels))
        except ValidationError as e:
            raise InputError(f"invalid schedule: {e.errors()[0]['msg']}") from e

    @property
    def l_max(self) -> int:
        return len(self.levels) - 1

    @property
    def lambdas(self) -> List[int]:
        return [lam for lam, _ in self.levels]

    @property
    def ds(self) -> List[int]:
        return [d for _, d in self.levels]

    @property
    def lambda_sum(self) -> int:
        return sum(self.lambdas)


class DistillationLevel(BaseModel):
    """Error rate and expected cost of one distilled state at a level."""

    level: int
    eps: float
    overhead: float


class OverheadResult(BaseModel):
    """Expected operations per gate with its breakdown and assumption ledger."""

    gate: str
    omega: float = Field(..., description="Number of gates in the circuit")
    schedule: DistillationSchedule
    budgets: str = Field("", description="Label of the budget set used")
    rebit: bool = False
    eps_A: Optional[float] = None
    eps_Y: Optional[float] = None
    overhead: float = Field(..., description="Expected elementary operations per gate")
    breakdown: Dict[str, float] = Field(default_factory=dict)
    assumptions: List[str] = Field(default_factory=list)

    @property
    def feasible(self) -> bool:
        return math.isfinite(self.overhead)
