"""Picard iteration records."""

from enum import Enum

from pydantic import BaseModel, ConfigDict, Field, model_validator

from multicontract.models.certificate import ContractionClass


class PolicyKind(str, Enum):
    """How one member of T(x) is picked at each Picard step."""

    FIRST_INDEX = "first_index"
    NEAREST = "nearest"
    FARTHEST = "farthest"
    SEEDED_RANDOM = "seeded_random"


class SelectionPolicy(BaseModel):
    """Selection rule for x_{i+1} ∈ T(x_i); ties go to the smallest index."""

    model_config = ConfigDict(frozen=True, extra="forbid")

    kind: PolicyKind = PolicyKind.FIRST_INDEX
    seed: int | None = Field(None, description="Required for seeded_random")

    @model_validator(mode="after")
    def _seed_matches_kind(self) -> "SelectionPolicy":
        if self.kind is PolicyKind.SEEDED_RANDOM and self.seed is None:
            raise ValueError("seeded_random policy needs a seed")
        if self.kind is not PolicyKind.SEEDED_RANDOM and self.seed is not None:
            raise ValueError(f"{self.kind.value} policy takes no seed")
        return self

    @property
    def deterministic(self) -> bool:
        return self.kind is not PolicyKind.SEEDED_RANDOM


class OutcomeKind(str, Enum):
    FIXED_POINT = "fixed_point"
    CYCLE = "cycle"
    STEP_LIMIT = "step_limit"


class Outcome(BaseModel):
    """How an iteration ended.

    fixed_point carries the point; cycle carries start index and length.
    """

    model_config = ConfigDict(frozen=True)

    kind: OutcomeKind
    point: int | None = None
    start: int | None = None
    length: int | None = None


class TraceBounds(BaseModel):
    """A priori bounds and proof-chain diagnostics attached to a certified trace."""

    class_id: ContractionClass
    order: int | None = None
    constant: float
    rate: float
    p: float
    a_priori: list[float] = Field(default_factory=list, description="Bound at each n")
    distance_to_terminal: list[float] | None = None
    chain: list[float | None] = Field(
        default_factory=list, description="Contracted quantity per index; None outside the domain"
    )
    chain_violations: list[int] = Field(default_factory=list)
    bound_violations: list[int] = Field(default_factory=list)


class OrbitTrace(BaseModel):
    """Record of one Picard iteration run."""

    points: list[int]
    step_dists: list[float]
    outcome: Outcome
    steps_taken: int
    policy: SelectionPolicy
    bounds: TraceBounds | None = None

    @property
    def terminal(self) -> int:
        return self.points[-1]

    def to_report(self) -> str:
        lines = [
            "=" * 60,
            "PICARD TRACE",
            "=" * 60,
            f"Policy: {self.policy.kind.value}"
            + (f" (seed {self.policy.seed})" if self.policy.seed is not None else ""),
            f"Steps: {self.steps_taken}",
            f"Orbit: {' -> '.join(str(p) for p in self.points)}",
        ]
        outcome = self.outcome
        if outcome.kind is OutcomeKind.FIXED_POINT:
            lines.append(f"Outcome: fixed point {outcome.point}")
        elif outcome.kind is OutcomeKind.CYCLE:
            lines.append(f"Outcome: cycle from index {outcome.start}, length {outcome.length}")
        else:
            lines.append("Outcome: step limit reached")

        if self.bounds is not None:
            b = self.bounds
            lines.append(f"\n{'-' * 60}")
            lines.append(
                f"Bounds for {b.class_id.value}: constant={b.constant:.6g} "
                f"rate={b.rate:.6g} p={b.p:.6g}"
            )
            for n, bound in enumerate(b.a_priori):
                observed = ""
                if b.distance_to_terminal is not None and n < len(b.distance_to_terminal):
                    observed = f"  observed={b.distance_to_terminal[n]:.6g}"
                lines.append(f"  n={n:<4} bound={bound:.6g}{observed}")
            lines.append(
                f"Chain violations: {len(b.chain_violations)}  "
                f"Bound violations: {len(b.bound_violations)}"
            )
        lines.append("=" * 60)
        return "\n".join(lines)
