"""Theorem validation records.

CONCEPTUAL OVERVIEW:
===================

Each fixed-point result has the shape "hypothesis ⇒ conclusion". On a finite
instance both sides can be decided exactly:

1. HYPOTHESIS
   - Checked through certification (plus the period-2 and condition (i) gates)
   - When it fails the instance says nothing about the result: hypothesis_not_met

2. CONCLUSION
   - Checked through brute-force oracles that share no code with the main modules
   - Agreement between oracle and hypothesis is evidence, not tautology

3. VERDICT
   - COUNTEREXAMPLE exactly when the hypothesis held and the conclusion did not
   - Counterexample reports embed the instance so they can be replayed

Sweeps aggregate verdict counts so one can see how often a generator actually
exercises a result, instead of drawing confidence from vacuous passes.
"""

from enum import Enum

from pydantic import BaseModel, ConfigDict, Field, model_validator

from multicontract.models.certificate import Certificate, ChatterjeaDomain
from multicontract.models.instance import GenConfig, InstanceFile


class TheoremId(str, Enum):
    """Results validated by the harness."""

    T2_4_TWO_FIXED_POINTS = "T2_4_two_fixed_points"
    T3_5_PERIODIC_EXISTS = "T3_5_periodic_exists"
    C3_10_SINGLE_PERIMETER_IFF = "C3_10_single_perimeter_iff"
    C3_11_MULTI_PERIMETER_IFF = "C3_11_multi_perimeter_iff"
    T4_3_ORBITAL_FIXED = "T4_3_orbital_fixed"
    C4_4_ORBITAL_UNIQUE = "C4_4_orbital_unique"
    T5_4_KANNAN_FIXED = "T5_4_kannan_fixed"
    T6_4_CHATTERJEA_FIXED = "T6_4_chatterjea_fixed"
    C_BANACH_UNIQUE = "C_banach_unique"
    P3_3_DOWNWARD = "P3_3_downward"
    P3_4_UPWARD = "P3_4_upward"

    @property
    def single_valued_only(self) -> bool:
        return self in {
            TheoremId.T2_4_TWO_FIXED_POINTS,
            TheoremId.C3_10_SINGLE_PERIMETER_IFF,
            TheoremId.C_BANACH_UNIQUE,
            TheoremId.C4_4_ORBITAL_UNIQUE,
        }


class Verdict(str, Enum):
    VALIDATED = "validated"
    HYPOTHESIS_NOT_MET = "hypothesis_not_met"
    COUNTEREXAMPLE = "COUNTEREXAMPLE"


class ValidationOptions(BaseModel):
    """Theorem parameters.

    n is the total-pairwise order: the contracted order for T3_5 (default 3),
    the hypothesis order for P3_3 (default 4) and the base order m for P3_4
    (default 2). upper caps the orders P3_4 climbs to.
    """

    n: int | None = Field(None, ge=2)
    upper: int = Field(4, ge=3)
    chatterjea_domain: ChatterjeaDomain = ChatterjeaDomain.RESTRICTED
    tolerance: float | None = Field(None, ge=0.0)


class ValidationReport(BaseModel):
    """Outcome of checking one theorem on one instance."""

    model_config = ConfigDict(ser_json_inf_nan="constants")

    theorem: TheoremId
    options: ValidationOptions = Field(default_factory=ValidationOptions)
    hypothesis_held: bool
    conclusion_held: bool
    verdict: Verdict
    certificates: list[Certificate] = Field(default_factory=list)
    fixed_points: list[int] = Field(default_factory=list)
    periodic_points: dict[int, list[int]] = Field(default_factory=dict)
    notes: list[str] = Field(default_factory=list)
    instance: InstanceFile | None = None

    @model_validator(mode="after")
    def _verdict_consistent(self) -> "ValidationReport":
        expected = compose_verdict(self.hypothesis_held, self.conclusion_held)
        if self.verdict is not expected:
            raise ValueError(f"verdict {self.verdict.value} contradicts hypothesis/conclusion")
        return self

    def to_json_dict(self) -> dict[str, object]:
        return self.model_dump(mode="json", by_alias=True)


def compose_verdict(hypothesis_held: bool, conclusion_held: bool) -> Verdict:
    if not hypothesis_held:
        return Verdict.HYPOTHESIS_NOT_MET
    return Verdict.VALIDATED if conclusion_held else Verdict.COUNTEREXAMPLE


class SweepSummary(BaseModel):
    """Verdict counts over a batch of generated instances."""

    model_config = ConfigDict(ser_json_inf_nan="constants")

    theorem: TheoremId
    config: GenConfig | None = None
    seed: int = 0
    instance_count: int = 0
    validated: int = 0
    hypothesis_not_met: int = 0
    counterexamples: int = 0
    errors: int = 0
    reports: list[ValidationReport] = Field(
        default_factory=list, description="Counterexample reports only"
    )

    def add(self, report: ValidationReport) -> None:
        self.instance_count += 1
        if report.verdict is Verdict.VALIDATED:
            self.validated += 1
        elif report.verdict is Verdict.HYPOTHESIS_NOT_MET:
            self.hypothesis_not_met += 1
        else:
            self.counterexamples += 1
            self.reports.append(report)

    def to_json_dict(self) -> dict[str, object]:
        return self.model_dump(mode="json", by_alias=True)

    def to_report(self) -> str:
        exercised = self.validated + self.counterexamples
        rate = exercised / self.instance_count if self.instance_count else 0.0
        lines = [
            "=" * 80,
            f"THEOREM SWEEP: {self.theorem.value}",
            "=" * 80,
            f"\nInstances: {self.instance_count} (seed {self.seed})",
            f"Validated: {self.validated}",
            f"Hypothesis not met: {self.hypothesis_not_met}",
            f"Counterexamples: {self.counterexamples}",
            f"Errors: {self.errors}",
            f"Hypothesis rate: {rate:.2%}",
        ]
        if self.reports:
            lines.append(f"\n{'-' * 80}")
            lines.append(f"COUNTEREXAMPLES ({len(self.reports)})")
            lines.append(f"{'-' * 80}")
            for idx, report in enumerate(self.reports[:10], 1):
                size = report.instance.space.point_count if report.instance else "?"
                lines.append(f"\n{idx}. {size}-point instance, fixed points {report.fixed_points}")
                for note in report.notes:
                    lines.append(f"   {note}")
            if len(self.reports) > 10:
                lines.append(f"\n... and {len(self.reports) - 10} more counterexamples")
        lines.append(f"\n{'=' * 80}")
        return "\n".join(lines)
