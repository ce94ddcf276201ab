"""Contraction classes and certification results."""

from enum import Enum

from pydantic import BaseModel, ConfigDict, Field


class ContractionClass(str, Enum):
    """Contraction classes a map can be certified into.

    BANACH: δ(Tx,Ty) ≤ α d(x,y) over distinct pairs
    PERIMETER: δ-perimeter of distinct triples shrinks by α
    TOTAL_PAIRWISE: S over n distinct points shrinks by α
    ORBITAL: generalized orbital triangular contraction
    KANNAN: orbital Kannan variant, constant below 2/3
    CHATTERJEA: orbital Chatterjea variant, constant in (0, 1/2)
    """

    BANACH = "banach"
    PERIMETER = "perimeter"
    TOTAL_PAIRWISE = "total_pairwise"
    ORBITAL = "orbital"
    KANNAN = "kannan"
    CHATTERJEA = "chatterjea"

    @property
    def admissible_sup(self) -> float:
        """Supremum of the admissible constants (exclusive)."""
        if self is ContractionClass.KANNAN:
            return 2 / 3
        if self is ContractionClass.CHATTERJEA:
            return 1 / 2
        return 1.0

    @property
    def strict_positive_lower(self) -> bool:
        """Only the Chatterjea range (0, 1/2) excludes zero."""
        return self is ContractionClass.CHATTERJEA


class ChatterjeaDomain(str, Enum):
    """Pair domain used for the Chatterjea inequality.

    RESTRICTED: x ≠ y, x ∉ Tx, y ∉ Tx (same as Kannan)
    UNRESTRICTED: every ordered pair, x = y included
    """

    RESTRICTED = "restricted"
    UNRESTRICTED = "unrestricted"


class Certificate(BaseModel):
    """Outcome of an exhaustive contraction-class check.

    tightest is the smallest admissible constant over the scanned domain:
    None when the domain is empty, +inf when some tuple has RHS = 0 < LHS.
    """

    model_config = ConfigDict(populate_by_name=True, ser_json_inf_nan="constants")

    class_id: ContractionClass = Field(..., alias="class")
    order: int | None = Field(None, description="n for total pairwise scans")
    distinct_points: int | None = Field(
        None, description="Exact number of distinct points per tuple for multiset scans"
    )
    include_degenerate: bool = False
    chatterjea_domain: ChatterjeaDomain | None = None
    tightest: float | None
    admissible_sup: float
    strict_positive_lower: bool = False
    certified: bool
    witness: tuple[int, ...] | None = None
    tuples_examined: int = 0
    skipped_zero_zero: int = 0
    domain_empty: bool = False
    disqualified: bool = False
    below_cardinality_bound: bool = False

    @property
    def label(self) -> str:
        if self.class_id is ContractionClass.TOTAL_PAIRWISE:
            suffix = f"(n={self.order}"
            if self.distinct_points is not None:
                suffix += f", k={self.distinct_points}"
            return f"{self.class_id.value}{suffix})"
        return self.class_id.value

    def outcome(self) -> dict[str, object]:
        """Fields that depend only on the scan, not on which class was requested."""
        return self.model_dump(
            include={
                "tightest",
                "certified",
                "witness",
                "tuples_examined",
                "skipped_zero_zero",
                "domain_empty",
                "disqualified",
            }
        )

    def to_json_dict(self) -> dict[str, object]:
        return self.model_dump(mode="json", by_alias=True)

    def to_report(self) -> str:
        """One line per certificate for terminal tables."""
        if self.domain_empty:
            tightest = "empty domain"
        elif self.tightest is None:
            tightest = "-"
        else:
            tightest = f"{self.tightest:.6g}"
        verdict = "CERTIFIED" if self.certified else "not certified"
        witness = "-" if self.witness is None else ",".join(str(w) for w in self.witness)
        note = "  (below |X| > 3)" if self.below_cardinality_bound else ""
        return (
            f"{self.label:<26} tightest={tightest:<14} sup={self.admissible_sup:.4g}  "
            f"{verdict:<14} witness=({witness})  tuples={self.tuples_examined}{note}"
        )


class ClassRequest(BaseModel):
    """One class to certify, with its scan options."""

    model_config = ConfigDict(frozen=True, populate_by_name=True)

    class_id: ContractionClass = Field(..., alias="class")
    order: int | None = Field(None, ge=2)
    distinct_points: int | None = Field(None, ge=1)
    include_degenerate: bool = False
    chatterjea_domain: ChatterjeaDomain = ChatterjeaDomain.RESTRICTED
