"""Data models for certificates, traces, instances and validation reports."""

from multicontract.models.certificate import (
    Certificate,
    ChatterjeaDomain,
    ClassRequest,
    ContractionClass,
)
from multicontract.models.instance import GenConfig, InstanceFile
from multicontract.models.trace import (
    OrbitTrace,
    Outcome,
    OutcomeKind,
    PolicyKind,
    SelectionPolicy,
    TraceBounds,
)
from multicontract.models.validation import (
    SweepSummary,
    TheoremId,
    ValidationOptions,
    ValidationReport,
    Verdict,
)

__all__ = [
    "Certificate",
    "ChatterjeaDomain",
    "ClassRequest",
    "ContractionClass",
    "GenConfig",
    "InstanceFile",
    "OrbitTrace",
    "Outcome",
    "OutcomeKind",
    "PolicyKind",
    "SelectionPolicy",
    "SweepSummary",
    "TheoremId",
    "TraceBounds",
    "ValidationOptions",
    "ValidationReport",
    "Verdict",
]
