"""Hypothesis and conclusion checks for each validated result.

Hypotheses go through the certification module; conclusions go through the
brute-force oracles. Each checker returns (hypothesis_held, conclusion_held)
and appends its certificates and notes to a shared _Evidence record.
"""

import logging
from collections.abc import Callable
from dataclasses import dataclass, field

from multicontract.certification import (
    certify_banach,
    certify_chatterjea,
    certify_kannan,
    certify_orbital,
    certify_perimeter,
    certify_total_pairwise,
    condition_i,
    no_period2,
)
from multicontract.config import resolve_tolerance
from multicontract.errors import PreconditionError
from multicontract.mappings import MultiMap, SingleMap, check_fits, lift_single
from multicontract.metric import MetricSpace
from multicontract.models.certificate import Certificate
from multicontract.models.instance import InstanceFile
from multicontract.models.validation import (
    TheoremId,
    ValidationOptions,
    ValidationReport,
    Verdict,
    compose_verdict,
)
from multicontract.validation.oracle import brute_fixed_points, brute_periodic

logger = logging.getLogger(__name__)

DEFAULT_ORDERS = {
    TheoremId.T3_5_PERIODIC_EXISTS: 3,
    TheoremId.P3_3_DOWNWARD: 4,
    TheoremId.P3_4_UPWARD: 2,
}


class CardinalityError(PreconditionError):
    """The instance is smaller than the result requires."""

    def __init__(self, theorem: TheoremId, required: str, actual: int) -> None:
        self.theorem = theorem
        self.required = required
        self.actual = actual
        super().__init__(f"{theorem.value} requires |X| {required}, instance has {actual} points")

    def __reduce__(self) -> tuple[type, tuple[TheoremId, str, int]]:
        return type(self), (self.theorem, self.required, self.actual)


@dataclass
class _Evidence:
    space: MetricSpace
    T: MultiMap
    options: ValidationOptions
    order: int | None
    fixed: set[int]
    periodic: dict[int, set[int]]
    single: SingleMap | None = None
    certificates: list[Certificate] = field(default_factory=list)
    notes: list[str] = field(default_factory=list)

    @property
    def tolerance(self) -> float:
        return resolve_tolerance(self.options.tolerance)

    def keep(self, certificate: Certificate) -> Certificate:
        self.certificates.append(certificate)
        if not certificate.certified:
            self.notes.append(f"{certificate.label} not certified (tightest {certificate.tightest})")
        return certificate

    def period2_free(self) -> bool:
        free = no_period2(self.T)
        if not free:
            self.notes.append(f"prime period 2 points: {sorted(self.periodic.get(2, set()))}")
        return free


def _cardinality(theorem: TheoremId, size: int, order: int | None) -> None:
    if theorem is TheoremId.T2_4_TWO_FIXED_POINTS:
        if size <= 3:
            raise CardinalityError(theorem, "> 3", size)
    elif theorem in (TheoremId.C3_10_SINGLE_PERIMETER_IFF, TheoremId.C3_11_MULTI_PERIMETER_IFF):
        if size < 3:
            raise CardinalityError(theorem, "≥ 3", size)
    elif theorem in (TheoremId.T3_5_PERIODIC_EXISTS, TheoremId.P3_3_DOWNWARD):
        assert order is not None
        if size < order:
            raise CardinalityError(theorem, f"≥ {order}", size)
    elif theorem is TheoremId.P3_4_UPWARD:
        assert order is not None
        if size <= order:
            raise CardinalityError(theorem, f"> {order}", size)
    elif size < 2:
        raise CardinalityError(theorem, "≥ 2", size)


def _two_fixed_points(ev: _Evidence) -> tuple[bool, bool]:
    cert = ev.keep(certify_perimeter(ev.space, ev.T, tolerance=ev.tolerance))
    hypothesis = cert.certified
    if ev.single is not None and not condition_i(ev.single):
        ev.notes.append("condition (i) fails: some x ≠ Tx has T(Tx) = x")
        hypothesis = False
    return hypothesis, 1 <= len(ev.fixed) <= 2


def _periodic_exists(ev: _Evidence) -> tuple[bool, bool]:
    assert ev.order is not None
    cert = ev.keep(certify_total_pairwise(ev.space, ev.T, ev.order, tolerance=ev.tolerance))
    found = [k for k in range(1, ev.order) if ev.periodic.get(k)]
    if found:
        ev.notes.append(f"prime periods present below {ev.order}: {found}")
    return cert.certified, bool(found)


def _perimeter_iff(ev: _Evidence) -> tuple[bool, bool]:
    cert = ev.keep(certify_perimeter(ev.space, ev.T, tolerance=ev.tolerance))
    has_fixed = bool(ev.fixed)
    has_period2 = bool(ev.periodic.get(2))
    return cert.certified, has_fixed == (not has_period2)


def _orbit_fixed(certifier: Callable[[_Evidence], Certificate]) -> Callable[[_Evidence], tuple[bool, bool]]:
    def check(ev: _Evidence) -> tuple[bool, bool]:
        cert = ev.keep(certifier(ev))
        return cert.certified and ev.period2_free(), bool(ev.fixed)

    return check


def _orbital_unique(ev: _Evidence) -> tuple[bool, bool]:
    cert = ev.keep(certify_orbital(ev.space, ev.T, tolerance=ev.tolerance))
    return cert.certified and ev.period2_free(), len(ev.fixed) == 1


def _banach_unique(ev: _Evidence) -> tuple[bool, bool]:
    cert = ev.keep(certify_banach(ev.space, ev.T, tolerance=ev.tolerance))
    return cert.certified, len(ev.fixed) == 1


def _downward(ev: _Evidence) -> tuple[bool, bool]:
    """Multiset scans at (n, k) for every k < n against the distinct scans at k."""
    n = ev.order
    assert n is not None
    if n < 3:
        raise PreconditionError(f"downward closure needs n ≥ 3, got {n}")

    hypothesis = True
    constants: dict[int, float] = {}
    for k in range(2, n):
        cert = ev.keep(
            certify_total_pairwise(ev.space, ev.T, n, distinct_points=k, tolerance=ev.tolerance)
        )
        hypothesis = hypothesis and cert.certified
        if cert.tightest is not None:
            constants[k] = cert.tightest

    conclusion = True
    for k, bound in constants.items():
        cert = ev.keep(certify_total_pairwise(ev.space, ev.T, k, tolerance=ev.tolerance))
        tightest = cert.tightest if cert.tightest is not None else 0.0
        if not cert.certified or tightest > bound + ev.tolerance:
            ev.notes.append(f"order {k}: tightest {tightest} exceeds the order-{n} constant {bound}")
            conclusion = False
    return hypothesis, conclusion


def _upward(ev: _Evidence) -> tuple[bool, bool]:
    m = ev.order
    assert m is not None
    base = ev.keep(certify_total_pairwise(ev.space, ev.T, m, tolerance=ev.tolerance))
    bound = base.tightest if base.tightest is not None else 0.0

    conclusion = True
    for order in range(m + 1, min(ev.options.upper, ev.space.point_count) + 1):
        cert = ev.keep(certify_total_pairwise(ev.space, ev.T, order, tolerance=ev.tolerance))
        tightest = cert.tightest if cert.tightest is not None else 0.0
        if not cert.certified or tightest > bound + ev.tolerance:
            ev.notes.append(f"order {order}: tightest {tightest} exceeds the order-{m} constant {bound}")
            conclusion = False
    return base.certified, conclusion


_CHECKS: dict[TheoremId, Callable[[_Evidence], tuple[bool, bool]]] = {
    TheoremId.T2_4_TWO_FIXED_POINTS: _two_fixed_points,
    TheoremId.T3_5_PERIODIC_EXISTS: _periodic_exists,
    TheoremId.C3_10_SINGLE_PERIMETER_IFF: _perimeter_iff,
    TheoremId.C3_11_MULTI_PERIMETER_IFF: _perimeter_iff,
    TheoremId.T4_3_ORBITAL_FIXED: _orbit_fixed(
        lambda ev: certify_orbital(ev.space, ev.T, tolerance=ev.tolerance)
    ),
    TheoremId.C4_4_ORBITAL_UNIQUE: _orbital_unique,
    TheoremId.T5_4_KANNAN_FIXED: _orbit_fixed(
        lambda ev: certify_kannan(ev.space, ev.T, tolerance=ev.tolerance)
    ),
    TheoremId.T6_4_CHATTERJEA_FIXED: _orbit_fixed(
        lambda ev: certify_chatterjea(
            ev.space, ev.T, domain=ev.options.chatterjea_domain, tolerance=ev.tolerance
        )
    ),
    TheoremId.C_BANACH_UNIQUE: _banach_unique,
    TheoremId.P3_3_DOWNWARD: _downward,
    TheoremId.P3_4_UPWARD: _upward,
}


def validate(
    space: MetricSpace,
    T: MultiMap | SingleMap,
    theorem: TheoremId,
    options: ValidationOptions | None = None,
) -> ValidationReport:
    """Check one result on one instance.

    Raises:
        CardinalityError: the instance is below the result's |X| bound
        MappingError: T is not a self-map of this space
    """
    options = options or ValidationOptions()
    check_fits(space, T)
    multimap = lift_single(T) if isinstance(T, SingleMap) else T
    order = options.n or DEFAULT_ORDERS.get(theorem)
    _cardinality(theorem, space.point_count, order)

    ev = _Evidence(
        space=space,
        T=multimap,
        options=options,
        order=order,
        fixed=brute_fixed_points(multimap),
        periodic=brute_periodic(multimap, space.point_count),
    )
    if theorem.single_valued_only:
        ev.single = multimap.as_single()
        if ev.single is None:
            ev.notes.append("map is not single-valued")

    hypothesis, conclusion = _CHECKS[theorem](ev)
    if theorem.single_valued_only and ev.single is None:
        hypothesis = False
    verdict = compose_verdict(hypothesis, conclusion)

    if verdict is Verdict.COUNTEREXAMPLE:
        logger.warning(f"{theorem.value}: counterexample on a {space.point_count}-point instance")

    return ValidationReport(
        theorem=theorem,
        options=options,
        hypothesis_held=hypothesis,
        conclusion_held=conclusion,
        verdict=verdict,
        certificates=ev.certificates,
        fixed_points=sorted(ev.fixed),
        periodic_points={k: sorted(pts) for k, pts in ev.periodic.items() if pts},
        notes=ev.notes,
        instance=InstanceFile(space=space, map_=T) if verdict is Verdict.COUNTEREXAMPLE else None,
    )
