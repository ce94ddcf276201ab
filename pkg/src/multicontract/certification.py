"""Exhaustive certification of contraction classes.

ARCHITECTURE:
    (MetricSpace, MultiMap, class) → ContractionChecker → tuple domain → ScanResult → Certificate

A class inequality "LHS ≤ c · RHS on every tuple of the domain" is decided by
scanning the whole domain: the tightest constant is the largest LHS/RHS over
tuples with RHS > 0. A tuple with RHS = 0 < LHS disqualifies the map outright;
tuples with RHS = LHS = 0 are skipped and counted.

Key Design:
- All per-map set quantities (δ(Tx,Ty), δ(Tx,T²x), d(y,Tx), ...) are tabulated
  once, so a tuple costs a handful of lookups
- Domains enumerate in lexicographic order of index tuples; ScanResult.merge is
  associative and commutative (max ratio, then smallest witness), so chunked
  scans in any worker layout reproduce the serial certificate exactly
- Banach and perimeter scans go through the total-pairwise evaluator so the
  coincidences n=2 ≡ banach and n=3 ≡ perimeter hold bit for bit
"""

import logging
from collections.abc import Iterable, Sequence
from dataclasses import dataclass
from itertools import combinations, combinations_with_replacement

import numpy as np

from multicontract.config import resolve_tolerance
from multicontract.errors import PreconditionError
from multicontract.mappings import MultiMap, SingleMap, check_fits, image, periodic_points
from multicontract.metric import MetricSpace
from multicontract.models.certificate import Certificate, ChatterjeaDomain, ContractionClass

logger = logging.getLogger(__name__)

Tuple = tuple[int, ...]

ORBIT_CLASSES = frozenset(
    {ContractionClass.ORBITAL, ContractionClass.KANNAN, ContractionClass.CHATTERJEA}
)


class SpaceTooSmall(PreconditionError):
    """The class needs more points than the space has."""

    def __init__(self, class_label: str, required: int, actual: int) -> None:
        self.class_label = class_label
        self.required = required
        self.actual = actual
        super().__init__(f"{class_label} needs at least {required} points, space has {actual}")

    def __reduce__(self) -> tuple[type, tuple[str, int, int]]:
        # crosses the process-pool boundary
        return type(self), (self.class_label, self.required, self.actual)


@dataclass(frozen=True)
class ScanResult:
    """Partial reduction over a slice of the tuple domain."""

    best_ratio: float | None = None
    best_witness: Tuple | None = None
    disqualifier: Tuple | None = None
    examined: int = 0
    skipped: int = 0

    def merge(self, other: "ScanResult") -> "ScanResult":
        if self.best_ratio is None:
            ratio, witness = other.best_ratio, other.best_witness
        elif other.best_ratio is None:
            ratio, witness = self.best_ratio, self.best_witness
        elif other.best_ratio > self.best_ratio:
            ratio, witness = other.best_ratio, other.best_witness
        elif other.best_ratio < self.best_ratio:
            ratio, witness = self.best_ratio, self.best_witness
        else:
            ratio = self.best_ratio
            witness = min(self.best_witness, other.best_witness)  # type: ignore[type-var]

        candidates = [t for t in (self.disqualifier, other.disqualifier) if t is not None]
        return ScanResult(
            best_ratio=ratio,
            best_witness=witness,
            disqualifier=min(candidates) if candidates else None,
            examined=self.examined + other.examined,
            skipped=self.skipped + other.skipped,
        )


def merge_scans(results: Iterable[ScanResult]) -> ScanResult:
    merged = ScanResult()
    for result in results:
        merged = merged.merge(result)
    return merged


class ContractionChecker:
    """Tabulates one map's set distances and scans one class's tuple domain."""

    def __init__(
        self,
        space: MetricSpace,
        T: MultiMap,
        class_id: ContractionClass,
        *,
        order: int | None = None,
        distinct_points: int | None = None,
        include_degenerate: bool = False,
        chatterjea_domain: ChatterjeaDomain = ChatterjeaDomain.RESTRICTED,
        tolerance: float | None = None,
    ) -> None:
        check_fits(space, T)
        self.space = space
        self.T = T
        self.class_id = class_id
        self.tolerance = resolve_tolerance(tolerance)
        self.include_degenerate = include_degenerate
        self.distinct_points = distinct_points
        self.chatterjea_domain = chatterjea_domain

        if class_id is ContractionClass.BANACH:
            order = 2
        elif class_id is ContractionClass.PERIMETER:
            order = 3
        elif class_id is ContractionClass.TOTAL_PAIRWISE:
            if order is None or order < 2:
                raise PreconditionError(f"total pairwise order must be at least 2, got {order}")
        else:
            order = None
        self.order = order

        n = space.point_count
        if distinct_points is not None:
            if order is None or not 1 <= distinct_points <= order:
                raise PreconditionError(
                    f"distinct_points={distinct_points} needs a total pairwise order ≥ it"
                )
            required = distinct_points
        elif order is not None:
            required = order
        else:
            required = 2
        if n < required:
            raise SpaceTooSmall(self._label(), required, n)

        self._tabulate()

    def _label(self) -> str:
        if self.class_id is ContractionClass.TOTAL_PAIRWISE:
            return f"total_pairwise(n={self.order})"
        return self.class_id.value

    def _tabulate(self) -> None:
        D = self.space.matrix
        n = self.space.point_count
        firsts = [list(self.T(x).members) for x in range(n)]
        seconds = [list(image(self.T, self.T(x)).members) for x in range(n)]

        delta = np.empty((n, n))
        near = np.empty((n, n))  # near[y, x] = d(y, Tx)
        for x in range(n):
            near[:, x] = D[:, firsts[x]].min(axis=1)
            for y in range(n):
                delta[x, y] = D[np.ix_(firsts[x], firsts[y])].max()

        self._dist = D.tolist()
        self._delta = delta.tolist()
        self._near = near.tolist()
        self._member = [set(f) for f in firsts]

        if self.class_id in ORBIT_CLASSES:
            near2 = np.empty((n, n))  # near2[y, x] = d(y, T²x)
            delta_second = np.empty((n, n))  # delta_second[x, y] = δ(T²x, Ty)
            delta_orbit = np.empty(n)  # delta_orbit[x] = δ(Tx, T²x)
            for x in range(n):
                near2[:, x] = D[:, seconds[x]].min(axis=1)
                delta_orbit[x] = D[np.ix_(firsts[x], seconds[x])].max()
                for y in range(n):
                    delta_second[x, y] = D[np.ix_(seconds[x], firsts[y])].max()
            self._near2 = near2.tolist()
            self._delta_second = delta_second.tolist()
            self._delta_orbit = delta_orbit.tolist()

    def tuples(self) -> list[Tuple]:
        """The class domain in lexicographic (row-major for ordered pairs) order."""
        n = self.space.point_count
        points = range(n)

        if self.order is not None:
            if self.distinct_points is not None:
                k = self.distinct_points
                return [
                    t
                    for t in combinations_with_replacement(points, self.order)
                    if len(set(t)) == k
                ]
            if self.include_degenerate:
                return list(combinations_with_replacement(points, self.order))
            return list(combinations(points, self.order))

        member = self._member
        if self.class_id is ContractionClass.ORBITAL:
            return [(x, y) for x in points for y in points if x != y and y not in member[x]]
        if (
            self.class_id is ContractionClass.CHATTERJEA
            and self.chatterjea_domain is ChatterjeaDomain.UNRESTRICTED
        ):
            return [(x, y) for x in points for y in points]
        return [
            (x, y)
            for x in points
            if x not in member[x]
            for y in points
            if x != y and y not in member[x]
        ]

    def orbit_terms(self, x: int, y: int) -> tuple[float, float, float]:
        """(δ(Tx,T²x), δ(T²x,Ty), δ(Ty,Tx)): the shared orbital left-hand side."""
        return self._delta_orbit[x], self._delta_second[x][y], self._delta[y][x]

    def evaluate(self, t: Tuple) -> tuple[float, float]:
        """(LHS, RHS) of the class inequality on one tuple."""
        if self.order is not None:
            delta, dist = self._delta, self._dist
            lhs = 0.0
            rhs = 0.0
            for i, j in combinations(range(len(t)), 2):
                lhs += delta[t[i]][t[j]]
                rhs += dist[t[i]][t[j]]
            return lhs, rhs

        x, y = t
        a, b, c = self.orbit_terms(x, y)
        lhs = a + b + c
        near = self._near
        if self.class_id is ContractionClass.ORBITAL:
            rhs = near[x][x] + near[y][x] + self._dist[x][y]
        elif self.class_id is ContractionClass.KANNAN:
            rhs = near[x][x] + near[y][y] + a
        else:
            near2 = self._near2
            rhs = near[x][y] + near[y][x] + near2[x][x] + near2[y][x] + self._delta[x][y]
        return lhs, rhs

    def scan(self, tuples: Sequence[Tuple]) -> ScanResult:
        best_ratio: float | None = None
        best_witness: Tuple | None = None
        disqualifier: Tuple | None = None
        skipped = 0
        for t in tuples:
            lhs, rhs = self.evaluate(t)
            if rhs > 0.0:
                ratio = lhs / rhs
                if (
                    best_ratio is None
                    or ratio > best_ratio
                    or (ratio == best_ratio and t < best_witness)  # type: ignore[operator]
                ):
                    best_ratio, best_witness = ratio, t
            elif lhs > 0.0:
                if disqualifier is None or t < disqualifier:
                    disqualifier = t
            else:
                skipped += 1
        return ScanResult(best_ratio, best_witness, disqualifier, len(tuples), skipped)

    def chunks(self, count: int) -> list[list[Tuple]]:
        """Split the domain into at most `count` contiguous slices."""
        domain = self.tuples()
        count = max(1, min(count, len(domain)))
        size, extra = divmod(len(domain), count)
        slices = []
        start = 0
        for i in range(count):
            end = start + size + (1 if i < extra else 0)
            slices.append(domain[start:end])
            start = end
        return slices

    def certificate(self, result: ScanResult) -> Certificate:
        sup = self.class_id.admissible_sup
        domain_empty = result.examined == 0
        disqualified = result.disqualifier is not None

        if domain_empty:
            tightest: float | None = None
            witness = None
            certified = True
        elif disqualified:
            tightest = float("inf")
            witness = result.disqualifier
            certified = False
        else:
            tightest = result.best_ratio if result.best_ratio is not None else 0.0
            witness = result.best_witness
            certified = tightest < sup - self.space.ratio_slack(self.tolerance)

        return Certificate(
            class_id=self.class_id,
            order=self.order if self.class_id is ContractionClass.TOTAL_PAIRWISE else None,
            distinct_points=self.distinct_points,
            include_degenerate=self.include_degenerate,
            chatterjea_domain=(
                self.chatterjea_domain if self.class_id is ContractionClass.CHATTERJEA else None
            ),
            tightest=tightest,
            admissible_sup=sup,
            strict_positive_lower=self.class_id.strict_positive_lower,
            certified=certified,
            witness=witness,
            tuples_examined=result.examined,
            skipped_zero_zero=result.skipped,
            domain_empty=domain_empty,
            disqualified=disqualified,
            below_cardinality_bound=(
                self.class_id is ContractionClass.PERIMETER and self.space.point_count <= 3
            ),
        )

    def certify(self) -> Certificate:
        certificate = self.certificate(self.scan(self.tuples()))
        logger.debug(f"{certificate.label}: tightest={certificate.tightest}")
        return certificate


def certify_banach(
    space: MetricSpace, T: MultiMap, *, tolerance: float | None = None
) -> Certificate:
    """max over distinct pairs of δ(Tx,Ty)/d(x,y); certified below 1."""
    return ContractionChecker(space, T, ContractionClass.BANACH, tolerance=tolerance).certify()


def certify_perimeter(
    space: MetricSpace,
    T: MultiMap,
    *,
    include_degenerate: bool = False,
    tolerance: float | None = None,
) -> Certificate:
    """δ-perimeter ratio over distinct triples; certified below 1.

    include_degenerate also scans triples with repeated points, which for
    single-valued maps makes the class coincide with Banach contractions.
    """
    return ContractionChecker(
        space,
        T,
        ContractionClass.PERIMETER,
        include_degenerate=include_degenerate,
        tolerance=tolerance,
    ).certify()


def certify_total_pairwise(
    space: MetricSpace,
    T: MultiMap,
    n: int,
    *,
    distinct_points: int | None = None,
    tolerance: float | None = None,
) -> Certificate:
    """S(Tx_1..Tx_n)/S(x_1..x_n) over n-subsets of distinct points; certified below 1.

    With distinct_points=k the scan covers sorted n-tuples with exactly k
    distinct entries instead, repeated entries contributing δ(Tx,Tx) = diam(Tx).
    """
    return ContractionChecker(
        space,
        T,
        ContractionClass.TOTAL_PAIRWISE,
        order=n,
        distinct_points=distinct_points,
        tolerance=tolerance,
    ).certify()


def certify_orbital(
    space: MetricSpace, T: MultiMap, *, tolerance: float | None = None
) -> Certificate:
    """Orbital triangular inequality over ordered pairs x ≠ y, y ∉ Tx."""
    return ContractionChecker(space, T, ContractionClass.ORBITAL, tolerance=tolerance).certify()


def certify_kannan(
    space: MetricSpace, T: MultiMap, *, tolerance: float | None = None
) -> Certificate:
    """Kannan variant over x ≠ y, x ∉ Tx, y ∉ Tx; certified below 2/3."""
    return ContractionChecker(space, T, ContractionClass.KANNAN, tolerance=tolerance).certify()


def certify_chatterjea(
    space: MetricSpace,
    T: MultiMap,
    *,
    domain: ChatterjeaDomain = ChatterjeaDomain.RESTRICTED,
    tolerance: float | None = None,
) -> Certificate:
    """Chatterjea variant; certified below 1/2 (a tightest of 0 still certifies)."""
    return ContractionChecker(
        space, T, ContractionClass.CHATTERJEA, chatterjea_domain=domain, tolerance=tolerance
    ).certify()


def certify(
    space: MetricSpace,
    T: MultiMap,
    class_id: ContractionClass,
    *,
    order: int | None = None,
    chatterjea_domain: ChatterjeaDomain = ChatterjeaDomain.RESTRICTED,
    tolerance: float | None = None,
) -> Certificate:
    """Dispatch on class_id; order is required for total_pairwise."""
    return ContractionChecker(
        space,
        T,
        class_id,
        order=order,
        chatterjea_domain=chatterjea_domain,
        tolerance=tolerance,
    ).certify()


def no_period2(T: MultiMap) -> bool:
    """True iff no point has prime period 2."""
    return not periodic_points(T, 2)


def condition_i(T: SingleMap) -> bool:
    """T(T(x)) ≠ x whenever T(x) ≠ x."""
    return all(T(T(x)) != x for x in range(T.point_count) if T(x) != x)


def rearranged_inequality_holds(
    space: MetricSpace,
    T: MultiMap,
    class_id: ContractionClass,
    constant: float,
    *,
    chatterjea_domain: ChatterjeaDomain = ChatterjeaDomain.RESTRICTED,
    tolerance: float | None = None,
) -> bool:
    """Check the rearranged Kannan / Chatterjea inequality at a given constant.

    Kannan:     (1-β)δ(Tx,T²x) + δ(T²x,Ty) + δ(Ty,Tx) ≤ β[d(x,Tx) + d(y,Ty)]
    Chatterjea: δ(Tx,T²x) + δ(T²x,Ty) + (1-γ)δ(Ty,Tx) ≤ γ[d(x,Ty) + d(y,Tx) + d(x,T²x) + d(y,T²x)]
    """
    if class_id not in (ContractionClass.KANNAN, ContractionClass.CHATTERJEA):
        raise PreconditionError(f"no rearranged form for {class_id.value}")

    checker = ContractionChecker(
        space, T, class_id, chatterjea_domain=chatterjea_domain, tolerance=tolerance
    )
    # constant is a float, so even integral spaces get a scaled slack here
    slack = checker.tolerance * max(space.scale, 1.0)
    near, near2 = checker._near, checker._near2
    for x, y in checker.tuples():
        a, b, c = checker.orbit_terms(x, y)
        if class_id is ContractionClass.KANNAN:
            lhs = (1 - constant) * a + b + c
            rhs = constant * (near[x][x] + near[y][y])
        else:
            lhs = a + b + (1 - constant) * c
            rhs = constant * (near[x][y] + near[y][x] + near2[x][x] + near2[y][x])
        if lhs > rhs + slack:
            logger.info(f"rearranged {class_id.value} inequality fails at ({x},{y})")
            return False
    return True
