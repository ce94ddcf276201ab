"""Finite metric spaces and the set-distance primitives built on them.

ARCHITECTURE:
    JSON {"labels", "dist"} → MetricSpace (axioms checked) → δ / d(x, A) / S / perimeter

Every nonempty subset of a finite space is closed and bounded, so PointSet
stands in for an element of CB(X) and all sup/inf reduce to max/min.

Key Design:
- MetricSpace and PointSet are frozen pydantic models, safe to share across workers
- Axiom violations raise typed errors naming the first offending index tuple
- Integral matrices are compared exactly; float matrices get a slack scaled to
  the largest entry
"""

from collections.abc import Iterable, Iterator, Sequence
from functools import lru_cache
from itertools import combinations

import numpy as np
from pydantic import BaseModel, ConfigDict, RootModel, ValidationInfo, model_validator

from multicontract.config import resolve_tolerance
from multicontract.errors import InvariantViolation, PreconditionError


class MetricShapeError(InvariantViolation):
    """Distance matrix is empty, not square, or disagrees with the labels."""

    pass


class NonfiniteDistanceError(InvariantViolation):
    """dist[i][j] is inf or NaN."""

    def __init__(self, i: int, j: int, value: float) -> None:
        self.i = i
        self.j = j
        super().__init__(f"non-finite distance at ({i},{j}): {value}")


class NonzeroDiagonalError(InvariantViolation):
    """dist[i][i] != 0."""

    def __init__(self, i: int, value: float) -> None:
        self.i = i
        self.value = value
        super().__init__(f"nonzero diagonal at ({i},{i}): {value}")


class AsymmetryError(InvariantViolation):
    """dist[i][j] != dist[j][i]."""

    def __init__(self, i: int, j: int, forward: float, backward: float) -> None:
        self.i = i
        self.j = j
        super().__init__(f"asymmetric at ({i},{j}): {forward} != {backward}")


class NonpositiveOffDiagonalError(InvariantViolation):
    """dist[i][j] <= 0 for i != j (distinct points must be apart)."""

    def __init__(self, i: int, j: int, value: float) -> None:
        self.i = i
        self.j = j
        super().__init__(f"nonpositive off-diagonal distance at ({i},{j}): {value}")


class TriangleViolationError(InvariantViolation):
    """dist[i][j] > dist[i][k] + dist[k][j] beyond the allowed slack."""

    def __init__(self, i: int, j: int, k: int, slack: float) -> None:
        self.i = i
        self.j = j
        self.k = k
        self.slack = slack
        super().__init__(
            f"triangle inequality violated at ({i},{j},{k}): "
            f"d({i},{j}) exceeds d({i},{k}) + d({k},{j}) by {slack}"
        )


class PointSetError(PreconditionError):
    """PointSet is empty, not canonical, or references a point outside the space."""

    pass


@lru_cache(maxsize=512)
def _matrix_of(dist: tuple[tuple[float, ...], ...]) -> np.ndarray:
    matrix = np.array(dist, dtype=float)
    matrix.setflags(write=False)
    return matrix


def _is_integral(dist: tuple[tuple[float, ...], ...]) -> bool:
    return all(float(v).is_integer() for row in dist for v in row)


def check_metric_axioms(matrix: np.ndarray, slack: float) -> None:
    """Raise on the first axiom violation: finiteness, diagonal, symmetry, positivity, triangle."""
    n = matrix.shape[0]

    nonfinite = np.argwhere(~np.isfinite(matrix))
    if nonfinite.size:
        i, j = (int(v) for v in nonfinite[0])
        raise NonfiniteDistanceError(i, j, float(matrix[i, j]))

    for i in range(n):
        if matrix[i, i] != 0.0:
            raise NonzeroDiagonalError(i, float(matrix[i, i]))

    asym = np.argwhere(np.abs(matrix - matrix.T) > slack)
    if asym.size:
        i, j = (int(v) for v in asym[0])
        raise AsymmetryError(i, j, float(matrix[i, j]), float(matrix[j, i]))

    off = ~np.eye(n, dtype=bool)
    nonpos = np.argwhere(off & ~(matrix > 0.0))
    if nonpos.size:
        i, j = (int(v) for v in nonpos[0])
        raise NonpositiveOffDiagonalError(i, j, float(matrix[i, j]))

    # excess[i, j, k] = d(i, j) - (d(i, k) + d(k, j))
    excess = matrix[:, :, None] - (matrix[:, None, :] + matrix.T[None, :, :])
    bad = np.argwhere(excess > slack)
    if bad.size:
        i, j, k = (int(v) for v in bad[0])
        raise TriangleViolationError(i, j, k, float(excess[i, j, k]))


class PointSet(RootModel[tuple[int, ...]]):
    """Nonempty subset of a space's points, kept as a strictly increasing index tuple."""

    model_config = ConfigDict(frozen=True)

    @model_validator(mode="after")
    def _canonical(self) -> "PointSet":
        members = self.root
        if not members:
            raise PointSetError("point set must be nonempty")
        if members[0] < 0:
            raise PointSetError(f"negative point index {members[0]}")
        if any(a >= b for a, b in zip(members, members[1:])):
            raise PointSetError(f"point set not strictly increasing: {list(members)}")
        return self

    @classmethod
    def of(cls, indices: Iterable[int]) -> "PointSet":
        """Build the canonical set from any iterable of indices."""
        return cls(tuple(sorted(set(int(i) for i in indices))))

    @property
    def members(self) -> tuple[int, ...]:
        return self.root

    def __iter__(self) -> Iterator[int]:  # type: ignore[override]
        return iter(self.root)

    def __len__(self) -> int:
        return len(self.root)

    def __contains__(self, x: object) -> bool:
        return x in self.root

    def __str__(self) -> str:
        return "{" + ",".join(str(m) for m in self.root) + "}"


class MetricSpace(BaseModel):
    """Finite point set with a validated distance matrix.

    Construction checks all metric axioms. The comparison tolerance can be passed
    through the validation context: ``MetricSpace.model_validate(data, context={"tolerance": t})``.
    """

    model_config = ConfigDict(frozen=True, extra="forbid")

    labels: tuple[str, ...]
    dist: tuple[tuple[float, ...], ...]

    @model_validator(mode="before")
    @classmethod
    def _default_labels(cls, data: object) -> object:
        if isinstance(data, dict) and data.get("labels") is None and "dist" in data:
            data = {**data, "labels": [str(i) for i in range(len(data["dist"]))]}
        return data

    @model_validator(mode="after")
    def _check(self, info: ValidationInfo) -> "MetricSpace":
        n = len(self.dist)
        if n == 0:
            raise MetricShapeError("distance matrix must have at least one row")
        for i, row in enumerate(self.dist):
            if len(row) != n:
                raise MetricShapeError(f"row {i} has length {len(row)}, expected {n}")
        if len(self.labels) != n:
            raise MetricShapeError(f"{len(self.labels)} labels for {n} points")

        tolerance = resolve_tolerance((info.context or {}).get("tolerance"))
        check_metric_axioms(self.matrix, self.distance_slack(tolerance))
        return self

    @property
    def point_count(self) -> int:
        return len(self.dist)

    @property
    def matrix(self) -> np.ndarray:
        """Read-only numpy view of the distances."""
        return _matrix_of(self.dist)

    @property
    def is_integral(self) -> bool:
        """True when every distance is an integer; such spaces are compared exactly."""
        return _is_integral(self.dist)

    @property
    def scale(self) -> float:
        return float(self.matrix.max())

    def distance_slack(self, tolerance: float | None = None) -> float:
        """Slack for comparisons between distance-valued quantities."""
        if self.is_integral:
            return 0.0
        return resolve_tolerance(tolerance) * max(self.scale, 1e-300)

    def ratio_slack(self, tolerance: float | None = None) -> float:
        """Slack for comparisons between scale-free ratios."""
        if self.is_integral:
            return 0.0
        return resolve_tolerance(tolerance)

    def d(self, x: int, y: int) -> float:
        return self.dist[x][y]

    def require_point(self, x: int) -> None:
        if not 0 <= x < self.point_count:
            raise PointSetError(f"point {x} outside space of {self.point_count} points")

    def require(self, A: PointSet) -> None:
        if A.members[-1] >= self.point_count:
            raise PointSetError(f"point set {A} outside space of {self.point_count} points")


def validate_metric(
    point_count: int,
    dist: Sequence[Sequence[float]],
    labels: Sequence[str] | None = None,
    tolerance: float | None = None,
) -> MetricSpace:
    """Check a raw matrix against the metric axioms and wrap it.

    Raises:
        MetricShapeError: matrix is not point_count × point_count
        NonzeroDiagonalError, AsymmetryError, NonpositiveOffDiagonalError,
        TriangleViolationError: first violation in row-major order
    """
    if point_count < 1:
        raise MetricShapeError(f"point_count must be positive, got {point_count}")
    if len(dist) != point_count:
        raise MetricShapeError(f"matrix has {len(dist)} rows, expected {point_count}")

    data = {
        "labels": list(labels) if labels is not None else None,
        "dist": [[float(v) for v in row] for row in dist],
    }
    return MetricSpace.model_validate(data, context={"tolerance": tolerance})


def delta_distance(space: MetricSpace, A: PointSet, B: PointSet) -> float:
    """δ(A, B): the largest distance between a member of A and a member of B."""
    space.require(A)
    space.require(B)
    return float(space.matrix[np.ix_(A.members, B.members)].max())


def diameter(space: MetricSpace, A: PointSet) -> float:
    """Largest pairwise distance inside A; equals δ(A, A)."""
    return delta_distance(space, A, A)


def point_set_distance(space: MetricSpace, x: int, A: PointSet) -> float:
    """d(x, A) under the infimum convention: distance to the nearest member of A."""
    space.require_point(x)
    space.require(A)
    return float(space.matrix[x, list(A.members)].min())


def total_pairwise_S(space: MetricSpace, sets: Sequence[PointSet]) -> float:
    """Sum of δ over all unordered index pairs of the list, in lexicographic order."""
    if len(sets) < 2:
        raise PreconditionError("total pairwise distance needs at least two sets")
    total = 0.0
    for A, B in combinations(sets, 2):
        total += delta_distance(space, A, B)
    return total


def perimeter(space: MetricSpace, a: int, b: int, c: int) -> float:
    """d(a,b) + d(b,c) + d(a,c); indices need not be distinct."""
    for x in (a, b, c):
        space.require_point(x)
    return space.d(a, b) + space.d(b, c) + space.d(a, c)
