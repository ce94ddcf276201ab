"""Single- and multivalued self-maps of a finite space.

A SingleMap sends each point to one point; a MultiMap sends each point to a
nonempty PointSet. Set images are unions: T(A) = ∪_{a ∈ A} T(a), and
T^k x = T(T^{k-1} x). Single maps embed through lift_single, after which every
formula agrees with the single-valued one because δ on singletons is d.
"""

from pydantic import BaseModel, ConfigDict, model_validator

from multicontract.errors import InvariantViolation, PreconditionError
from multicontract.metric import MetricSpace, PointSet


class MappingError(InvariantViolation):
    """Map targets fall outside the space, or the map does not fit the space."""

    pass


class SingleMap(BaseModel):
    """T: X → X as one target index per point."""

    model_config = ConfigDict(frozen=True, extra="forbid")

    target: tuple[int, ...]

    @model_validator(mode="after")
    def _in_range(self) -> "SingleMap":
        n = len(self.target)
        if n == 0:
            raise MappingError("map must cover at least one point")
        for x, y in enumerate(self.target):
            if not 0 <= y < n:
                raise MappingError(f"target of point {x} is {y}, outside 0..{n - 1}")
        return self

    @property
    def point_count(self) -> int:
        return len(self.target)

    def __call__(self, x: int) -> int:
        return self.target[x]


class MultiMap(BaseModel):
    """T: X → CB(X) as one nonempty PointSet per point."""

    model_config = ConfigDict(frozen=True, extra="forbid")

    targets: tuple[PointSet, ...]

    @model_validator(mode="after")
    def _in_range(self) -> "MultiMap":
        n = len(self.targets)
        if n == 0:
            raise MappingError("map must cover at least one point")
        for x, image_set in enumerate(self.targets):
            if image_set.members[-1] >= n:
                raise MappingError(f"image of point {x} is {image_set}, outside 0..{n - 1}")
        return self

    @classmethod
    def from_lists(cls, targets: list[list[int]]) -> "MultiMap":
        return cls(targets=tuple(PointSet.of(t) for t in targets))

    @property
    def point_count(self) -> int:
        return len(self.targets)

    def __call__(self, x: int) -> PointSet:
        return self.targets[x]

    @property
    def is_single_valued(self) -> bool:
        return all(len(t) == 1 for t in self.targets)

    def as_single(self) -> SingleMap | None:
        """The underlying single map if every image is a singleton."""
        if not self.is_single_valued:
            return None
        return SingleMap(target=tuple(t.members[0] for t in self.targets))


def check_fits(space: MetricSpace, T: MultiMap | SingleMap) -> None:
    """Raise MappingError unless T is a self-map of exactly this space."""
    if T.point_count != space.point_count:
        raise MappingError(
            f"map covers {T.point_count} points but the space has {space.point_count}"
        )


def lift_single(m: SingleMap) -> MultiMap:
    """Embed a single-valued map as the multimap x ↦ {m(x)}."""
    return MultiMap(targets=tuple(PointSet((y,)) for y in m.target))


def image(T: MultiMap, A: PointSet) -> PointSet:
    """Union of T(a) over a in A."""
    members: set[int] = set()
    for a in A:
        members.update(T(a).members)
    return PointSet.of(members)


def power_image(T: MultiMap, x: int, k: int) -> PointSet:
    """T^k x, with T^1 x = T(x)."""
    if k < 1:
        raise PreconditionError(f"power must be at least 1, got {k}")
    current = T(x)
    for _ in range(k - 1):
        current = image(T, current)
    return current


def fixed_points(T: MultiMap) -> frozenset[int]:
    """Points x with x ∈ T(x)."""
    return frozenset(x for x in range(T.point_count) if x in T(x))


def first_return(T: MultiMap, x: int, k_max: int) -> int | None:
    """Smallest j ≤ k_max with x ∈ T^j x, or None."""
    current = T(x)
    for j in range(1, k_max + 1):
        if x in current:
            return j
        current = image(T, current)
    return None


def periodic_points(T: MultiMap, k: int) -> frozenset[int]:
    """Points of prime period exactly k: x ∈ T^k x and x ∉ T^j x for 1 ≤ j < k."""
    if k < 1:
        raise PreconditionError(f"period must be at least 1, got {k}")
    return frozenset(x for x in range(T.point_count) if first_return(T, x, k) == k)


def prime_period_table(T: MultiMap, k_max: int | None = None) -> dict[int, frozenset[int]]:
    """Prime-period classes for k = 1..k_max (default: the number of points)."""
    k_max = T.point_count if k_max is None else k_max
    table: dict[int, set[int]] = {k: set() for k in range(1, k_max + 1)}
    for x in range(T.point_count):
        period = first_return(T, x, k_max)
        if period is not None:
            table[period].add(x)
    return {k: frozenset(points) for k, points in table.items()}
