"""Random and structured instances for certification sweeps.

Every generator is a pure function of its arguments and seed. Spaces are pushed
through validate_metric before they are returned, so a generator can never
emit something the rest of the package would reject.
"""

import logging

import numpy as np
from scipy.sparse.csgraph import floyd_warshall
from scipy.spatial.distance import pdist, squareform

from multicontract.errors import PreconditionError
from multicontract.mappings import MultiMap
from multicontract.metric import MetricSpace, PointSet, validate_metric
from multicontract.models.instance import (
    ClosureSpaces,
    CycleMaps,
    EuclideanSpaces,
    GenConfig,
    HubMaps,
    IdentityMaps,
    InstanceFile,
    LineSpaces,
    SingleRandomMaps,
    UniformRandomMaps,
)

logger = logging.getLogger(__name__)

# raw closure weights stay away from zero
WEIGHT_LOW = 0.1
WEIGHT_HIGH = 1.0


def derive_seed(seed: int, index: int) -> int:
    """Per-instance seed, independent of how instances are spread over workers."""
    state = np.random.SeedSequence([seed, index]).generate_state(2, dtype=np.uint32)
    return int(state[0]) << 32 | int(state[1])


def _space(matrix: np.ndarray) -> MetricSpace:
    return validate_metric(len(matrix), matrix.tolist())


def random_euclidean_space(n: int, dim: int, seed: int) -> MetricSpace:
    """n uniform points of the unit cube [0,1]^dim with Euclidean distances."""
    if n < 1 or dim < 1:
        raise PreconditionError(f"need n ≥ 1 and dim ≥ 1, got n={n} dim={dim}")
    rng = np.random.default_rng(seed)
    coords = rng.random((n, dim))
    if n == 1:
        return _space(np.zeros((1, 1)))
    matrix = squareform(pdist(coords, metric="euclidean"))
    return _space(matrix)


def metric_closure(weights: np.ndarray) -> np.ndarray:
    """All-pairs shortest-path closure of a symmetric positive weight matrix."""
    closure = floyd_warshall(weights, directed=False)
    # path sums can differ by an ulp between the two directions
    return np.minimum(closure, closure.T)


def random_metric_space(n: int, seed: int) -> MetricSpace:
    """Symmetric weights from [0.1, 1.0] repaired into a metric by shortest paths."""
    if n < 2:
        raise PreconditionError(f"closure spaces need n ≥ 2, got {n}")
    rng = np.random.default_rng(seed)
    upper = np.triu(rng.uniform(WEIGHT_LOW, WEIGHT_HIGH, size=(n, n)), k=1)
    weights = upper + upper.T
    return _space(metric_closure(weights))


def random_line_space(n: int, seed: int, span: int | None = None) -> MetricSpace:
    """n distinct integer positions on a line; every distance is an exact integer."""
    if n < 1:
        raise PreconditionError(f"need n ≥ 1, got {n}")
    rng = np.random.default_rng(seed)
    span = span or 4 * n
    positions = np.sort(rng.choice(span, size=n, replace=False))
    matrix = np.abs(positions[:, None] - positions[None, :]).astype(float)
    return _space(matrix)


def line_space(positions: list[int]) -> MetricSpace:
    """The line metric on the given positions, labelled by position."""
    points = np.asarray(positions, dtype=float)
    matrix = np.abs(points[:, None] - points[None, :])
    return validate_metric(len(positions), matrix.tolist(), labels=[str(p) for p in positions])


def _subset(rng: np.random.Generator, pool: np.ndarray, max_size: int) -> PointSet:
    size = int(rng.integers(1, min(max_size, len(pool)) + 1))
    return PointSet.of(int(v) for v in rng.choice(pool, size=size, replace=False))


def random_multimap(space: MetricSpace, max_image: int, seed: int) -> MultiMap:
    """Each point gets a nonempty subset of at most max_image points."""
    if max_image < 1:
        raise PreconditionError(f"max_image must be positive, got {max_image}")
    rng = np.random.default_rng(seed)
    pool = np.arange(space.point_count)
    return MultiMap(targets=tuple(_subset(rng, pool, max_image) for _ in pool))


def hub_map(space: MetricSpace, hub: int, spread: int, seed: int) -> MultiMap:
    """Images drawn from the spread+1 points nearest the hub; spread 0 is constant."""
    space.require_point(hub)
    if spread < 0:
        raise PreconditionError(f"spread must be nonnegative, got {spread}")
    rng = np.random.default_rng(seed)
    # stable sort keeps ties in index order
    nearest = np.argsort(space.matrix[hub], kind="stable")[: spread + 1]
    return MultiMap(
        targets=tuple(_subset(rng, nearest, len(nearest)) for _ in range(space.point_count))
    )


def single_random_map(space: MetricSpace, seed: int) -> MultiMap:
    rng = np.random.default_rng(seed)
    n = space.point_count
    return MultiMap.from_lists([[int(t)] for t in rng.integers(0, n, size=n)])


def cycle_map(space: MetricSpace, length: int, seed: int) -> MultiMap:
    """i ↦ i+1 mod length on the first `length` points; others feed into the cycle."""
    n = space.point_count
    if not 1 <= length <= n:
        raise PreconditionError(f"cycle length must lie in [1, {n}], got {length}")
    rng = np.random.default_rng(seed)
    targets = [[(i + 1) % length] for i in range(length)]
    targets += [[int(rng.integers(0, length))] for _ in range(length, n)]
    return MultiMap.from_lists(targets)


def identity_map(space: MetricSpace) -> MultiMap:
    return MultiMap.from_lists([[i] for i in range(space.point_count)])


def generate_space(config: GenConfig, seed: int | None = None) -> MetricSpace:
    seed = config.seed if seed is None else seed
    rng = np.random.default_rng([seed, 0])
    n = config.point_count
    if config.point_count_max is not None:
        n = int(rng.integers(config.point_count, config.point_count_max + 1))
    space_seed = int(rng.integers(2**63))

    flavor = config.flavor
    if isinstance(flavor, EuclideanSpaces):
        return random_euclidean_space(n, flavor.dim, space_seed)
    if isinstance(flavor, ClosureSpaces):
        return random_metric_space(n, space_seed)
    assert isinstance(flavor, LineSpaces)
    return random_line_space(n, space_seed)


def generate_map(space: MetricSpace, config: GenConfig, seed: int | None = None) -> MultiMap:
    seed = config.seed if seed is None else seed
    map_seed = int(np.random.default_rng([seed, 1]).integers(2**63))

    flavor = config.map_flavor
    if isinstance(flavor, UniformRandomMaps):
        return random_multimap(space, flavor.max_image, map_seed)
    if isinstance(flavor, HubMaps):
        return hub_map(space, flavor.hub_index, flavor.spread, map_seed)
    if isinstance(flavor, SingleRandomMaps):
        return single_random_map(space, map_seed)
    if isinstance(flavor, CycleMaps):
        return cycle_map(space, flavor.length, map_seed)
    assert isinstance(flavor, IdentityMaps)
    return identity_map(space)


def generate_instance(config: GenConfig, seed: int | None = None) -> InstanceFile:
    """One instance from the config; `seed` overrides config.seed (used by sweeps)."""
    seed = config.seed if seed is None else seed
    space = generate_space(config, seed)
    T = generate_map(space, config, seed)
    logger.debug(f"Generated {space.point_count}-point {config.flavor.kind} instance (seed {seed})")
    return InstanceFile(
        space=space,
        map_=T,
        metadata={
            "flavor": config.flavor.kind,
            "map_flavor": config.map_flavor.kind,
            "seed": str(seed),
        },
    )
