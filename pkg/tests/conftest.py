"""Pytest configuration and fixtures."""

import json

import pytest


@pytest.fixture
def line3():
    """Points 0, 1, 2 on a line."""
    from multicontract.metric import validate_metric

    return validate_metric(3, [[0, 1, 2], [1, 0, 1], [2, 1, 0]])


@pytest.fixture
def line4():
    """Points 0, 1, 2, 3 on a line."""
    from multicontract.generators import line_space

    return line_space([0, 1, 2, 3])


@pytest.fixture
def unit_pair():
    """Two points at distance 1."""
    from multicontract.metric import validate_metric

    return validate_metric(2, [[0, 1], [1, 0]])


@pytest.fixture
def equilateral():
    """Three points at mutual distance 1."""
    from multicontract.metric import validate_metric

    return validate_metric(3, [[0, 1, 1], [1, 0, 1], [1, 1, 0]])


@pytest.fixture
def line_map():
    """0 ↦ {0}, 1 ↦ {0}, 2 ↦ {1}: perimeter-contracting but not a Banach contraction."""
    from multicontract.mappings import MultiMap

    return MultiMap.from_lists([[0], [0], [1]])


@pytest.fixture
def swap():
    """The 2-cycle 0 ↦ {1}, 1 ↦ {0}."""
    from multicontract.mappings import MultiMap

    return MultiMap.from_lists([[1], [0]])


@pytest.fixture
def constant_map():
    """Factory for the constant map i ↦ {h} on n points."""
    from multicontract.mappings import MultiMap

    def build(n: int, h: int = 0):
        return MultiMap.from_lists([[h]] * n)

    return build


@pytest.fixture
def identity_map():
    """Factory for the identity lift on n points."""
    from multicontract.mappings import MultiMap

    def build(n: int):
        return MultiMap.from_lists([[i] for i in range(n)])

    return build


@pytest.fixture
def random_instances():
    """Factory for seeded random (space, map) pairs of mixed flavors."""
    from multicontract.generators import (
        hub_map,
        random_euclidean_space,
        random_metric_space,
        random_multimap,
    )

    def build(count: int, seed: int = 0, min_points: int = 3, max_points: int = 7):
        import numpy as np

        rng = np.random.default_rng(seed)
        instances = []
        for i in range(count):
            n = int(rng.integers(min_points, max_points + 1))
            s = int(rng.integers(2**32))
            space = random_euclidean_space(n, 2, s) if i % 2 else random_metric_space(n, s)
            if i % 3 == 0:
                T = hub_map(space, int(rng.integers(n)), int(rng.integers(0, 3)), s)
            else:
                T = random_multimap(space, int(rng.integers(1, 3)), s)
            instances.append((space, T))
        return instances

    return build


@pytest.fixture
def line_instance_file(tmp_path, line3, line_map):
    """The line instance written as an instance JSON file."""
    from multicontract.models.instance import InstanceFile

    path = tmp_path / "line.json"
    instance = InstanceFile(space=line3, map_=line_map, metadata={"name": "line"})
    path.write_text(json.dumps(instance.to_json_dict()))
    return path
