"""Tests for instance generators."""

import numpy as np
import pytest
from pydantic import ValidationError

from multicontract.certification import certify_banach
from multicontract.errors import PreconditionError
from multicontract.generators import (
    cycle_map,
    derive_seed,
    generate_instance,
    hub_map,
    metric_closure,
    random_euclidean_space,
    random_line_space,
    random_metric_space,
    random_multimap,
    single_random_map,
)
from multicontract.mappings import periodic_points
from multicontract.metric import validate_metric
from multicontract.models.instance import GenConfig, InstanceFile


class TestSpaces:
    """Tests for random metric spaces."""

    def test_euclidean_space(self):
        """Test shape, symmetry and positivity of Euclidean distances."""
        space = random_euclidean_space(6, 3, seed=1)
        m = space.matrix
        assert m.shape == (6, 6)
        assert np.array_equal(m, m.T)
        assert np.all(np.diag(m) == 0)
        assert np.all(m[~np.eye(6, dtype=bool)] > 0)

    def test_single_point(self):
        """Test the one-point Euclidean space."""
        assert random_euclidean_space(1, 2, seed=0).point_count == 1

    def test_closure_repairs_triangle_violation(self):
        """Test shortest paths replace the long side."""
        weights = np.array([[0, 1, 3], [1, 0, 1], [3, 1, 0]], dtype=float)
        closure = metric_closure(weights)
        assert closure[0, 2] == 2.0
        assert validate_metric(3, closure.tolist()).d(0, 2) == 2.0

    def test_closure_of_two_points_is_unchanged(self):
        """Test a single edge is already a metric."""
        weights = np.array([[0, 0.4], [0.4, 0]])
        assert np.array_equal(metric_closure(weights), weights)

    def test_closure_spaces_pass_validation(self):
        """Test closure spaces over many seeds."""
        for seed in range(25):
            space = random_metric_space(8, seed)
            assert space.point_count == 8
            assert space.matrix.min(initial=np.inf, where=~np.eye(8, dtype=bool)) >= 0.1

    def test_line_spaces_are_integral(self):
        """Test integer positions compare exactly."""
        space = random_line_space(5, seed=3)
        assert space.is_integral
        assert space.distance_slack(1e-6) == 0.0

    def test_same_seed_same_space(self):
        """Test generators are pure functions of the seed."""
        assert random_metric_space(5, 11) == random_metric_space(5, 11)
        assert random_euclidean_space(5, 2, 11) == random_euclidean_space(5, 2, 11)
        assert random_metric_space(5, 11) != random_metric_space(5, 12)

    def test_bad_arguments(self):
        """Test size preconditions."""
        with pytest.raises(PreconditionError):
            random_euclidean_space(0, 2, seed=0)
        with pytest.raises(PreconditionError):
            random_metric_space(1, seed=0)


class TestMaps:
    """Tests for random and structured maps."""

    def test_max_image_one_is_single_valued(self):
        """Test max_image = 1 yields singleton images."""
        space = random_metric_space(6, 2)
        assert random_multimap(space, 1, seed=5).is_single_valued
        assert single_random_map(space, seed=5).is_single_valued

    def test_images_respect_max_image(self):
        """Test image sizes stay within bounds."""
        space = random_metric_space(7, 4)
        T = random_multimap(space, 3, seed=8)
        assert all(1 <= len(T(x).members) <= 3 for x in range(7))

    def test_hub_spread_zero_is_constant(self):
        """Test spread 0 sends every point to the hub and certifies Banach at 0."""
        space = random_euclidean_space(5, 2, seed=6)
        T = hub_map(space, 2, 0, seed=1)
        assert all(T(x).members == (2,) for x in range(5))
        assert certify_banach(space, T).tightest == 0.0

    def test_hub_images_stay_near_hub(self):
        """Test images are drawn from the spread+1 nearest points."""
        space = random_line_space(6, seed=9)
        T = hub_map(space, 0, 1, seed=4)
        nearest = set(np.argsort(space.matrix[0], kind="stable")[:2].tolist())
        assert all(set(T(x).members) <= nearest for x in range(6))

    def test_cycle_map_has_prime_period(self):
        """Test the cycle points have the requested prime period."""
        space = random_line_space(5, seed=2)
        T = cycle_map(space, 3, seed=0)
        assert periodic_points(T, 3) == {0, 1, 2}

    def test_cycle_length_out_of_range(self):
        """Test cycle lengths beyond the space."""
        space = random_line_space(3, seed=2)
        with pytest.raises(PreconditionError):
            cycle_map(space, 4, seed=0)


class TestGenConfig:
    """Tests for generator configs and generate_instance."""

    def test_example_config_parses(self):
        """Test the documented example."""
        example = GenConfig.model_config["json_schema_extra"]["example"]
        config = GenConfig.model_validate(example)
        assert config.map_flavor.kind == "hub"

    def test_size_range_must_be_ordered(self):
        """Test point_count_max below point_count."""
        with pytest.raises(ValidationError):
            GenConfig(point_count=5, point_count_max=4)

    def test_hub_outside_space(self):
        """Test hub_index beyond point_count."""
        with pytest.raises(ValidationError):
            GenConfig.model_validate({"point_count": 3, "map_flavor": {"kind": "hub", "hub_index": 3}})

    def test_unknown_flavor(self):
        """Test discriminated unions reject unknown kinds."""
        with pytest.raises(ValidationError):
            GenConfig.model_validate({"point_count": 3, "flavor": {"kind": "torus"}})

    def test_generate_instance_is_deterministic(self):
        """Test identical configs give identical instances."""
        config = GenConfig(point_count=5, seed=3)
        first = generate_instance(config)
        second = generate_instance(config)
        assert first.to_json_dict() == second.to_json_dict()
        assert first.metadata["seed"] == "3"

    def test_seed_override(self):
        """Test an explicit seed replaces config.seed."""
        config = GenConfig(point_count=5, seed=3)
        assert generate_instance(config, seed=4) != generate_instance(config)

    def test_size_range(self):
        """Test sizes are drawn within [point_count, point_count_max]."""
        config = GenConfig(point_count=3, point_count_max=6, flavor={"kind": "closure_random"})
        sizes = {generate_instance(config, seed=s).space.point_count for s in range(40)}
        assert sizes <= {3, 4, 5, 6}
        assert len(sizes) > 1

    def test_instances_round_trip(self):
        """Test generated instances reload through InstanceFile."""
        config = GenConfig(point_count=4, flavor={"kind": "line"}, map_flavor={"kind": "cycle"})
        instance = generate_instance(config, seed=1)
        reloaded = InstanceFile.model_validate(instance.to_json_dict())
        assert reloaded.space == instance.space
        assert reloaded.multimap == instance.multimap


class TestDeriveSeed:
    """Tests for derive_seed."""

    def test_deterministic_and_distinct(self):
        """Test per-index seeds are stable and differ across indices."""
        seeds = [derive_seed(7, i) for i in range(100)]
        assert seeds == [derive_seed(7, i) for i in range(100)]
        assert len(set(seeds)) == 100
        assert all(0 <= s < 2**64 for s in seeds)
