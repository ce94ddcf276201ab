"""Tests for the parallel engine."""

import pytest

from multicontract.certification import SpaceTooSmall, certify
from multicontract.engine import ContractionEngine
from multicontract.generators import generate_instance
from multicontract.iteration import picard_iterate
from multicontract.models.certificate import ClassRequest, ContractionClass
from multicontract.models.instance import GenConfig
from multicontract.models.validation import TheoremId, Verdict
from multicontract.validation import CardinalityError
from multicontract.validation.harness import TheoremValidator


class TestContractionEngine:
    """Tests for ContractionEngine."""

    async def test_context_manager(self):
        """Test the pool exists only inside the block."""
        async with ContractionEngine(workers=2) as engine:
            assert engine._pool is not None
        assert engine._pool is None

    async def test_inline_engine_has_no_pool(self):
        """Test workers == 1 runs without processes."""
        async with ContractionEngine(workers=1) as engine:
            assert engine._pool is None

    async def test_certify_matches_serial(self, random_instances):
        """Test chunked parallel certification equals the serial result."""
        requests = [
            ClassRequest(class_id=c)
            for c in ContractionClass
            if c is not ContractionClass.TOTAL_PAIRWISE
        ]
        requests.append(ClassRequest(class_id=ContractionClass.TOTAL_PAIRWISE, order=3))

        async with ContractionEngine(workers=2) as engine:
            for space, T in random_instances(6, seed=41):
                certificates = await engine.certify_many(space, T, requests)
                for request, cert in zip(requests, certificates, strict=True):
                    assert cert == certify(space, T, request.class_id, order=request.order)

    async def test_certify_by_alias(self, line3, line_map):
        """Test requests parse the 'class' key."""
        request = ClassRequest.model_validate({"class": "perimeter"})
        async with ContractionEngine(workers=1) as engine:
            cert = await engine.certify(line3, line_map, request)
        assert cert.tightest == 0.5

    async def test_certify_raises_before_scheduling(self, line3, line_map):
        """Test cardinality errors surface from certify_many."""
        request = ClassRequest(class_id=ContractionClass.TOTAL_PAIRWISE, order=5)
        async with ContractionEngine(workers=2) as engine:
            with pytest.raises(SpaceTooSmall):
                await engine.certify_many(line3, line_map, [request])

    async def test_iterate_many_keeps_order(self, line3, line_map):
        """Test one trace per start, in input order."""
        async with ContractionEngine(workers=2) as engine:
            traces = await engine.iterate_many(line3, line_map, [2, 0, 1])
        assert [t.points[0] for t in traces] == [2, 0, 1]
        assert traces[0] == picard_iterate(line3, line_map, 2)

    async def test_validate_many_captures_errors(self, line3, line4, constant_map):
        """Test a failing instance is returned in place, not raised."""
        from multicontract.models.instance import InstanceFile

        instances = [
            InstanceFile(space=line4, map_=constant_map(4)),
            InstanceFile(space=line3, map_=constant_map(3)),
        ]
        async with ContractionEngine(workers=1) as engine:
            results = await engine.validate_many(instances, TheoremId.T2_4_TWO_FIXED_POINTS)
        assert results[0].verdict is Verdict.VALIDATED
        assert isinstance(results[1], CardinalityError)

    @pytest.mark.parametrize("workers", [1, 2])
    async def test_sweep_independent_of_workers(self, workers):
        """Test sweeps give the same summary at any worker count."""
        config = GenConfig(point_count=4, point_count_max=6, seed=3)
        async with ContractionEngine(workers=1) as engine:
            reference = await TheoremValidator(engine).sweep(
                config, TheoremId.T3_5_PERIODIC_EXISTS, 12
            )
        async with ContractionEngine(workers=workers) as engine:
            summary = await TheoremValidator(engine).sweep(
                config, TheoremId.T3_5_PERIODIC_EXISTS, 12
            )
        assert summary == reference

    async def test_validate_many_order(self):
        """Test reports line up with their instances."""
        config = GenConfig(point_count=3, point_count_max=6, map_flavor={"kind": "single_random"})
        instances = [generate_instance(config, seed=s) for s in range(8)]
        async with ContractionEngine(workers=2) as engine:
            reports = await engine.validate_many(instances, TheoremId.C3_10_SINGLE_PERIMETER_IFF)
        for instance, report in zip(instances, reports, strict=True):
            assert report.fixed_points == sorted(
                x for x in range(instance.space.point_count) if x in instance.multimap(x)
            )

    async def test_worker_errors_are_counted(self):
        """Test exceptions raised in worker processes come back as errors."""
        config = GenConfig(point_count=3, map_flavor={"kind": "single_random"})
        async with ContractionEngine(workers=2) as engine:
            summary = await TheoremValidator(engine).sweep(
                config, TheoremId.T2_4_TWO_FIXED_POINTS, 4
            )
        assert summary.errors == 4
