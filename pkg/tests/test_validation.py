"""Tests for the theorem validation harness."""

import json
from pathlib import Path

import pytest
from pydantic import ValidationError

from multicontract.errors import PreconditionError
from multicontract.mappings import MultiMap, SingleMap, fixed_points, periodic_points
from multicontract.metric import TriangleViolationError
from multicontract.models.instance import GenConfig, InstanceFile
from multicontract.models.validation import (
    SweepSummary,
    TheoremId,
    ValidationOptions,
    ValidationReport,
    Verdict,
)
from multicontract.validation import CardinalityError, validate
from multicontract.validation.harness import (
    TheoremValidator,
    load_gen_config,
    load_instance,
    revalidate,
    sweep,
)
from multicontract.validation.oracle import adjacency, brute_fixed_points, brute_periodic

BENCHMARKS = Path(__file__).resolve().parent.parent / "benchmarks"


class TestOracle:
    """Tests for the brute-force fixed and periodic point oracle."""

    def test_adjacency(self):
        """Test A[x, y] iff y ∈ T(x)."""
        A = adjacency(MultiMap.from_lists([[0, 1], [2], [2]]))
        assert A.tolist() == [[True, True, False], [False, False, True], [False, False, True]]

    def test_agrees_with_mappings(self, random_instances):
        """Test the oracle and the mappings module agree on random maps."""
        for space, T in random_instances(80, seed=31):
            n = space.point_count
            assert brute_fixed_points(T) == fixed_points(T)
            table = brute_periodic(T, n)
            for k in range(1, n + 1):
                assert table[k] == periodic_points(T, k), k

    def test_k_max_range(self, swap):
        """Test k_max outside [1, n]."""
        with pytest.raises(PreconditionError):
            brute_periodic(swap, 3)
        with pytest.raises(PreconditionError):
            brute_periodic(swap, 0)


class TestValidate:
    """Tests for single-instance validation."""

    def test_multi_perimeter_iff_on_line(self, line3, line_map):
        """Test a fixed point and no period-2 points validates the equivalence."""
        report = validate(line3, line_map, TheoremId.C3_11_MULTI_PERIMETER_IFF)
        assert report.verdict is Verdict.VALIDATED
        assert report.fixed_points == [0]
        assert report.instance is None

    def test_orbital_swap_misses_hypothesis(self, unit_pair, swap):
        """Test the 2-cycle is excluded by the period-2 gate, conclusion still computed."""
        report = validate(unit_pair, swap, TheoremId.T4_3_ORBITAL_FIXED)
        assert report.verdict is Verdict.HYPOTHESIS_NOT_MET
        assert not report.conclusion_held
        assert report.periodic_points == {2: [0, 1]}
        assert any("period 2" in note for note in report.notes)

    def test_banach_unique_for_constant_map(self, line3, constant_map):
        """Test a constant single map has exactly one fixed point."""
        report = validate(line3, constant_map(3), TheoremId.C_BANACH_UNIQUE)
        assert report.verdict is Verdict.VALIDATED
        assert report.fixed_points == [0]

    def test_single_valued_results_accept_single_maps(self, line4):
        """Test SingleMap input is lifted."""
        report = validate(line4, SingleMap(target=(2, 2, 2, 2)), TheoremId.T2_4_TWO_FIXED_POINTS)
        assert report.verdict is Verdict.VALIDATED
        assert report.fixed_points == [2]

    def test_single_valued_results_reject_multivalued_maps(self, line3):
        """Test a genuinely multivalued map fails the single-valued hypothesis."""
        T = MultiMap.from_lists([[0, 1], [0], [0]])
        report = validate(line3, T, TheoremId.C_BANACH_UNIQUE)
        assert report.verdict is Verdict.HYPOTHESIS_NOT_MET
        assert "map is not single-valued" in report.notes

    @pytest.mark.parametrize("theorem", [t for t in TheoremId if t.single_valued_only])
    def test_every_single_valued_result_is_gated(self, line4, theorem):
        """Test each single-valued result refuses a multivalued map."""
        T = MultiMap.from_lists([[0, 1], [0], [0], [0]])
        report = validate(line4, T, theorem)
        assert report.verdict is Verdict.HYPOTHESIS_NOT_MET
        assert not report.hypothesis_held
        assert "map is not single-valued" in report.notes

    def test_multivalued_results_skip_the_gate(self, line4):
        """Test results over CB(X) never note single-valuedness."""
        T = MultiMap.from_lists([[0, 1], [0], [0], [0]])
        for theorem in (TheoremId.C3_11_MULTI_PERIMETER_IFF, TheoremId.T4_3_ORBITAL_FIXED):
            assert not theorem.single_valued_only
            assert "map is not single-valued" not in validate(line4, T, theorem).notes

    def test_two_fixed_points_needs_four_points(self, line3, constant_map):
        """Test the cardinality gate."""
        with pytest.raises(CardinalityError) as exc_info:
            validate(line3, constant_map(3), TheoremId.T2_4_TWO_FIXED_POINTS)
        assert exc_info.value.actual == 3

    def test_periodic_exists_at_order_three(self, line3, line_map):
        """Test n = 3 finds the fixed point."""
        report = validate(
            line3, line_map, TheoremId.T3_5_PERIODIC_EXISTS, ValidationOptions(n=3)
        )
        assert report.verdict is Verdict.VALIDATED

    def test_closure_properties(self, line4, constant_map):
        """Test downward and upward closure on a constant map."""
        for theorem in (TheoremId.P3_3_DOWNWARD, TheoremId.P3_4_UPWARD):
            report = validate(line4, constant_map(4), theorem)
            assert report.verdict is Verdict.VALIDATED, theorem
            assert report.certificates

    def test_verdict_must_match(self):
        """Test reports reject a verdict that contradicts hypothesis and conclusion."""
        with pytest.raises(ValidationError):
            ValidationReport(
                theorem=TheoremId.C_BANACH_UNIQUE,
                hypothesis_held=False,
                conclusion_held=True,
                verdict=Verdict.VALIDATED,
            )

    def test_report_round_trip(self, line3, line_map):
        """Test ValidationReport JSON round trip."""
        report = validate(line3, line_map, TheoremId.C3_11_MULTI_PERIMETER_IFF)
        assert ValidationReport.model_validate_json(report.model_dump_json()) == report


class TestHarness:
    """Tests for loading, sweeps and replay."""

    def test_load_instance(self, line_instance_file, line3):
        """Test loading an instance file."""
        instance = load_instance(line_instance_file)
        assert instance.space == line3
        assert instance.metadata == {"name": "line"}

    def test_load_missing_instance(self, tmp_path):
        """Test a missing file."""
        with pytest.raises(FileNotFoundError):
            load_instance(tmp_path / "missing.json")

    def test_load_instance_with_bad_metric(self, tmp_path):
        """Test axiom violations surface as domain errors."""
        path = tmp_path / "bad.json"
        data = {"space": {"dist": [[0, 1, 3], [1, 0, 1], [3, 1, 0]]}, "map": {"targets": [[0], [0], [0]]}}
        path.write_text(json.dumps(data))
        with pytest.raises(TriangleViolationError):
            load_instance(path)

    def test_benchmark_inputs_load(self):
        """Test the bundled example inputs parse."""
        line = load_instance(BENCHMARKS / "line_instance.json")
        swap = load_instance(BENCHMARKS / "swap_instance.json")
        assert line.map_kind == "multi"
        assert swap.map_kind == "single"
        for name in ("hub_sweep.json", "closure_sweep.json"):
            assert load_gen_config(BENCHMARKS / name).point_count_max == 10

    def test_load_gen_config(self, tmp_path):
        """Test loading a generator config."""
        path = tmp_path / "gen.json"
        path.write_text(json.dumps({"point_count": 5, "flavor": {"kind": "line"}}))
        assert load_gen_config(path).point_count == 5

    def test_constant_hub_sweep(self):
        """Test spread-0 hub maps validate Banach uniqueness every time."""
        config = GenConfig(point_count=4, point_count_max=6, map_flavor={"kind": "hub", "spread": 0})
        summary = sweep(config, TheoremId.C_BANACH_UNIQUE, 20, seed=5)
        assert summary.instance_count == 20
        assert summary.validated == 20

    def test_identity_kannan_sweep(self):
        """Test the identity meets the Kannan hypothesis vacuously and has fixed points."""
        config = GenConfig(point_count=3, point_count_max=5, map_flavor={"kind": "identity"})
        summary = sweep(config, TheoremId.T5_4_KANNAN_FIXED, 10)
        assert summary.validated == 10

    @pytest.mark.parametrize(
        "theorem,config",
        [
            (TheoremId.T3_5_PERIODIC_EXISTS, {"point_count": 4, "point_count_max": 6}),
            (TheoremId.C3_10_SINGLE_PERIMETER_IFF, {"point_count": 3, "point_count_max": 6,
                                                    "map_flavor": {"kind": "single_random"}}),
            (TheoremId.P3_3_DOWNWARD, {"point_count": 4, "point_count_max": 6}),
            (TheoremId.P3_4_UPWARD, {"point_count": 4, "point_count_max": 6}),
        ],
    )
    def test_sweeps_find_no_counterexamples(self, theorem, config):
        """Test random sweeps of proven results."""
        summary = sweep(GenConfig.model_validate(config), theorem, 40, seed=2)
        assert summary.counterexamples == 0
        assert summary.errors == 0
        assert summary.validated + summary.hypothesis_not_met == 40

    @pytest.mark.parametrize(
        "theorem",
        [TheoremId.T4_3_ORBITAL_FIXED, TheoremId.T5_4_KANNAN_FIXED, TheoremId.T6_4_CHATTERJEA_FIXED],
    )
    def test_orbit_sweeps_account_for_every_instance(self, theorem):
        """Test verdict counts cover the whole sweep."""
        config = GenConfig(point_count=3, point_count_max=6, map_flavor={"kind": "hub", "spread": 1})
        summary = sweep(config, theorem, 30, seed=9)
        assert summary.errors == 0
        assert summary.validated + summary.hypothesis_not_met + summary.counterexamples == 30
        assert len(summary.reports) == summary.counterexamples

    def test_sweeps_are_reproducible(self):
        """Test identical seeds give identical summaries."""
        config = GenConfig(point_count=4, point_count_max=6, flavor={"kind": "closure_random"})
        first = sweep(config, TheoremId.T3_5_PERIODIC_EXISTS, 15, seed=4)
        second = sweep(config, TheoremId.T3_5_PERIODIC_EXISTS, 15, seed=4)
        assert first == second

    def test_failed_instances_are_counted(self):
        """Test per-instance errors do not abort the sweep."""
        config = GenConfig(point_count=3, map_flavor={"kind": "single_random"})
        summary = sweep(config, TheoremId.T2_4_TWO_FIXED_POINTS, 5)
        assert summary.errors == 5
        assert summary.instance_count == 5
        assert summary.validated == 0

    def test_instance_count_must_be_positive(self):
        """Test an empty sweep is rejected."""
        with pytest.raises(PreconditionError):
            sweep(GenConfig(point_count=3), TheoremId.C3_11_MULTI_PERIMETER_IFF, 0)

    async def test_validator_with_engine(self, line3, line_map):
        """Test TheoremValidator inside an engine context."""
        from multicontract.engine import ContractionEngine

        async with ContractionEngine(workers=1) as engine:
            validator = TheoremValidator(engine)
            report = await validator.validate_instance(
                InstanceFile(space=line3, map_=line_map), TheoremId.C3_11_MULTI_PERIMETER_IFF
            )
        assert report.verdict is Verdict.VALIDATED

    async def test_validate_instance_runs_on_the_pool(self, line3, line_map, constant_map):
        """Test single-instance checks go through the worker pool and re-raise failures."""
        from multicontract.engine import ContractionEngine

        instance = InstanceFile(space=line3, map_=line_map)
        async with ContractionEngine(workers=2) as engine:
            validator = TheoremValidator(engine)
            report = await validator.validate_instance(instance, TheoremId.T4_3_ORBITAL_FIXED)
            with pytest.raises(CardinalityError) as exc_info:
                await validator.validate_instance(
                    InstanceFile(space=line3, map_=constant_map(3)),
                    TheoremId.T2_4_TWO_FIXED_POINTS,
                )
        assert report == validate(line3, line_map, TheoremId.T4_3_ORBITAL_FIXED)
        assert exc_info.value.actual == 3


class TestReplay:
    """Tests for counterexample bundles and revalidate."""

    def _flagged_report(self, line3, constant_map) -> ValidationReport:
        return ValidationReport(
            theorem=TheoremId.C_BANACH_UNIQUE,
            hypothesis_held=True,
            conclusion_held=False,
            verdict=Verdict.COUNTEREXAMPLE,
            instance=InstanceFile(space=line3, map_=constant_map(3)),
        )

    def test_revalidate_recomputes(self, line3, constant_map):
        """Test replay decides the embedded instance afresh."""
        replayed = revalidate(self._flagged_report(line3, constant_map))
        assert replayed.verdict is Verdict.VALIDATED

    def test_revalidate_needs_instance(self, line3, line_map):
        """Test reports without an instance cannot be replayed."""
        report = validate(line3, line_map, TheoremId.C3_11_MULTI_PERIMETER_IFF)
        with pytest.raises(PreconditionError):
            revalidate(report)

    def test_save_summary_writes_bundles(self, tmp_path, line3, constant_map):
        """Test the summary file and one bundle per counterexample."""
        summary = SweepSummary(theorem=TheoremId.C_BANACH_UNIQUE)
        summary.add(self._flagged_report(line3, constant_map))

        validator = TheoremValidator(engine=None)  # type: ignore[arg-type]
        out = tmp_path / "sweep.json"
        validator.save_summary(summary, out)

        saved = SweepSummary.model_validate_json(out.read_text())
        assert saved.counterexamples == 1
        bundle = tmp_path / "sweep.counterexample-1.json"
        replayed = revalidate(ValidationReport.model_validate_json(bundle.read_text()))
        assert replayed.verdict is Verdict.VALIDATED

    def test_summary_report_lists_counterexamples(self, line3, constant_map):
        """Test the text report."""
        summary = SweepSummary(theorem=TheoremId.C_BANACH_UNIQUE)
        summary.add(self._flagged_report(line3, constant_map))
        text = summary.to_report()
        assert "COUNTEREXAMPLES (1)" in text
        assert "3-point instance" in text


@pytest.mark.slow
class TestAcceptanceSweeps:
    """Desk-scale sweeps of the proven results."""

    @pytest.mark.parametrize("n", [3, 4])
    def test_periodic_exists(self, n):
        """Test 250 instances per order on 5-10 points."""
        config = GenConfig(point_count=5, point_count_max=10, map_flavor={"kind": "hub", "spread": 2})
        summary = sweep(
            config, TheoremId.T3_5_PERIODIC_EXISTS, 250, seed=n, options=ValidationOptions(n=n),
            workers=2,
        )
        assert summary.counterexamples == 0
        assert summary.errors == 0

    @pytest.mark.parametrize("theorem", [TheoremId.P3_3_DOWNWARD, TheoremId.P3_4_UPWARD])
    def test_closure(self, theorem):
        """Test 100 instances on 8-10 points."""
        config = GenConfig(point_count=8, point_count_max=10, map_flavor={"kind": "hub", "spread": 1})
        summary = sweep(config, theorem, 100, seed=1, workers=2)
        assert summary.counterexamples == 0
        assert summary.errors == 0

    @pytest.mark.parametrize(
        "theorem",
        [TheoremId.T4_3_ORBITAL_FIXED, TheoremId.T5_4_KANNAN_FIXED, TheoremId.T6_4_CHATTERJEA_FIXED],
    )
    @pytest.mark.parametrize(
        ("map_flavor", "point_count", "point_count_max", "floor"),
        [
            ({"kind": "hub", "spread": 1}, 3, 5, 10),
            ({"kind": "hub", "spread": 2}, 4, 7, 1),
            ({"kind": "uniform_random", "max_image": 2}, 3, 5, 1),
        ],
    )
    def test_orbit_fixed_point_results(self, theorem, map_flavor, point_count, point_count_max, floor):
        """Test 800 multivalued instances per flavor without a counterexample."""
        config = GenConfig(
            point_count=point_count, point_count_max=point_count_max, map_flavor=map_flavor
        )
        summary = sweep(config, theorem, 800, seed=17, workers=2)
        assert summary.counterexamples == 0
        assert summary.errors == 0
        assert summary.validated >= floor

    @pytest.mark.parametrize(
        "theorem",
        [
            TheoremId.T2_4_TWO_FIXED_POINTS,
            TheoremId.C3_10_SINGLE_PERIMETER_IFF,
            TheoremId.C_BANACH_UNIQUE,
        ],
    )
    @pytest.mark.parametrize("flavor", [{"kind": "euclidean", "dim": 2}, {"kind": "line"}])
    def test_single_valued_results(self, theorem, flavor):
        """Test 1500 random single-valued maps on four points."""
        # about 1 in 64 of these maps is constant, and every constant map validates
        config = GenConfig(point_count=4, flavor=flavor, map_flavor={"kind": "single_random"})
        summary = sweep(config, theorem, 1500, seed=5, workers=2)
        assert summary.counterexamples == 0
        assert summary.errors == 0
        assert summary.validated >= 10
