"""Sweeps of theorem checks over generated instances.

ARCHITECTURE:
    GenConfig + seed → generated instances → ContractionEngine → ValidationReports → SweepSummary

Key Design:
- Per-instance seeds derive from (sweep seed, index), so a sweep is identical
  at any worker count
- Failed instances are logged and counted, never fatal
- Counterexample reports embed their instance and can be replayed with revalidate
"""

import asyncio
import json
import logging
from pathlib import Path

from multicontract.engine import ContractionEngine
from multicontract.errors import PreconditionError
from multicontract.generators import derive_seed, generate_instance
from multicontract.models.instance import GenConfig, InstanceFile
from multicontract.models.validation import (
    SweepSummary,
    TheoremId,
    ValidationOptions,
    ValidationReport,
)
from multicontract.validation.theorems import validate

logger = logging.getLogger(__name__)


def load_instance(path: str | Path, tolerance: float | None = None) -> InstanceFile:
    """Load and validate an instance file.

    Raises:
        FileNotFoundError: If file does not exist
        json.JSONDecodeError, pydantic.ValidationError: malformed content
        InvariantViolation: the space or map breaks a domain invariant
    """
    path = Path(path)
    if not path.exists():
        raise FileNotFoundError(f"Instance file not found: {path}")

    logger.info(f"Loading instance from {path}")
    data = json.loads(path.read_text(encoding="utf-8"))
    return InstanceFile.model_validate(data, context={"tolerance": tolerance})


def load_gen_config(path: str | Path) -> GenConfig:
    path = Path(path)
    if not path.exists():
        raise FileNotFoundError(f"Generator config not found: {path}")
    return GenConfig.model_validate_json(path.read_text(encoding="utf-8"))


class TheoremValidator:
    """Runs theorem checks on single instances and generated batches."""

    def __init__(self, engine: ContractionEngine) -> None:
        """Initialize the validator.

        Args:
            engine: Engine that schedules the per-instance checks
        """
        self.engine = engine

    async def validate_instance(
        self,
        instance: InstanceFile,
        theorem: TheoremId,
        options: ValidationOptions | None = None,
    ) -> ValidationReport:
        """Check one instance on the engine; unlike sweeps, failures raise."""
        (result,) = await self.engine.validate_many([instance], theorem, options)
        if isinstance(result, BaseException):
            raise result
        return result

    async def sweep(
        self,
        config: GenConfig,
        theorem: TheoremId,
        instance_count: int,
        seed: int | None = None,
        options: ValidationOptions | None = None,
    ) -> SweepSummary:
        """Generate instance_count instances and validate the theorem on each.

        Args:
            config: Recipe for the instances
            theorem: Result to check
            instance_count: Number of instances
            seed: Sweep seed; defaults to config.seed

        Returns:
            Verdict counts plus every counterexample report
        """
        if instance_count < 1:
            raise PreconditionError(f"instance_count must be positive, got {instance_count}")
        seed = config.seed if seed is None else seed
        options = options or ValidationOptions()

        logger.info(f"Starting {theorem.value} sweep of {instance_count} instances (seed {seed})")

        instances = [generate_instance(config, derive_seed(seed, i)) for i in range(instance_count)]
        results = await self.engine.validate_many(instances, theorem, options)

        summary = SweepSummary(theorem=theorem, config=config, seed=seed)
        for idx, result in enumerate(results):
            if isinstance(result, BaseException):
                logger.error(f"Validation failed for instance {idx}: {result}")
                summary.errors += 1
                summary.instance_count += 1
            else:
                summary.add(result)

        logger.info(
            f"Sweep complete: {summary.validated} validated, "
            f"{summary.hypothesis_not_met} hypothesis not met, "
            f"{summary.counterexamples} counterexamples, {summary.errors} errors"
        )
        return summary

    def save_summary(self, summary: SweepSummary, output_path: str | Path) -> None:
        """Write the summary JSON, plus one bundle per counterexample beside it."""
        output_path = Path(output_path)
        output_path.write_text(summary.model_dump_json(by_alias=True, indent=2), encoding="utf-8")
        for idx, report in enumerate(summary.reports, 1):
            bundle = output_path.with_name(f"{output_path.stem}.counterexample-{idx}.json")
            bundle.write_text(report.model_dump_json(by_alias=True, indent=2), encoding="utf-8")
        logger.info(f"Saved sweep summary to {output_path}")


def sweep(
    config: GenConfig,
    theorem: TheoremId,
    instance_count: int,
    seed: int | None = None,
    options: ValidationOptions | None = None,
    workers: int = 1,
) -> SweepSummary:
    """Synchronous sweep; see TheoremValidator.sweep."""

    async def run() -> SweepSummary:
        async with ContractionEngine(workers=workers) as engine:
            return await TheoremValidator(engine).sweep(config, theorem, instance_count, seed, options)

    return asyncio.run(run())


def revalidate(report: ValidationReport) -> ValidationReport:
    """Replay a report from its embedded instance and options."""
    if report.instance is None:
        raise PreconditionError("report carries no instance to replay")
    return validate(report.instance.space, report.instance.map_, report.theorem, report.options)

