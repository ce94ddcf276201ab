"""Parallel orchestration of certification, iteration and validation.

ARCHITECTURE:
    requests → ContractionEngine → ProcessPoolExecutor workers → ordered results

Certification of one class splits its tuple domain into contiguous chunks and
merges the partial scans; batches of instances run one task per instance.

Key Design:
- Async context manager owning the process pool
- Semaphore bounds in-flight tasks, asyncio.gather keeps submission order
- workers == 1 runs everything inline, without a pool
- Batch exceptions captured, not raised
"""

import asyncio
import logging
from collections.abc import Callable
from concurrent.futures import ProcessPoolExecutor
from functools import partial
from typing import Any, TypeVar

from multicontract.certification import ContractionChecker, ScanResult, merge_scans
from multicontract.config import get_settings
from multicontract.iteration import picard_iterate
from multicontract.mappings import MultiMap
from multicontract.metric import MetricSpace
from multicontract.models.certificate import Certificate, ClassRequest
from multicontract.models.instance import InstanceFile
from multicontract.models.trace import OrbitTrace, SelectionPolicy
from multicontract.models.validation import TheoremId, ValidationOptions, ValidationReport
from multicontract.validation.theorems import validate

logger = logging.getLogger(__name__)

R = TypeVar("R")


def _checker(
    space: MetricSpace, T: MultiMap, request: ClassRequest, tolerance: float | None
) -> ContractionChecker:
    return ContractionChecker(
        space,
        T,
        request.class_id,
        order=request.order,
        distinct_points=request.distinct_points,
        include_degenerate=request.include_degenerate,
        chatterjea_domain=request.chatterjea_domain,
        tolerance=tolerance,
    )


def _scan_chunk(
    space: MetricSpace,
    T: MultiMap,
    request: ClassRequest,
    tolerance: float | None,
    chunk: list[tuple[int, ...]],
) -> ScanResult:
    return _checker(space, T, request, tolerance).scan(chunk)


def _validate_instance(
    instance: InstanceFile, theorem: TheoremId, options: ValidationOptions
) -> ValidationReport:
    return validate(instance.space, instance.map_, theorem, options)


class ContractionEngine:
    """
    Engine for CPU-bound certification work.

    Use with 'async with'; the process pool lives for the duration of the block.
    Results always come back in input order, whatever the worker count.
    """

    def __init__(self, workers: int | None = None, max_concurrent: int | None = None) -> None:
        self.workers = workers or get_settings().resolved_workers()
        self.max_concurrent = max_concurrent or 2 * self.workers
        self._pool: ProcessPoolExecutor | None = None
        self._semaphore: asyncio.Semaphore | None = None

    async def __aenter__(self) -> "ContractionEngine":
        if self.workers > 1:
            self._pool = ProcessPoolExecutor(max_workers=self.workers)
        self._semaphore = asyncio.Semaphore(self.max_concurrent)
        return self

    async def __aexit__(self, exc_type: Any, exc_val: Any, exc_tb: Any) -> None:
        if self._pool is not None:
            self._pool.shutdown(wait=True, cancel_futures=True)
            self._pool = None

    async def _run(self, fn: Callable[..., R], *args: Any) -> R:
        if self._pool is None:
            return fn(*args)
        assert self._semaphore is not None
        async with self._semaphore:
            loop = asyncio.get_running_loop()
            return await loop.run_in_executor(self._pool, partial(fn, *args))

    async def certify(
        self,
        space: MetricSpace,
        T: MultiMap,
        request: ClassRequest,
        tolerance: float | None = None,
    ) -> Certificate:
        """Certify one class, scanning domain chunks in parallel.

        Raises:
            SpaceTooSmall: before any work is scheduled
        """
        checker = _checker(space, T, request, tolerance)
        if self._pool is None:
            return checker.certify()

        chunks = checker.chunks(self.workers)
        partials = await asyncio.gather(
            *[self._run(_scan_chunk, space, T, request, tolerance, chunk) for chunk in chunks]
        )
        return checker.certificate(merge_scans(partials))

    async def certify_many(
        self,
        space: MetricSpace,
        T: MultiMap,
        requests: list[ClassRequest],
        tolerance: float | None = None,
    ) -> list[Certificate]:
        """Certify several classes of the same map; raises on the first failure."""
        return list(
            await asyncio.gather(*[self.certify(space, T, r, tolerance) for r in requests])
        )

    async def iterate_many(
        self,
        space: MetricSpace,
        T: MultiMap,
        starts: list[int],
        policy: SelectionPolicy | None = None,
        max_steps: int | None = None,
    ) -> list[OrbitTrace]:
        """One Picard trace per starting point."""
        tasks = [self._run(picard_iterate, space, T, x0, policy, max_steps) for x0 in starts]
        return list(await asyncio.gather(*tasks))

    async def validate_many(
        self,
        instances: list[InstanceFile],
        theorem: TheoremId,
        options: ValidationOptions | None = None,
    ) -> list[ValidationReport | BaseException]:
        """
        Validate a batch of instances concurrently.

        Exceptions are returned in place of reports so one bad instance never
        aborts a sweep.
        """
        options = options or ValidationOptions()
        tasks = [self._run(_validate_instance, inst, theorem, options) for inst in instances]
        return list(await asyncio.gather(*tasks, return_exceptions=True))
