"""Multivalued Picard iteration and the error bounds of the convergence proofs.

ARCHITECTURE:
    (MultiMap, x0, SelectionPolicy) → picard_iterate → OrbitTrace
    OrbitTrace + Certificate → effective rate, p, a priori bounds, chain diagnostics

Iteration stops on membership (x_i ∈ T x_i), on the first repeated state, or on
the step budget. Deterministic policies make the successor a function of the
current point, so repeats of points are cycles; seeded_random keys repeats on
(point, generator state).

The chain diagnostics track the quantity each convergence proof contracts:
  banach, kannan             d(x_i, x_{i+1})
  orbital, chatterjea        perimeter of (x_i, x_{i+1}, x_{i+2})
  perimeter, total_pairwise  S(x_i, ..., x_{i+n-1})
and flag every index where q_{i+1} > rate · q_i although the step tuple lies in
the class domain. They are advisory; they never stop an iteration.
"""

import json
import logging
import math
import sys

import numpy as np

from multicontract.config import get_settings
from multicontract.errors import PreconditionError
from multicontract.mappings import MultiMap, check_fits
from multicontract.metric import MetricSpace
from multicontract.models.certificate import Certificate, ChatterjeaDomain, ContractionClass
from multicontract.models.trace import (
    OrbitTrace,
    Outcome,
    OutcomeKind,
    PolicyKind,
    SelectionPolicy,
    TraceBounds,
)

logger = logging.getLogger(__name__)


class OutOfRange(PreconditionError):
    """Constant lies outside the admissible range of its class."""

    pass


class TraceTooShort(PreconditionError):
    """The trace has too few points for the requested quantity."""

    pass


def _select(space: MetricSpace, x: int, members: tuple[int, ...], policy: SelectionPolicy,
            rng: np.random.Generator | None) -> int:
    if policy.kind is PolicyKind.FIRST_INDEX:
        return members[0]
    row = space.dist[x]
    if policy.kind is PolicyKind.NEAREST:
        return min(members, key=lambda m: (row[m], m))
    if policy.kind is PolicyKind.FARTHEST:
        return min(members, key=lambda m: (-row[m], m))
    assert rng is not None
    return members[int(rng.integers(len(members)))]


def _state_key(rng: np.random.Generator) -> str:
    return json.dumps(rng.bit_generator.state, sort_keys=True, default=str)


def picard_iterate(
    space: MetricSpace,
    T: MultiMap,
    x0: int,
    policy: SelectionPolicy | None = None,
    max_steps: int | None = None,
) -> OrbitTrace:
    """Run x_{i+1} ∈ T x_i from x0 until a fixed point, a repeat, or max_steps steps."""
    check_fits(space, T)
    space.require_point(x0)
    policy = policy or SelectionPolicy()
    max_steps = get_settings().max_steps if max_steps is None else max_steps
    if max_steps < 1:
        raise PreconditionError(f"max_steps must be positive, got {max_steps}")

    rng = None if policy.deterministic else np.random.default_rng(policy.seed)

    def key(point: int) -> object:
        return point if rng is None else (point, _state_key(rng))

    points = [x0]
    step_dists: list[float] = []
    seen = {key(x0): 0}
    x = x0

    while True:
        if x in T(x):
            outcome = Outcome(kind=OutcomeKind.FIXED_POINT, point=x)
            break
        if len(step_dists) >= max_steps:
            outcome = Outcome(kind=OutcomeKind.STEP_LIMIT)
            break

        nxt = _select(space, x, T(x).members, policy, rng)
        step_dists.append(space.d(x, nxt))
        points.append(nxt)

        state = key(nxt)
        index = len(points) - 1
        if state in seen:
            start = seen[state]
            outcome = Outcome(kind=OutcomeKind.CYCLE, start=start, length=index - start)
            break
        seen[state] = index
        x = nxt

    return OrbitTrace(
        points=points,
        step_dists=step_dists,
        outcome=outcome,
        steps_taken=len(step_dists),
        policy=policy,
    )


def extended_orbit(trace: OrbitTrace, length: int) -> list[int]:
    """The first `length` orbit points, continuing a terminated trace legitimately.

    A fixed point x* continues as x*, x*, ... (x* ∈ T x*); a cycle continues by
    walking its recorded transitions again.
    """
    points = trace.points
    if length <= len(points):
        return points[:length]

    outcome = trace.outcome
    if outcome.kind is OutcomeKind.FIXED_POINT:
        return points + [points[-1]] * (length - len(points))
    if outcome.kind is OutcomeKind.CYCLE:
        start, period = outcome.start, outcome.length
        assert start is not None and period is not None
        return [points[start + (i - start) % period] if i >= start else points[i]
                for i in range(length)]
    raise TraceTooShort(f"need {length} orbit points, trace stopped at {len(points)}")


def effective_rate(
    class_id: ContractionClass, constant: float, *, conservative: bool = False
) -> float:
    """Per-step contraction factor used by the convergence argument.

    kannan → β/(2-β), chatterjea → γ/(1-γ), others pass α through.
    With conservative=True kannan uses β/(2(1-β)), the factor the Kannan case
    analysis supports once the -β d(x_{n+2}, x_{n+3}) term is kept.
    """
    if class_id is ContractionClass.CHATTERJEA:
        if not 0.0 < constant < 0.5:
            raise OutOfRange(f"chatterjea constant must lie in (0, 1/2), got {constant}")
        return constant / (1 - constant)
    if class_id is ContractionClass.KANNAN:
        if not 0.0 <= constant < 2 / 3:
            raise OutOfRange(f"kannan constant must lie in [0, 2/3), got {constant}")
        if conservative:
            return constant / (2 * (1 - constant))
        return constant / (2 - constant)
    if not 0.0 <= constant < 1.0:
        raise OutOfRange(f"{class_id.value} constant must lie in [0, 1), got {constant}")
    return constant


def window_size(class_id: ContractionClass, order: int | None = None) -> int:
    """Number of consecutive orbit points the contracted quantity spans."""
    if class_id in (ContractionClass.BANACH, ContractionClass.KANNAN):
        return 2
    if class_id in (ContractionClass.ORBITAL, ContractionClass.CHATTERJEA):
        return 3
    if class_id is ContractionClass.PERIMETER:
        return 3
    if order is None or order < 2:
        raise PreconditionError("total_pairwise needs an order n ≥ 2")
    return order


def _window_quantity(space: MetricSpace, window: list[int]) -> float:
    total = 0.0
    for i in range(len(window)):
        for j in range(i + 1, len(window)):
            total += space.d(window[i], window[j])
    return total


def initial_quantity_p(
    space: MetricSpace,
    class_id: ContractionClass,
    trace: OrbitTrace,
    n_for_S: int | None = None,
) -> float:
    """p of the convergence proof, computed from the head of the trace.

    banach, kannan: d(x0, x1); orbital, chatterjea, perimeter: perimeter of
    (x0, x1, x2); total_pairwise: S(x0, ..., x_{n-1}).

    Raises:
        TraceTooShort: the trace stopped at the step limit before enough points
    """
    size = window_size(class_id, n_for_S)
    return _window_quantity(space, extended_orbit(trace, size))


def a_priori_bound(rate: float, p: float, n: int) -> float:
    """rate^n · p / (1 - rate): bound on d(x_n, x_m) for every m > n."""
    if not 0.0 <= rate < 1.0:
        raise OutOfRange(f"rate must lie in [0, 1), got {rate}")
    if n < 0:
        raise PreconditionError(f"n must be nonnegative, got {n}")
    return rate**n * p / (1 - rate)


def required_steps(rate: float, p: float, eps: float) -> int:
    """Smallest n with a_priori_bound(rate, p, n) ≤ eps."""
    if eps <= 0.0:
        raise PreconditionError(f"eps must be positive, got {eps}")
    if a_priori_bound(rate, p, 0) <= eps:
        return 0
    if rate == 0.0:
        return 1
    n = max(1, math.ceil(math.log(eps * (1 - rate) / p) / math.log(rate)))
    while a_priori_bound(rate, p, n) > eps:
        n += 1
    while n > 1 and a_priori_bound(rate, p, n - 1) <= eps:
        n -= 1
    return n


def _in_domain(
    class_id: ContractionClass,
    T: MultiMap,
    window: list[int],
    chatterjea_domain: ChatterjeaDomain,
) -> bool:
    """Whether the step from window i to window i+1 is covered by the class inequality."""
    if class_id in (ContractionClass.BANACH, ContractionClass.PERIMETER,
                    ContractionClass.TOTAL_PAIRWISE):
        base = window[:-1]
        return len(set(base)) == len(base)

    x, y = window[0], window[2]
    if class_id is ContractionClass.ORBITAL:
        return x != y and y not in T(x)
    if (class_id is ContractionClass.CHATTERJEA
            and chatterjea_domain is ChatterjeaDomain.UNRESTRICTED):
        return True
    return x != y and x not in T(x) and y not in T(x)


def chain_quantities(
    space: MetricSpace,
    T: MultiMap,
    class_id: ContractionClass,
    points: list[int],
    order: int | None = None,
    chatterjea_domain: ChatterjeaDomain = ChatterjeaDomain.RESTRICTED,
) -> list[tuple[float, bool]]:
    """(q_i, step i→i+1 in domain) for every index whose next window is available."""
    size = window_size(class_id, order)
    # the kannan step is taken at (x_i, x_{i+2}) and reads x_{i+3}
    span = 4 if class_id is ContractionClass.KANNAN else size + 1
    result = []
    for i in range(len(points) - span + 1):
        window = points[i : i + span]
        q = _window_quantity(space, window[:size])
        result.append((q, _in_domain(class_id, T, window, chatterjea_domain)))
    return result


def rate_law_violations(
    space: MetricSpace,
    T: MultiMap,
    class_id: ContractionClass,
    points: list[int],
    rate: float,
    order: int | None = None,
    chatterjea_domain: ChatterjeaDomain = ChatterjeaDomain.RESTRICTED,
    tolerance: float | None = None,
) -> list[int]:
    """Indices i in the class domain where q_{i+1} > rate · q_i beyond the slack."""
    slack = space.distance_slack(tolerance)
    size = window_size(class_id, order)
    chain = chain_quantities(space, T, class_id, points, order, chatterjea_domain)
    violations = []
    for i, (q, in_domain) in enumerate(chain):
        if not in_domain:
            continue
        q_next = _window_quantity(space, points[i + 1 : i + 1 + size])
        if q_next > rate * q + slack:
            violations.append(i)
    return violations


def attach_bounds(
    space: MetricSpace,
    T: MultiMap,
    trace: OrbitTrace,
    certificate: Certificate,
    *,
    conservative: bool = False,
    tolerance: float | None = None,
) -> OrbitTrace:
    """Return a copy of the trace carrying a priori bounds and chain diagnostics.

    Raises:
        PreconditionError: the certificate is not certified or has no finite constant
    """
    if not certificate.certified:
        raise PreconditionError(f"{certificate.label} is not certified for this map")
    if certificate.tightest is None:
        raise PreconditionError(f"{certificate.label} holds vacuously; no rate is available")

    class_id = certificate.class_id
    constant = certificate.tightest
    if class_id is ContractionClass.CHATTERJEA and constant == 0.0:
        # any γ in (0, 1/2) works; take the smallest positive one
        constant = sys.float_info.min
    rate = effective_rate(class_id, constant, conservative=conservative)
    order = certificate.order
    chatterjea_domain = certificate.chatterjea_domain or ChatterjeaDomain.RESTRICTED

    p = initial_quantity_p(space, class_id, trace, order)
    a_priori = [a_priori_bound(rate, p, n) for n in range(len(trace.points))]
    slack = space.distance_slack(tolerance)

    distance_to_terminal = None
    bound_violations: list[int] = []
    if trace.outcome.kind is OutcomeKind.FIXED_POINT:
        x_star = trace.terminal
        distance_to_terminal = [space.d(x, x_star) for x in trace.points]
        bound_violations = [
            n for n, dist in enumerate(distance_to_terminal) if dist > a_priori[n] + slack
        ]

    size = window_size(class_id, order)
    try:
        orbit = extended_orbit(trace, len(trace.points) + size + 1)
    except TraceTooShort:
        orbit = trace.points
    chain = chain_quantities(space, T, class_id, orbit, order, chatterjea_domain)
    chain_violations = rate_law_violations(
        space, T, class_id, orbit, rate, order, chatterjea_domain, tolerance
    )

    if chain_violations or bound_violations:
        logger.warning(
            f"{certificate.label}: {len(chain_violations)} chain and "
            f"{len(bound_violations)} bound violations along the trace"
        )

    bounds = TraceBounds(
        class_id=class_id,
        order=order,
        constant=constant,
        rate=rate,
        p=p,
        a_priori=a_priori,
        distance_to_terminal=distance_to_terminal,
        chain=[q if in_domain else None for q, in_domain in chain],
        chain_violations=chain_violations,
        bound_violations=bound_violations,
    )
    return trace.model_copy(update={"bounds": bounds})


def trace_is_consistent(T: MultiMap, trace: OrbitTrace) -> bool:
    """Post-hoc membership check: every recorded step satisfies x_{i+1} ∈ T x_i."""
    steps_ok = all(b in T(a) for a, b in zip(trace.points, trace.points[1:]))
    outcome = trace.outcome
    if outcome.kind is OutcomeKind.FIXED_POINT:
        return steps_ok and outcome.point in T(trace.terminal)
    if outcome.kind is OutcomeKind.CYCLE and trace.policy.deterministic:
        assert outcome.start is not None and outcome.length is not None
        return steps_ok and trace.points[outcome.start + outcome.length] == trace.points[
            outcome.start
        ]
    return steps_ok
