"""Effective bandwidth, equivalent capacity, and their buffer/delay duality.

The effective bandwidth of an envelope alpha under a delay budget D is the
least constant service rate that keeps every bit within D of its arrival:
sup over s of alpha(s) / (s + D). The equivalent capacity under a buffer
budget B is the least constant rate that keeps the backlog within B:
sup over s > 0 of (alpha(s) - B) / s. Both sups are attained on the finite
candidate set {0+ jump, slope changes, long-run slope}, so everything here
is exact rational arithmetic.

For a mix of T-SPEC classes the aggregate effective bandwidth has a closed
form: one candidate per envelope corner plus the jump and long-run terms,
with thresholds in D that select the binding candidate.
"""
from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from typing import Iterable, Sequence

from .curves import (
    UNBOUNDED,
    NumberLike,
    PiecewiseCurve,
    Q,
    Shape,
    TSpec,
    as_fraction,
    is_unbounded,
    Value,
)
from .errors import DomainError, UnsupportedCurveOperation


def _require_concave(alpha: PiecewiseCurve) -> None:
    if alpha.shape is not Shape.CONCAVE_MIN:
        raise UnsupportedCurveOperation("bandwidth operations take a concave arrival envelope")


def effective_bandwidth(alpha: PiecewiseCurve, delay: NumberLike) -> Value:
    """Least constant rate serving alpha within delay D: sup alpha(s)/(s + D).

    Returns UNBOUNDED when D = 0 and the envelope jumps at the origin.
    """
    _require_concave(alpha)
    d = as_fraction(delay)
    if d < 0:
        raise DomainError("delay constraint must be nonnegative")
    jump = alpha.value_right(0)
    candidates = [alpha.long_run_slope()]
    if d == 0:
        if jump > 0:
            return UNBOUNDED
        candidates.append(alpha.first_slope())
        candidates.extend(alpha.value(x) / x for x in alpha.breakpoints())
    else:
        candidates.append(jump / d)
        candidates.extend(alpha.value(x) / (x + d) for x in alpha.breakpoints())
    return max(candidates)


def equivalent_capacity(alpha: PiecewiseCurve, buffer: NumberLike) -> Value:
    """Least constant rate keeping backlog within B: sup over s > 0 of (alpha(s) - B)/s.

    Returns UNBOUNDED when B is smaller than the 0+ jump of the envelope
    (the ratio diverges as s -> 0+).
    """
    _require_concave(alpha)
    b = as_fraction(buffer)
    if b < 0:
        raise DomainError("buffer size must be nonnegative")
    jump = alpha.value_right(0)
    if b < jump:
        return UNBOUNDED
    candidates = [alpha.long_run_slope()]
    if b == jump:
        candidates.append(alpha.first_slope())
    candidates.extend((alpha.value(x) - b) / x for x in alpha.breakpoints())
    return max(candidates)


def buffer_for_delay(alpha: PiecewiseCurve, delay: NumberLike) -> Fraction:
    """Buffer that makes the delay-D service rate lossless: sup alpha(s) - e*s.

    With e the effective bandwidth at D, this is the worst backlog of a
    constant-rate server at e, attained at the origin jump or a slope change.
    """
    e = effective_bandwidth(alpha, delay)
    if is_unbounded(e):
        raise DomainError("effective bandwidth is unbounded; no finite buffer statement")
    candidates = [Q(0), alpha.value_right(0)]
    candidates.extend(alpha.value(x) - e * x for x in alpha.breakpoints())
    return max(candidates)


def delay_for_buffer(alpha: PiecewiseCurve, buffer: NumberLike) -> Fraction:
    """Delay bound of a server at the buffer-B equivalent capacity.

    Computed as sup over s of (alpha(s) - f*s) / f with f the equivalent
    capacity; a buffer below the origin jump means an unbounded rate and
    hence zero delay.
    """
    f = equivalent_capacity(alpha, buffer)
    if is_unbounded(f):
        return Q(0)
    if f == 0:
        raise DomainError("zero-rate flow admits no buffer-to-delay conversion")
    peak = max(Q(0), alpha.value_right(0))
    for x in alpha.breakpoints():
        peak = max(peak, alpha.value(x) - f * x)
    return peak / f


@dataclass(frozen=True)
class FlowClass:
    """A traffic class: one T-SPEC envelope and how many flows of it."""

    spec: TSpec
    count: int

    def __post_init__(self) -> None:
        if not isinstance(self.count, int) or isinstance(self.count, bool):
            raise DomainError("flow count must be an integer")
        if self.count < 0:
            raise DomainError("flow count must be nonnegative")


@dataclass(frozen=True)
class FlowMix:
    """A multiplexed set of flow classes sharing one delay constraint.

    Classes are kept sorted by envelope breakpoint (ties by burst, then max
    packet) so the aggregate closed form can walk the corners in order.
    Zero-count classes stay in the mix but contribute nothing.
    """

    classes: tuple[FlowClass, ...]
    delay: Fraction

    def __post_init__(self) -> None:
        classes = tuple(self.classes)
        if not classes:
            raise DomainError("a flow mix needs at least one class")
        ordered = sorted(
            classes, key=lambda fc: (fc.spec.breakpoint, fc.spec.burst, fc.spec.max_packet)
        )
        object.__setattr__(self, "classes", tuple(ordered))
        d = as_fraction(self.delay)
        if d < 0:
            raise DomainError("delay constraint must be nonnegative")
        object.__setattr__(self, "delay", d)

    @classmethod
    def with_per_class_delays(
        cls, classes: Iterable[FlowClass], delays: Iterable[NumberLike]
    ) -> "FlowMix":
        """Build a mix from per-class delay budgets, guaranteeing all of them

        by using the tightest one as the shared constraint.
        """
        ds = [as_fraction(d) for d in delays]
        if not ds:
            raise DomainError("need at least one delay budget")
        return cls(tuple(classes), min(ds))

    def total_count(self) -> int:
        return sum(fc.count for fc in self.classes)

    def aggregate_curve(self) -> PiecewiseCurve:
        """Pointwise sum of count * envelope over all classes."""
        total = None
        for fc in self.classes:
            if fc.count == 0:
                continue
            term = fc.spec.as_curve().scaled(fc.count)
            total = term if total is None else total + term
        if total is None:
            return PiecewiseCurve(Shape.CONCAVE_MIN, ((Q(0), Q(0)),))
        return total


@dataclass(frozen=True)
class AggregateEbProfile:
    """Closed-form effective-bandwidth candidates for a flow mix.

    candidates[0] is the origin-jump term, candidates[j] for j = 1..I the
    corner terms in breakpoint order, and candidates[-1] the long-run rate
    sum. thresholds[k] is the largest delay for which candidates[k] is the
    binding term. selected_eb is the max candidate, UNBOUNDED when the delay
    is zero and the mix carries packets.
    """

    delay: Fraction
    candidates: tuple[Value, ...]
    thresholds: tuple[Value, ...]
    selected_eb: Value
    regime_index: int


def aggregate_eb(mix: FlowMix) -> AggregateEbProfile:
    """Effective bandwidth of a flow mix by exact candidate enumeration.

    Walking the classes in breakpoint order, the envelope corner at the j-th
    breakpoint has the already-passed classes on their sustained piece and
    the rest on their peak piece; each corner yields one candidate
    alpha*(G_j) / (G_j + D). Equals the generic breakpoint sup of the summed
    curve exactly.
    """
    if mix.total_count() == 0:
        raise DomainError("aggregate effective bandwidth needs at least one flow")
    d = mix.delay
    specs = [fc.spec for fc in mix.classes]
    counts = [fc.count for fc in mix.classes]
    n = len(specs)
    total_m = sum(c * s.max_packet for s, c in zip(specs, counts))
    total_p = sum(c * s.peak_rate for s, c in zip(specs, counts))
    total_r = sum(c * s.sustained_rate for s, c in zip(specs, counts))
    total_b = sum(c * s.burst for s, c in zip(specs, counts))

    # slope and intercept of the aggregate envelope on the segment that
    # starts at the (j-1)-th breakpoint, j = 1..I+1
    slopes = []
    intercepts = []
    run_rate, run_burst = Q(0), Q(0)
    for j in range(n + 1):
        slopes.append(run_rate + sum(c * s.peak_rate for s, c in zip(specs[j:], counts[j:])))
        intercepts.append(run_burst + sum(c * s.max_packet for s, c in zip(specs[j:], counts[j:])))
        if j < n:
            run_rate += counts[j] * specs[j].sustained_rate
            run_burst += counts[j] * specs[j].burst

    candidates: list[Value] = []
    if d == 0:
        candidates.append(UNBOUNDED if total_m > 0 else Q(0))
    else:
        candidates.append(total_m / d)
    for j in range(1, n + 1):
        gamma = specs[j - 1].breakpoint
        if gamma + d == 0:
            candidates.append(UNBOUNDED if intercepts[j] > 0 else Q(0))
        else:
            candidates.append((slopes[j] * gamma + intercepts[j]) / (gamma + d))
    candidates.append(total_r)

    thresholds: list[Value] = []
    for j in range(n + 1):
        denom = slopes[j] if j < n else total_r
        numer = intercepts[j] if j < n else total_b
        if denom == 0:
            thresholds.append(Q(0) if numer == 0 else UNBOUNDED)
        else:
            thresholds.append(numer / denom)

    regime = n + 1
    for k, tau in enumerate(thresholds):
        if d <= tau:
            regime = k
            break
    return AggregateEbProfile(
        delay=d,
        candidates=tuple(candidates),
        thresholds=tuple(thresholds),
        selected_eb=max(candidates),
        regime_index=regime,
    )


def aggregate_buffer(mix: FlowMix) -> Fraction:
    """Shared buffer sizing the mix needs when served at its effective bandwidth.

    sup over s of alpha*(s) - e*s with e the aggregate effective bandwidth,
    evaluated at the origin jump and every envelope corner.
    """
    profile = aggregate_eb(mix)
    e = profile.selected_eb
    if is_unbounded(e):
        raise DomainError("effective bandwidth is unbounded; no finite buffer statement")
    best = sum((fc.count * fc.spec.max_packet for fc in mix.classes), Q(0))
    curve = mix.aggregate_curve()
    for s in curve.breakpoints():
        best = max(best, curve.value(s) - e * s)
    return max(best, Q(0))


def sum_individual_eb(mix: FlowMix) -> Value:
    """Sum over classes of count * per-flow effective bandwidth."""
    total: Value = Q(0)
    for fc in mix.classes:
        if fc.count == 0:
            continue
        e = effective_bandwidth(fc.spec.as_curve(), mix.delay)
        if is_unbounded(e):
            return UNBOUNDED
        total += fc.count * e
    return total


def eb_subadditivity_gap(
    mixes: Sequence[FlowMix], delay: NumberLike
) -> tuple[Value, Value]:
    """(effective bandwidth of the merged mix, sum of the mixes' own values).

    The first never exceeds the second: multiplexing into a shared buffer
    needs no more rate than reserving per mix.
    """
    d = as_fraction(delay)
    if not mixes:
        raise DomainError("need at least one mix")
    merged_classes = tuple(fc for mix in mixes for fc in mix.classes)
    merged = FlowMix(merged_classes, d)
    combined = aggregate_eb(merged).selected_eb
    parts: Value = Q(0)
    for mix in mixes:
        e = aggregate_eb(FlowMix(mix.classes, d)).selected_eb
        if is_unbounded(e):
            return combined, UNBOUNDED
        parts += e
    return combined, parts
