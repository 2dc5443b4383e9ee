"""Admission control: accept a requested flow mix iff its effective bandwidth fits the link.

A mix is admitted when the aggregate effective bandwidth at the link's delay
constraint does not exceed the link capacity (ties admit). Admitted mixes get
a shared buffer sized for lossless service at that bandwidth. Because the
effective bandwidth is monotone in every flow count, the admissible count
vectors form a downward-closed set; its Pareto-maximal corners are what the
region enumeration returns.
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from typing import Optional, Sequence, Union

from .bandwidth import FlowClass, FlowMix, aggregate_buffer, aggregate_eb, effective_bandwidth
from .curves import TSpec, Value, as_fraction, is_unbounded
from .errors import DomainError, UnboundedRegionError


@dataclass(frozen=True)
class LinkConfig:
    """Outbound capacity (bits/s) and the delay budget every flow must get."""

    capacity: Fraction
    delay: Fraction

    def __post_init__(self) -> None:
        object.__setattr__(self, "capacity", as_fraction(self.capacity))
        object.__setattr__(self, "delay", as_fraction(self.delay))
        if self.capacity <= 0:
            raise DomainError("link capacity must be positive")
        # delay 0 is allowed so a degenerate request can be examined; it
        # rejects anything that carries packets
        if self.delay < 0:
            raise DomainError("delay constraint must be nonnegative")


@dataclass(frozen=True)
class AdmissionDecision:
    accepted: bool
    aggregate_eb: Value
    required_buffer: Optional[Fraction]
    headroom: Value


@dataclass(frozen=True)
class AdmissionRegion:
    """All Pareto-maximal admissible count vectors, one tuple per corner."""

    frontier: frozenset[tuple[int, ...]]


def _mix(catalog: Sequence[TSpec], counts: Sequence[int], delay: Fraction) -> FlowMix:
    return FlowMix(tuple(FlowClass(ts, n) for ts, n in zip(catalog, counts)), delay)


def decide(
    catalog: Sequence[TSpec], counts: Sequence[int], link: LinkConfig
) -> AdmissionDecision:
    """Accept or reject a requested count vector against the link."""
    if len(counts) != len(catalog):
        raise DomainError("counts and catalog must have the same length")
    if any(n < 0 for n in counts):
        raise DomainError("counts must be nonnegative")
    if all(n == 0 for n in counts):
        raise DomainError("request at least one flow")
    profile = aggregate_eb(_mix(catalog, counts, link.delay))
    eb = profile.selected_eb
    accepted = not is_unbounded(eb) and eb <= link.capacity
    buffer_need = aggregate_buffer(_mix(catalog, counts, link.delay)) if accepted else None
    headroom = -math.inf if is_unbounded(eb) else link.capacity - eb
    return AdmissionDecision(
        accepted=accepted, aggregate_eb=eb, required_buffer=buffer_need, headroom=headroom
    )


def _admissible(catalog, counts, link) -> bool:
    if all(n == 0 for n in counts):
        return True
    eb = aggregate_eb(_mix(catalog, counts, link.delay)).selected_eb
    return not is_unbounded(eb) and eb <= link.capacity


def _per_class_bounds(
    catalog: Sequence[TSpec], link: LinkConfig, cap: Union[int, Sequence[int], None]
) -> list[int]:
    caps: list[Optional[int]]
    if cap is None:
        caps = [None] * len(catalog)
    elif isinstance(cap, int):
        caps = [cap] * len(catalog)
    else:
        caps = list(cap)
        if len(caps) != len(catalog):
            raise DomainError("per-class cap list must match the catalog length")
    bounds = []
    for i, ts in enumerate(catalog):
        if ts.sustained_rate == 0 and caps[i] is None:
            raise UnboundedRegionError(
                f"class {i} has zero sustained rate; counts are unbounded without a cap"
            )
        single = effective_bandwidth(ts.as_curve(), link.delay)
        if is_unbounded(single):
            bound = 0
        elif single == 0:
            bound = caps[i] if caps[i] is not None else 0
        else:
            # eb of n flows of one class is exactly n times the per-flow eb
            bound = math.floor(link.capacity / single)
        if caps[i] is not None:
            bound = min(bound, caps[i])
        bounds.append(bound)
    return bounds


def _max_last(catalog, prefix, hi, link) -> int:
    """Largest n with (prefix, n) admissible, given (prefix, 0) is admissible."""
    lo = 0
    while lo < hi:
        mid = (lo + hi + 1) // 2
        if _admissible(catalog, prefix + (mid,), link):
            lo = mid
        else:
            hi = mid - 1
    return lo


def admission_region(
    catalog: Sequence[TSpec],
    link: LinkConfig,
    cap: Union[int, Sequence[int], None] = None,
) -> AdmissionRegion:
    """Enumerate the Pareto-maximal admissible count vectors.

    Depth-first over all but the last class (stopping each branch at the
    first inadmissible count, which monotonicity allows), binary search on
    the last class, then a dominance filter over the collected corners.
    """
    if not catalog:
        raise DomainError("catalog must not be empty")
    bounds = _per_class_bounds(catalog, link, cap)
    n_classes = len(catalog)
    corners: list[tuple[int, ...]] = []

    def descend(prefix: tuple[int, ...]) -> None:
        depth = len(prefix)
        zeros = (0,) * (n_classes - depth)
        if not _admissible(catalog, prefix + zeros, link):
            return
        if depth == n_classes - 1:
            corners.append(prefix + (_max_last(catalog, prefix, bounds[-1], link),))
            return
        for n in range(bounds[depth] + 1):
            candidate = prefix + (n,) + (0,) * (n_classes - depth - 1)
            if not _admissible(catalog, candidate, link):
                break
            descend(prefix + (n,))

    descend(())
    unique = set(corners)
    frontier = {
        v
        for v in unique
        if not any(w != v and all(wi >= vi for wi, vi in zip(w, v)) for w in unique)
    }
    return AdmissionRegion(frontier=frozenset(frontier))


def region_tradeoff_table(
    catalog: Sequence[TSpec],
    link: LinkConfig,
    fixed: dict[int, int],
    cap: Union[int, Sequence[int], None] = None,
) -> list[tuple[tuple[int, ...], int]]:
    """Trade-off rows between the free classes, the rest pinned.

    With two free classes, sweeps the lower-indexed one and reports the
    largest admissible count of the other; with one free class, a single
    row with its maximum. Rows stop at the first inadmissible sweep value.
    """
    free = [i for i in range(len(catalog)) if i not in fixed]
    if len(free) not in (1, 2):
        raise DomainError("leave exactly one or two classes free")
    if any(n < 0 for n in fixed.values()):
        raise DomainError("fixed counts must be nonnegative")
    bounds = _per_class_bounds(catalog, link, cap)

    def assemble(sweep_value: Optional[int], last_value: int) -> tuple[int, ...]:
        counts = [0] * len(catalog)
        for i, n in fixed.items():
            counts[i] = n
        if sweep_value is not None:
            counts[free[0]] = sweep_value
        counts[free[-1]] = last_value
        return tuple(counts)

    rows: list[tuple[tuple[int, ...], int]] = []
    if len(free) == 1:
        if _admissible(catalog, assemble(None, 0), link):
            last_idx = free[-1]

            def feasible(n: int) -> bool:
                return _admissible(catalog, assemble(None, n), link)

            lo, hi = 0, bounds[last_idx]
            while lo < hi:
                mid = (lo + hi + 1) // 2
                lo, hi = (mid, hi) if feasible(mid) else (lo, mid - 1)
            rows.append(((), lo))
        return rows

    for v in range(bounds[free[0]] + 1):
        if not _admissible(catalog, assemble(v, 0), link):
            break
        lo, hi = 0, bounds[free[-1]]
        while lo < hi:
            mid = (lo + hi + 1) // 2
            if _admissible(catalog, assemble(v, mid), link):
                lo = mid
            else:
                hi = mid - 1
        rows.append(((v,), lo))
    return rows
