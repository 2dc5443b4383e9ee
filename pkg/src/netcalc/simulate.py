"""Discrete-time fluid simulation of regulated sources through a FIFO server.

The simulator exists to check the analytic bounds empirically: a greedy
source (one that sends exactly its envelope) is pushed through a
work-conserving constant-rate server, and the observed backlog and virtual
delay are compared against the vertical and horizontal deviations. Time is a
uniform lattice with step dt; all bookkeeping stays in exact rationals so a
reported violation is never a rounding artifact.
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from typing import IO, Optional

from .admission import LinkConfig
from .bandwidth import FlowMix, aggregate_buffer, aggregate_eb
from .curves import (
    NumberLike,
    PiecewiseCurve,
    Q,
    Shape,
    as_fraction,
    constant_rate,
    horizontal_deviation,
    is_unbounded,
    vertical_deviation,
)
from .errors import DomainError, UnsupportedCurveOperation
from .render import format_fraction


@dataclass(frozen=True)
class Trace:
    """Cumulative arrivals (or departures) sampled on a uniform time lattice."""

    dt: Fraction
    cumulative: tuple[Fraction, ...]

    def __post_init__(self) -> None:
        object.__setattr__(self, "dt", as_fraction(self.dt))
        object.__setattr__(self, "cumulative", tuple(as_fraction(v) for v in self.cumulative))
        if self.dt <= 0:
            raise DomainError("trace step must be positive")
        if not self.cumulative or self.cumulative[0] != 0:
            raise DomainError("a trace starts with cumulative value 0")
        if any(b < a for a, b in zip(self.cumulative, self.cumulative[1:])):
            raise DomainError("cumulative trace must be non-decreasing")

    def __len__(self) -> int:
        return len(self.cumulative)

    def time_of(self, k: int) -> Fraction:
        return k * self.dt


@dataclass(frozen=True)
class SimReport:
    """Observed extremes of one run, with the analytic bounds when available.

    The lattice blurs measurements by at most one step: delays round up by
    dt, backlog by service_rate * dt. The *_ok properties build that slack
    in, so False really means a broken bound.
    """

    dt: Fraction
    service_rate: Fraction
    max_backlog: Fraction
    max_virtual_delay: Fraction
    analytic_backlog_bound: Optional[Fraction] = None
    analytic_delay_bound: Optional[Fraction] = None
    overflow: Optional[Fraction] = None

    @property
    def backlog_bound_ok(self) -> Optional[bool]:
        if self.analytic_backlog_bound is None:
            return None
        return self.max_backlog <= self.analytic_backlog_bound + self.service_rate * self.dt

    @property
    def delay_bound_ok(self) -> Optional[bool]:
        if self.analytic_delay_bound is None:
            return None
        return self.max_virtual_delay <= self.analytic_delay_bound + self.dt

    @property
    def bounds_ok(self) -> Optional[bool]:
        checks = [self.backlog_bound_ok, self.delay_bound_ok]
        if any(c is False for c in checks):
            return False
        if all(c is None for c in checks):
            return None
        return True


def greedy_source(alpha: PiecewiseCurve, horizon: NumberLike, dt: NumberLike) -> Trace:
    """The maximally bursty conformant source: sends alpha(t) by time t.

    Valid only for concave envelopes (concave with value 0 at the origin is
    sub-additive, so the greedy trace really conforms to its own envelope).
    """
    if alpha.shape is not Shape.CONCAVE_MIN:
        raise UnsupportedCurveOperation("greedy sources are defined for concave envelopes")
    horizon = as_fraction(horizon)
    step = as_fraction(dt)
    if step <= 0:
        raise DomainError("dt must be positive")
    if horizon < step:
        raise DomainError("horizon must cover at least one step")
    steps = math.ceil(horizon / step)
    return Trace(step, tuple(alpha.value(k * step) for k in range(steps + 1)))


def conformance_check(
    trace: Trace, alpha: PiecewiseCurve
) -> Optional[tuple[Fraction, Fraction]]:
    """Check R(t) - R(s) <= alpha(t - s) on every sampled pair s <= t.

    Returns None when the trace conforms, else the first violating (s, t)
    scanning t upward and s upward within each t.
    """
    n = len(trace.cumulative)
    gap_values = [alpha.value(g * trace.dt) for g in range(n)]
    cum = trace.cumulative
    for t in range(n):
        for s in range(t + 1):
            if cum[t] - cum[s] > gap_values[t - s]:
                return trace.time_of(s), trace.time_of(t)
    return None


def fifo_server(
    trace: Trace, service_rate: NumberLike, buffer_cap: Optional[NumberLike] = None
) -> tuple[Trace, SimReport]:
    """Run a work-conserving fluid server at a constant rate over a trace.

    Returns the departure trace and a report with the observed maxima. The
    virtual delay of the data arriving by step k is the time until the
    departures catch up with in(k); if that happens past the end of the
    trace it is extrapolated at the service rate (no further arrivals).
    If buffer_cap is given, overflow is reported but nothing is dropped.
    """
    rate = as_fraction(service_rate)
    if rate <= 0:
        raise DomainError("service rate must be positive")
    cap = None if buffer_cap is None else as_fraction(buffer_cap)
    step_quota = rate * trace.dt
    arrivals = trace.cumulative
    out: list[Fraction] = [Q(0)]
    for k in range(1, len(arrivals)):
        out.append(min(arrivals[k], out[-1] + step_quota))
    max_backlog = max(a - o for a, o in zip(arrivals, out))

    last = len(arrivals) - 1
    max_delay = Q(0)
    j = 0
    for k in range(len(arrivals)):
        j = max(j, k)
        while j <= last and out[j] < arrivals[k]:
            j += 1
        if j <= last:
            delay = (j - k) * trace.dt
        else:
            short = arrivals[k] - out[last]
            extra = math.ceil(short / step_quota) if short > 0 else 0
            delay = (last + extra - k) * trace.dt
            j = last
        max_delay = max(max_delay, delay)

    overflow = None
    if cap is not None:
        overflow = max(Q(0), max_backlog - cap)
    report = SimReport(
        dt=trace.dt,
        service_rate=rate,
        max_backlog=max_backlog,
        max_virtual_delay=max_delay,
        overflow=overflow,
    )
    return Trace(trace.dt, tuple(out)), report


def default_step(mix: FlowMix) -> Fraction:
    """Default lattice step: a hundredth of the first corner or of the delay."""
    corners = [fc.spec.breakpoint for fc in mix.classes if fc.count > 0 and fc.spec.breakpoint > 0]
    base = min(corners + [mix.delay]) if corners else mix.delay
    if base <= 0:
        raise DomainError("cannot pick a default step for a zero-delay mix")
    return base / 100


def default_horizon(mix: FlowMix) -> Fraction:
    """Default run length: three times the last interesting abscissa plus D."""
    profile = aggregate_eb(mix)
    tau_last = profile.thresholds[-1]
    spans = [fc.spec.breakpoint for fc in mix.classes if fc.count > 0]
    if not is_unbounded(tau_last):
        spans.append(tau_last)
    return 3 * max(spans) + mix.delay


def run_mix(
    mix: FlowMix,
    link: LinkConfig,
    dt: Optional[NumberLike] = None,
    horizon: Optional[NumberLike] = None,
) -> tuple[Trace, Trace, SimReport]:
    """Greedy aggregate through a server at the mix's effective bandwidth.

    Requires the mix to be admissible on the link. Returns the arrival
    trace, the departure trace, and the full report with analytic bounds.
    """
    profile = aggregate_eb(mix)
    rate = profile.selected_eb
    if is_unbounded(rate):
        raise DomainError("mix has unbounded effective bandwidth")
    if rate > link.capacity:
        raise DomainError("mix is not admissible on this link; nothing to validate")
    if rate == 0:
        raise DomainError("mix carries no traffic")
    step = default_step(mix) if dt is None else as_fraction(dt)
    span = default_horizon(mix) if horizon is None else as_fraction(horizon)
    alpha = mix.aggregate_curve()
    buffer_need = aggregate_buffer(mix)
    arrivals = greedy_source(alpha, span, step)
    departures, observed = fifo_server(arrivals, rate, buffer_cap=buffer_need)
    beta = constant_rate(rate)
    report = SimReport(
        dt=observed.dt,
        service_rate=rate,
        max_backlog=observed.max_backlog,
        max_virtual_delay=observed.max_virtual_delay,
        analytic_backlog_bound=vertical_deviation(alpha, beta),
        analytic_delay_bound=horizontal_deviation(alpha, beta),
        overflow=observed.overflow,
    )
    return arrivals, departures, report


def validate_scenario(
    mix: FlowMix,
    link: LinkConfig,
    dt: Optional[NumberLike] = None,
    horizon: Optional[NumberLike] = None,
) -> SimReport:
    """Empirically check the delay and backlog bounds for an admitted mix."""
    return run_mix(mix, link, dt, horizon)[2]


def export_trace_csv(arrivals: Trace, departures: Trace, stream: IO[str]) -> None:
    """Write t, cumulative_in, cumulative_out, backlog rows (LF line endings)."""
    if arrivals.dt != departures.dt or len(arrivals) != len(departures):
        raise DomainError("arrival and departure traces must share the same lattice")
    stream.write("t,cumulative_in,cumulative_out,backlog\n")
    for k, (a, o) in enumerate(zip(arrivals.cumulative, departures.cumulative)):
        t = arrivals.time_of(k)
        stream.write(
            f"{format_fraction(t)},{format_fraction(a)},{format_fraction(o)},{format_fraction(a - o)}\n"
        )
