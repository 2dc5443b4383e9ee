"""Command-line surface: query effective bandwidth, size buffers, admit mixes,

enumerate admission regions, sweep delay constraints, and validate bounds by
simulation. Scenario files supply the catalog and link; most numbers can be
overridden per invocation. All output is deterministic, CSV uses LF endings
and '.' decimals, and JSON carries exact numerator/denominator strings next
to every decimal rendering.

Exit codes: 0 success (or admitted), 2 domain/usage error, 3 request
rejected, 4 simulated bound violation.
"""
from __future__ import annotations

import argparse
import io
import json
import sys
from fractions import Fraction
from typing import Optional, Sequence

from .admission import LinkConfig, admission_region, decide, region_tradeoff_table
from .bandwidth import (
    aggregate_buffer,
    aggregate_eb,
    equivalent_capacity,
    sum_individual_eb,
)
from .curves import as_fraction, is_unbounded
from .errors import NetcalcError
from .render import format_fraction, quantity_json, UNBOUNDED_TEXT
from .scenario import MEGABIT_PER_S, Scenario, parse_scenario
from .simulate import export_trace_csv, run_mix

EXIT_OK = 0
EXIT_ERROR = 2
EXIT_REJECTED = 3
EXIT_BOUND_VIOLATION = 4


def _parse_counts(text: str, n_classes: int, allow_free: bool = False):
    """Parse '1,0,3' (or '1,x,x' when wildcards are allowed) into counts."""
    parts = [p.strip() for p in text.split(",")]
    if len(parts) != n_classes:
        raise NetcalcError(f"--counts needs {n_classes} comma-separated values")
    counts = []
    for p in parts:
        if allow_free and p in ("x", "*", "_"):
            counts.append(None)
            continue
        try:
            v = int(p)
        except ValueError:
            raise NetcalcError(f"invalid count '{p}'") from None
        if v < 0:
            raise NetcalcError("counts must be nonnegative")
        counts.append(v)
    return counts


def _emit(text: str, out: Optional[str]) -> None:
    if out is None:
        sys.stdout.write(text)
    else:
        with open(out, "w", encoding="utf-8", newline="") as fh:
            fh.write(text)


def _profile_json(profile) -> dict:
    return {
        "delay_s": quantity_json(profile.delay),
        "effective_bandwidth_bps": quantity_json(profile.selected_eb),
        "candidates_bps": [quantity_json(c) for c in profile.candidates],
        "thresholds_s": [quantity_json(t) for t in profile.thresholds],
        "regime_index": profile.regime_index,
    }


def _rate_line(label: str, rate) -> str:
    if is_unbounded(rate):
        return f"{label}: {UNBOUNDED_TEXT}\n"
    return f"{label}: {format_fraction(rate)} bit/s ({format_fraction(rate / MEGABIT_PER_S)} Mb/s)\n"


def _load(args) -> Scenario:
    return parse_scenario(args.scenario)


def _mix_from_args(scenario: Scenario, args):
    counts = None
    if getattr(args, "counts", None):
        counts = _parse_counts(args.counts, len(scenario.classes))
    delay = getattr(args, "D", None)
    return scenario.flow_mix(counts=counts, delay=delay)


def cmd_eb(args) -> int:
    scenario = _load(args)
    profile = aggregate_eb(_mix_from_args(scenario, args))
    if args.format == "json":
        _emit(json.dumps(_profile_json(profile), indent=2) + "\n", args.out)
    else:
        _emit(_rate_line("aggregate effective bandwidth", profile.selected_eb), args.out)
    return EXIT_OK


def cmd_ec(args) -> int:
    scenario = _load(args)
    mix = _mix_from_args(scenario, args)
    buffer_bits = None
    if args.B is not None:
        buffer_bits = as_fraction(args.B) * 1000
    elif scenario.link.buffer is not None:
        buffer_bits = scenario.link.buffer
    if buffer_bits is None:
        raise NetcalcError("equivalent capacity needs a buffer size (--B or link.B)")
    ec = equivalent_capacity(mix.aggregate_curve(), buffer_bits)
    if args.format == "json":
        payload = {
            "buffer_bits": quantity_json(buffer_bits),
            "equivalent_capacity_bps": quantity_json(ec),
            "eb_profile": _profile_json(aggregate_eb(mix)),
        }
        _emit(json.dumps(payload, indent=2) + "\n", args.out)
    else:
        _emit(_rate_line("equivalent capacity", ec), args.out)
    return EXIT_OK


def cmd_buffer(args) -> int:
    scenario = _load(args)
    mix = _mix_from_args(scenario, args)
    needed = aggregate_buffer(mix)
    if args.format == "json":
        payload = {
            "required_buffer_bits": quantity_json(needed),
            "eb_profile": _profile_json(aggregate_eb(mix)),
        }
        _emit(json.dumps(payload, indent=2) + "\n", args.out)
    else:
        kb = needed / 1000
        _emit(
            f"required buffer: {format_fraction(needed)} bits ({format_fraction(kb)} kb)\n",
            args.out,
        )
    return EXIT_OK


def _link_from_args(scenario: Scenario, args) -> LinkConfig:
    capacity = scenario.link.capacity
    if getattr(args, "C", None) is not None:
        capacity = as_fraction(args.C) * MEGABIT_PER_S
    delay = scenario.link.delay
    if getattr(args, "D", None) is not None:
        delay = as_fraction(args.D)
    return LinkConfig(capacity=capacity, delay=delay)


def cmd_admit(args) -> int:
    scenario = _load(args)
    link = _link_from_args(scenario, args)
    counts = scenario.counts()
    if args.counts:
        counts = tuple(_parse_counts(args.counts, len(scenario.classes)))
    decision = decide(scenario.catalog(), counts, link)
    payload = {
        "accepted": decision.accepted,
        "counts": list(counts),
        "capacity_bps": quantity_json(link.capacity),
        "delay_s": quantity_json(link.delay),
        "aggregate_eb_bps": quantity_json(decision.aggregate_eb),
        "headroom_bps": quantity_json(decision.headroom),
        "required_buffer_bits": quantity_json(decision.required_buffer),
    }
    _emit(json.dumps(payload, indent=2) + "\n", args.out)
    return EXIT_OK if decision.accepted else EXIT_REJECTED


def cmd_region(args) -> int:
    scenario = _load(args)
    link = _link_from_args(scenario, args)
    header = ",".join(f"n{i + 1}" for i in range(len(scenario.classes)))
    lines = [header]
    if args.counts:
        values = _parse_counts(args.counts, len(scenario.classes), allow_free=True)
        fixed = {i: v for i, v in enumerate(values) if v is not None}
        free = [i for i, v in enumerate(values) if v is None]
        if len(free) not in (1, 2):
            raise NetcalcError("mark exactly one or two classes free with 'x'")
        rows = region_tradeoff_table(scenario.catalog(), link, fixed)
        for swept, best in rows:
            counts = list(values)
            if swept:
                counts[free[0]] = swept[0]
            counts[free[-1]] = best
            lines.append(",".join(str(c) for c in counts))
    else:
        region = admission_region(scenario.catalog(), link)
        for vec in sorted(region.frontier):
            lines.append(",".join(str(c) for c in vec))
    _emit("\n".join(lines) + "\n", args.out)
    return EXIT_OK


def cmd_sweep_d(args) -> int:
    scenario = _load(args)
    d_min = as_fraction(args.d_min)
    d_max = as_fraction(args.d_max)
    steps = args.steps
    if not (0 < d_min < d_max) or steps < 2:
        raise NetcalcError("need 0 < --d-min < --d-max and --steps >= 2")
    counts = None
    if args.counts:
        counts = _parse_counts(args.counts, len(scenario.classes))
    lines = ["D,eb_aggregate,sum_eb_individual,buffer"]
    span = d_max - d_min
    for k in range(steps):
        d = d_min + span * k / (steps - 1)
        mix = scenario.flow_mix(counts=counts, delay=d)
        profile = aggregate_eb(mix)
        lines.append(
            ",".join(
                (
                    format_fraction(d),
                    format_fraction(profile.selected_eb),
                    format_fraction(sum_individual_eb(mix)),
                    format_fraction(aggregate_buffer(mix)),
                )
            )
        )
    _emit("\n".join(lines) + "\n", args.out)
    return EXIT_OK


def cmd_simulate(args) -> int:
    scenario = _load(args)
    link = _link_from_args(scenario, args)
    counts = None
    if args.counts:
        counts = _parse_counts(args.counts, len(scenario.classes))
    mix = scenario.flow_mix(counts=counts, delay=link.delay)
    dt = as_fraction(args.dt) if args.dt is not None else None
    horizon = as_fraction(args.horizon) if args.horizon is not None else None
    if dt is None and scenario.simulation is not None:
        dt = scenario.simulation.dt
    if horizon is None and scenario.simulation is not None:
        horizon = scenario.simulation.horizon
    arrivals, departures, report = run_mix(mix, link, dt=dt, horizon=horizon)
    payload = {
        "dt_s": quantity_json(report.dt),
        "service_rate_bps": quantity_json(report.service_rate),
        "max_backlog_bits": quantity_json(report.max_backlog),
        "max_virtual_delay_s": quantity_json(report.max_virtual_delay),
        "analytic_backlog_bound_bits": quantity_json(report.analytic_backlog_bound),
        "analytic_delay_bound_s": quantity_json(report.analytic_delay_bound),
        "backlog_bound_ok": report.backlog_bound_ok,
        "delay_bound_ok": report.delay_bound_ok,
    }
    sys.stdout.write(json.dumps(payload, indent=2) + "\n")
    if args.out:
        buf = io.StringIO()
        export_trace_csv(arrivals, departures, buf)
        with open(args.out, "w", encoding="utf-8", newline="") as fh:
            fh.write(buf.getvalue())
    return EXIT_OK if report.bounds_ok else EXIT_BOUND_VIOLATION


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="netcalc",
        description="Exact worst-case bandwidth, buffer and admission analysis "
        "for envelope-regulated traffic.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    def common(sp, formats=None):
        sp.add_argument("--scenario", required=True, help="scenario JSON file")
        sp.add_argument("--out", help="write output to this path instead of stdout")
        if formats is not None:
            sp.add_argument(
                "--format", choices=formats, default=formats[0], help="output format"
            )

    sp = sub.add_parser("eb", help="aggregate effective bandwidth for a mix")
    common(sp, formats=("human", "json"))
    sp.add_argument("--D", type=Fraction, help="delay constraint in seconds (overrides link.D)")
    sp.add_argument("--counts", help="comma-separated per-class counts")
    sp.set_defaults(handler=cmd_eb)

    sp = sub.add_parser("ec", help="equivalent capacity for a buffer size")
    common(sp, formats=("human", "json"))
    sp.add_argument("--B", type=Fraction, help="buffer size in kb (overrides link.B)")
    sp.add_argument("--D", type=Fraction, help="delay used for the audit profile")
    sp.add_argument("--counts", help="comma-separated per-class counts")
    sp.set_defaults(handler=cmd_ec)

    sp = sub.add_parser("buffer", help="buffer needed at the effective bandwidth")
    common(sp, formats=("human", "json"))
    sp.add_argument("--D", type=Fraction, help="delay constraint in seconds (overrides link.D)")
    sp.add_argument("--counts", help="comma-separated per-class counts")
    sp.set_defaults(handler=cmd_buffer)

    sp = sub.add_parser("admit", help="admission decision for a requested mix")
    common(sp)
    sp.add_argument("--C", type=Fraction, help="link capacity in Mb/s (overrides link.C)")
    sp.add_argument("--D", type=Fraction, help="delay constraint in seconds (overrides link.D)")
    sp.add_argument("--counts", help="comma-separated per-class counts")
    sp.set_defaults(handler=cmd_admit)

    sp = sub.add_parser("region", help="Pareto frontier of admissible count vectors")
    common(sp)
    sp.add_argument("--C", type=Fraction, help="link capacity in Mb/s (overrides link.C)")
    sp.add_argument("--D", type=Fraction, help="delay constraint in seconds (overrides link.D)")
    sp.add_argument(
        "--counts",
        help="fix some classes and mark one or two free with 'x', e.g. 2,x,x; "
        "omit for the full frontier",
    )
    sp.set_defaults(handler=cmd_region)

    sp = sub.add_parser("sweep-d", help="sweep the delay constraint, CSV output")
    common(sp)
    sp.add_argument("--d-min", dest="d_min", type=Fraction, required=True)
    sp.add_argument("--d-max", dest="d_max", type=Fraction, required=True)
    sp.add_argument("--steps", type=int, required=True)
    sp.add_argument("--counts", help="comma-separated per-class counts")
    sp.set_defaults(handler=cmd_sweep_d)

    sp = sub.add_parser("simulate", help="validate bounds with a greedy-source run")
    sp.add_argument("--scenario", required=True, help="scenario JSON file")
    sp.add_argument("--C", type=Fraction, help="link capacity in Mb/s (overrides link.C)")
    sp.add_argument("--D", type=Fraction, help="delay constraint in seconds (overrides link.D)")
    sp.add_argument("--counts", help="comma-separated per-class counts")
    sp.add_argument("--dt", type=Fraction, help="lattice step in seconds")
    sp.add_argument("--horizon", type=Fraction, help="run length in seconds")
    sp.add_argument("--out", help="write the trace CSV to this path")
    sp.set_defaults(handler=cmd_simulate)

    return parser


def main(argv: Optional[Sequence[str]] = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.handler(args)
    except NetcalcError as exc:
        sys.stderr.write(f"error: {exc}\n")
        return EXIT_ERROR


def main_entry() -> None:
    sys.exit(main())


if __name__ == "__main__":
    main_entry()
