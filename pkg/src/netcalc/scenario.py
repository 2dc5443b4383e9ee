"""Scenario files: the JSON surface through which catalogs and links come in.

A scenario lists traffic classes in the units networking people write down
(rates in Mb/s, data in kb with kb = 1000 bits, times in seconds) and is
normalized to bits and seconds on parsing. The schema is strict: an unknown
key is an error, so typos fail loudly instead of silently changing a run.
"""
from __future__ import annotations

import json
from dataclasses import dataclass
from fractions import Fraction
from importlib import resources
from pathlib import Path
from typing import Optional, Sequence, Union

from .bandwidth import FlowClass, FlowMix
from .curves import NumberLike, TSpec, as_fraction
from .errors import NetcalcError, ScenarioError
from .render import format_fraction

KILOBIT = Fraction(1000)
MEGABIT_PER_S = Fraction(10**6)

_CLASS_KEYS = {"name", "p", "M", "r", "b", "count"}
_LINK_KEYS = {"C", "D", "B"}
_SIM_KEYS = {"dt", "horizon"}
_TOP_KEYS = {"classes", "link", "simulation"}


@dataclass(frozen=True)
class ScenarioClass:
    """One named traffic class with its envelope (bits, seconds) and default count."""

    name: str
    spec: TSpec
    count: int


@dataclass(frozen=True)
class LinkSettings:
    capacity: Fraction  # bits/s
    delay: Fraction  # s
    buffer: Optional[Fraction]  # bits


@dataclass(frozen=True)
class SimSettings:
    dt: Optional[Fraction]
    horizon: Optional[Fraction]


@dataclass(frozen=True)
class Scenario:
    classes: tuple[ScenarioClass, ...]
    link: LinkSettings
    simulation: Optional[SimSettings]

    def catalog(self) -> tuple[TSpec, ...]:
        return tuple(sc.spec for sc in self.classes)

    def counts(self) -> tuple[int, ...]:
        return tuple(sc.count for sc in self.classes)

    def flow_mix(
        self,
        counts: Optional[Sequence[int]] = None,
        delay: Optional[NumberLike] = None,
    ) -> FlowMix:
        ns = self.counts() if counts is None else tuple(counts)
        if len(ns) != len(self.classes):
            raise ScenarioError("counts must list one value per class")
        d = self.link.delay if delay is None else as_fraction(delay)
        return FlowMix(tuple(FlowClass(sc.spec, n) for sc, n in zip(self.classes, ns)), d)


def _number(raw: object, where: str) -> Fraction:
    if isinstance(raw, bool) or not isinstance(raw, (int, Fraction, str)):
        raise ScenarioError(f"field '{where}' must be a number")
    try:
        return as_fraction(raw)
    except (ValueError, ZeroDivisionError, NetcalcError):
        raise ScenarioError(f"field '{where}' is not a valid number") from None


def _check_keys(obj: dict, allowed: set[str], where: str) -> None:
    for key in obj:
        if key not in allowed:
            raise ScenarioError(f"unknown field '{key}' in {where}")


def _parse_class(obj: object, index: int) -> ScenarioClass:
    where = f"classes[{index}]"
    if not isinstance(obj, dict):
        raise ScenarioError(f"{where} must be an object")
    _check_keys(obj, _CLASS_KEYS, where)
    for key in ("p", "M", "r", "b"):
        if key not in obj:
            raise ScenarioError(f"missing field '{key}' in {where}")
    name = obj.get("name", f"class{index + 1}")
    if not isinstance(name, str):
        raise ScenarioError(f"field 'name' in {where} must be a string")
    count = obj.get("count", 1)
    if isinstance(count, bool) or not isinstance(count, int) or count < 0:
        raise ScenarioError(f"field 'count' in {where} must be a nonnegative integer")
    try:
        spec = TSpec(
            peak_rate=_number(obj["p"], f"{where}.p") * MEGABIT_PER_S,
            max_packet=_number(obj["M"], f"{where}.M") * KILOBIT,
            sustained_rate=_number(obj["r"], f"{where}.r") * MEGABIT_PER_S,
            burst=_number(obj["b"], f"{where}.b") * KILOBIT,
        )
    except NetcalcError as exc:
        raise ScenarioError(f"class '{name}': {exc}") from exc
    return ScenarioClass(name=name, spec=spec, count=count)


def _parse_document(doc: object) -> Scenario:
    if not isinstance(doc, dict):
        raise ScenarioError("scenario root must be an object")
    _check_keys(doc, _TOP_KEYS, "scenario")
    raw_classes = doc.get("classes")
    if not isinstance(raw_classes, list) or not raw_classes:
        raise ScenarioError("field 'classes' must be a nonempty list")
    classes = tuple(_parse_class(c, i) for i, c in enumerate(raw_classes))

    raw_link = doc.get("link")
    if not isinstance(raw_link, dict):
        raise ScenarioError("field 'link' must be an object")
    _check_keys(raw_link, _LINK_KEYS, "link")
    for key in ("C", "D"):
        if key not in raw_link:
            raise ScenarioError(f"missing field '{key}' in link")
    capacity = _number(raw_link["C"], "link.C") * MEGABIT_PER_S
    delay = _number(raw_link["D"], "link.D")
    if capacity <= 0:
        raise ScenarioError("link.C must be positive")
    if delay < 0:
        raise ScenarioError("link.D must be nonnegative")
    buffer_bits = None
    if "B" in raw_link:
        buffer_bits = _number(raw_link["B"], "link.B") * KILOBIT
        if buffer_bits < 0:
            raise ScenarioError("link.B must be nonnegative")
    link = LinkSettings(capacity=capacity, delay=delay, buffer=buffer_bits)

    simulation = None
    if "simulation" in doc:
        raw_sim = doc["simulation"]
        if not isinstance(raw_sim, dict):
            raise ScenarioError("field 'simulation' must be an object")
        _check_keys(raw_sim, _SIM_KEYS, "simulation")
        dt = _number(raw_sim["dt"], "simulation.dt") if "dt" in raw_sim else None
        horizon = (
            _number(raw_sim["horizon"], "simulation.horizon") if "horizon" in raw_sim else None
        )
        if dt is not None and dt <= 0:
            raise ScenarioError("simulation.dt must be positive")
        if horizon is not None and horizon <= 0:
            raise ScenarioError("simulation.horizon must be positive")
        simulation = SimSettings(dt=dt, horizon=horizon)

    return Scenario(classes=classes, link=link, simulation=simulation)


def parse_scenario(source: Union[str, Path]) -> Scenario:
    """Load and validate a scenario file (exact decimal parsing, strict keys)."""
    path = Path(source)
    try:
        text = path.read_text(encoding="utf-8")
    except OSError as exc:
        raise ScenarioError(f"cannot read scenario file '{path}': {exc}") from exc
    return parse_scenario_text(text)


def parse_scenario_text(text: str) -> Scenario:
    try:
        doc = json.loads(text, parse_float=Fraction)
    except json.JSONDecodeError as exc:
        raise ScenarioError(f"scenario is not valid JSON: {exc}") from exc
    return _parse_document(doc)


def _unit_value(x: Fraction) -> Union[int, str]:
    """Emit an exact JSON value: int when integral, else a decimal or ratio string."""
    if x.denominator == 1:
        return x.numerator
    # denominators of the form 2^a 5^b have a finite decimal expansion
    den = x.denominator
    for base in (2, 5):
        while den % base == 0:
            den //= base
    if den == 1:
        from .render import format_fraction

        return format_fraction(x, sig=30)
    return f"{x.numerator}/{x.denominator}"


def scenario_to_document(scenario: Scenario) -> dict:
    """Back to the on-disk units; parse(emit(s)) == s exactly."""
    doc: dict = {
        "classes": [
            {
                "name": sc.name,
                "p": _unit_value(sc.spec.peak_rate / MEGABIT_PER_S),
                "M": _unit_value(sc.spec.max_packet / KILOBIT),
                "r": _unit_value(sc.spec.sustained_rate / MEGABIT_PER_S),
                "b": _unit_value(sc.spec.burst / KILOBIT),
                "count": sc.count,
            }
            for sc in scenario.classes
        ],
        "link": {
            "C": _unit_value(scenario.link.capacity / MEGABIT_PER_S),
            "D": _unit_value(scenario.link.delay),
        },
    }
    if scenario.link.buffer is not None:
        doc["link"]["B"] = _unit_value(scenario.link.buffer / KILOBIT)
    if scenario.simulation is not None:
        sim: dict = {}
        if scenario.simulation.dt is not None:
            sim["dt"] = _unit_value(scenario.simulation.dt)
        if scenario.simulation.horizon is not None:
            sim["horizon"] = _unit_value(scenario.simulation.horizon)
        doc["simulation"] = sim
    return doc


def bundled_scenario_path(name: str = "table1.json") -> Path:
    """Filesystem path of a scenario shipped with the package."""
    with resources.as_file(resources.files("netcalc").joinpath("data", name)) as p:
        return Path(p)
