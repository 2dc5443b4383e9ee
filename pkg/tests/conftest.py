import random
from fractions import Fraction

import pytest

from netcalc import FlowClass, FlowMix, TSpec

# the three bundled catalog classes (rates in bits/s, data in bits)
TYPE1 = TSpec(peak_rate=29_000_000, max_packet=1_000, sustained_rate=700_000, burst=38_000)
TYPE2 = TSpec(peak_rate=7_000_000, max_packet=1_000, sustained_rate=700_000, burst=368_000)
TYPE3 = TSpec(peak_rate=300_000, max_packet=15_000, sustained_rate=30_000, burst=38_000)
CATALOG = (TYPE1, TYPE2, TYPE3)


@pytest.fixture
def catalog():
    return CATALOG


def q(rng: random.Random, lo: int, hi: int, den: int = 4) -> Fraction:
    """Random exact rational in [lo, hi] with denominator dividing den."""
    return Fraction(rng.randint(lo * den, hi * den), den)


def random_tspec(rng: random.Random, allow_zero_rate: bool = True) -> TSpec:
    sustained = q(rng, 0, 40) if allow_zero_rate else q(rng, 1, 40)
    peak = sustained + q(rng, 1, 120)
    packet = q(rng, 0, 25)
    burst = packet if rng.random() < 0.15 else packet + q(rng, 1, 300)
    return TSpec(peak_rate=peak, max_packet=packet, sustained_rate=sustained, burst=burst)


def random_mix(
    rng: random.Random,
    max_classes: int = 5,
    max_count: int = 50,
    allow_zero_rate: bool = True,
    allow_zero_count: bool = True,
) -> FlowMix:
    n_classes = rng.randint(1, max_classes)
    classes = []
    for _ in range(n_classes):
        low = 0 if allow_zero_count else 1
        classes.append(FlowClass(random_tspec(rng, allow_zero_rate), rng.randint(low, max_count)))
    if all(fc.count == 0 for fc in classes):
        classes[0] = FlowClass(classes[0].spec, rng.randint(1, max_count))
    delay = q(rng, 0, 30, 16) + Fraction(1, 16)
    return FlowMix(tuple(classes), delay)


def rng_for(name: str) -> random.Random:
    return random.Random(f"netcalc-{name}")


def jump_threshold(curve) -> Fraction:
    """Smallest delay at which the bandwidth sup moves off the origin jump."""
    return curve.value_right(0) / curve.first_slope()


_acceptance_outcomes: dict[str, str] = {}


def pytest_runtest_logreport(report):
    if report.when == "call" and "test_acceptance.py" in report.nodeid:
        _acceptance_outcomes[report.nodeid.split("::")[-1]] = report.outcome


def pytest_terminal_summary(terminalreporter):
    if not _acceptance_outcomes:
        return
    terminalreporter.write_sep("-", "acceptance criteria")
    for name, outcome in sorted(_acceptance_outcomes.items()):
        mark = "PASS" if outcome == "passed" else outcome.upper()
        terminalreporter.write_line(f"{name}: {mark}")
