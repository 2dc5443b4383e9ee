"""Deterministic text rendering of exact rationals for CLI, CSV and JSON output."""
from __future__ import annotations

from decimal import Decimal, localcontext
from fractions import Fraction
from typing import Optional, Union

from .curves import Value, is_unbounded

#: significant digits carried by decimal renderings (well above the 12 the
#: output contract promises)
SIG_DIGITS = 17

UNBOUNDED_TEXT = "unbounded"


def format_fraction(x: Union[Value, Fraction], sig: int = SIG_DIGITS) -> str:
    """Round-half-even positional decimal string with `sig` significant digits.

    Deterministic for a given value and parses back with Fraction().
    Infinite values render as "unbounded" / "-unbounded".
    """
    if is_unbounded(x):
        return UNBOUNDED_TEXT if x > 0 else "-" + UNBOUNDED_TEXT
    with localcontext() as ctx:
        ctx.prec = sig
        d = Decimal(x.numerator) / Decimal(x.denominator)
    return format(d, "f")


def ratio_string(x: Union[Value, Fraction]) -> Optional[str]:
    """Exact numerator/denominator form, None for unbounded values."""
    if is_unbounded(x):
        return None
    return f"{x.numerator}/{x.denominator}"


def quantity_json(x: Union[Value, Fraction, None]) -> Union[str, dict, None]:
    """JSON payload for one number: decimal rendering plus the exact ratio."""
    if x is None:
        return None
    if is_unbounded(x):
        return format_fraction(x)
    return {"decimal": format_fraction(x), "ratio": ratio_string(x)}
