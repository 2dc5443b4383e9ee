"""Exact piecewise-linear curve algebra for traffic envelopes and service guarantees.

A curve here is a wide-sense increasing function on t >= 0, stored as a finite
min of affine pieces (concave envelopes such as token buckets and T-SPECs) or
a finite max of affine pieces clamped at zero (convex guarantees such as
rate-latency servers). Every curve takes the value 0 at t = 0 and may jump to
a positive right-limit at 0+.

All arithmetic is over ``fractions.Fraction`` so that analytic identities can
be asserted with exact equality. Results that are genuinely unbounded are
reported as the ``UNBOUNDED`` sentinel (IEEE +inf), which compares correctly
against any finite rational.
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from enum import Enum
from fractions import Fraction
from typing import Iterable, Sequence, Union

from .errors import DegenerateTSpecError, DomainError, TSpecError, UnsupportedCurveOperation

Q = Fraction
NumberLike = Union[int, str, Fraction, float]

#: Sentinel for results that are infinite (e.g. a sup that diverges).
UNBOUNDED: float = math.inf

#: Either an exact rational or the UNBOUNDED sentinel.
Value = Union[Fraction, float]


def as_fraction(x: NumberLike) -> Fraction:
    """Coerce ``x`` to an exact Fraction.

    Strings use exact decimal semantics ("0.1" is 1/10); floats convert with
    their exact binary value, so prefer strings or Fractions for decimals.
    """
    if isinstance(x, Fraction):
        return x
    if isinstance(x, float) and not math.isfinite(x):
        raise DomainError("non-finite float cannot be converted to a rational")
    if isinstance(x, bool):
        raise DomainError("booleans are not numeric here")
    return Fraction(x)


def is_unbounded(x: Value) -> bool:
    return isinstance(x, float) and math.isinf(x)


class Shape(Enum):
    """How the affine pieces combine into a curve value."""

    CONCAVE_MIN = "concave_min"
    CONVEX_MAX = "convex_max"


@dataclass(frozen=True)
class AffinePiece:
    """One affine component ``slope * t + intercept`` of a piecewise curve."""

    slope: Fraction
    intercept: Fraction

    def __post_init__(self) -> None:
        object.__setattr__(self, "slope", as_fraction(self.slope))
        object.__setattr__(self, "intercept", as_fraction(self.intercept))
        if self.slope < 0:
            raise DomainError("piece slope must be nonnegative (wide-sense increasing curve)")

    def at(self, t: Fraction) -> Fraction:
        return self.slope * t + self.intercept


def _coerce_pieces(pieces: Iterable) -> tuple[AffinePiece, ...]:
    out = []
    for pc in pieces:
        if isinstance(pc, AffinePiece):
            out.append(pc)
        else:
            slope, intercept = pc
            out.append(AffinePiece(as_fraction(slope), as_fraction(intercept)))
    return tuple(out)


def _envelope(pieces: Sequence[AffinePiece], keep_max: bool) -> list[AffinePiece]:
    """Lower (keep_max=False) or upper (keep_max=True) envelope of lines on t >= 0.

    Returns the pieces that are active somewhere, in activation order
    (increasing t). Classic convex-hull-trick sweep over slopes.
    """
    best: dict[Fraction, Fraction] = {}
    for pc in pieces:
        cur = best.get(pc.slope)
        if cur is None or (pc.intercept > cur if keep_max else pc.intercept < cur):
            best[pc.slope] = pc.intercept
    # For a min envelope the active slope decreases with t, so process
    # steepest-first; for a max envelope it increases, process flattest-first.
    order = sorted(best.items(), key=lambda mc: mc[0], reverse=not keep_max)
    env: list[tuple[Fraction, Fraction, Fraction]] = []  # (slope, intercept, start)
    for m, c in order:
        while env:
            tm, tc, ts = env[-1]
            dominated = c >= tc if keep_max else c <= tc
            if dominated:
                # the new line is at least as good at 0 and better at infinity
                env.pop()
                continue
            x = (tc - c) / (m - tm) if keep_max else (c - tc) / (tm - m)
            if x <= ts:
                env.pop()
                continue
            break
        if env:
            tm, tc, ts = env[-1]
            x = (tc - c) / (m - tm) if keep_max else (c - tc) / (tm - m)
            env.append((m, c, x))
        else:
            env.append((m, c, Q(0)))
    return [AffinePiece(m, c) for m, c, _ in env]


def _intersection(a: AffinePiece, b: AffinePiece) -> Fraction:
    return (b.intercept - a.intercept) / (a.slope - b.slope)


@dataclass(frozen=True)
class PiecewiseCurve:
    """A normalized min-of-affine (concave) or max-of-affine (convex) curve.

    The constructor normalizes: dominated pieces are removed, so the stored
    pieces are exactly those active on some interval, in activation order.
    Convex curves are implicitly clamped at zero from below.
    """

    shape: Shape
    pieces: tuple[AffinePiece, ...]

    def __post_init__(self) -> None:
        raw = _coerce_pieces(self.pieces)
        if not raw:
            raise DomainError("a curve needs at least one affine piece")
        if self.shape is Shape.CONCAVE_MIN:
            if any(pc.intercept < 0 for pc in raw):
                raise DomainError("concave-min pieces must have nonnegative intercepts")
            env = _envelope(raw, keep_max=False)
        else:
            env = _envelope(raw, keep_max=True)
            # Pieces whose whole active segment sits at or below the zero
            # clamp never contribute a value; drop them from the front.
            while len(env) > 1:
                x = _intersection(env[0], env[1])
                if env[0].at(x) <= 0:
                    env.pop(0)
                else:
                    break
            if len(env) == 1 and env[0].slope == 0 and env[0].intercept < 0:
                env = [AffinePiece(Q(0), Q(0))]
        object.__setattr__(self, "pieces", tuple(env))

    # -- basic queries ---------------------------------------------------

    def value(self, t: NumberLike) -> Fraction:
        """Curve value at time t (exact; 0 at t = 0 by convention)."""
        t = as_fraction(t)
        if t < 0:
            raise DomainError("curves are defined on t >= 0")
        if t == 0:
            return Q(0)
        vals = [pc.at(t) for pc in self.pieces]
        if self.shape is Shape.CONCAVE_MIN:
            return min(vals)
        return max(Q(0), max(vals))

    def value_right(self, t: NumberLike) -> Fraction:
        """Right-limit of the curve at t; differs from value() only at the 0+ jump."""
        t = as_fraction(t)
        if t < 0:
            raise DomainError("curves are defined on t >= 0")
        if t > 0:
            return self.value(t)
        first = self.pieces[0].intercept
        if self.shape is Shape.CONCAVE_MIN:
            return first
        return max(Q(0), first)

    def first_slope(self) -> Fraction:
        """Slope of the piece active just after 0."""
        return self.pieces[0].slope

    def long_run_slope(self) -> Fraction:
        """Slope of the piece active as t goes to infinity."""
        return self.pieces[-1].slope

    def breakpoints(self) -> tuple[Fraction, ...]:
        """Strictly increasing abscissas where the curve changes slope.

        For convex curves this includes the point where the envelope rises
        above the zero clamp (the latency of a rate-latency curve).
        """
        pts = [_intersection(a, b) for a, b in zip(self.pieces, self.pieces[1:])]
        if self.shape is Shape.CONVEX_MAX:
            first = self.pieces[0]
            if first.intercept < 0 and first.slope > 0:
                pts.insert(0, -first.intercept / first.slope)
        return tuple(pts)

    def inverse(self, y: NumberLike) -> Value:
        """Earliest time at which the curve reaches level y: inf{t >= 0: f(t) >= y}.

        Returns UNBOUNDED when the curve never reaches y. A level inside the
        0+ jump is reached "immediately", i.e. at 0.
        """
        y = as_fraction(y)
        if y <= 0:
            return Q(0)
        if self.shape is Shape.CONCAVE_MIN:
            lo = Q(0)
            for pc in self.pieces:
                if pc.slope == 0:
                    if pc.intercept < y:
                        return UNBOUNDED
                else:
                    lo = max(lo, (y - pc.intercept) / pc.slope)
            return lo
        best: Value = UNBOUNDED
        for pc in self.pieces:
            if pc.slope == 0:
                if pc.intercept >= y:
                    return Q(0)
            else:
                x = max(Q(0), (y - pc.intercept) / pc.slope)
                if not is_unbounded(best):
                    x = min(best, x)
                best = x
        return best

    # -- algebra ---------------------------------------------------------

    def scaled(self, factor: NumberLike) -> "PiecewiseCurve":
        """Pointwise multiple factor * f, factor >= 0."""
        k = as_fraction(factor)
        if k < 0:
            raise DomainError("curves scale by nonnegative factors only")
        if k == 0:
            return PiecewiseCurve(self.shape, (AffinePiece(Q(0), Q(0)),))
        return PiecewiseCurve(
            self.shape, tuple(AffinePiece(k * pc.slope, k * pc.intercept) for pc in self.pieces)
        )

    def __mul__(self, factor: NumberLike) -> "PiecewiseCurve":
        return self.scaled(factor)

    __rmul__ = __mul__

    def _active_piece(self, t: Fraction) -> AffinePiece:
        vals = [(pc.at(t), pc) for pc in self.pieces]
        key = min if self.shape is Shape.CONCAVE_MIN else max
        return key(vals, key=lambda vp: vp[0])[1]

    def __add__(self, other: "PiecewiseCurve") -> "PiecewiseCurve":
        """Pointwise sum of two concave envelopes (used to aggregate flows)."""
        if not isinstance(other, PiecewiseCurve):
            return NotImplemented
        if self.shape is not Shape.CONCAVE_MIN or other.shape is not Shape.CONCAVE_MIN:
            raise UnsupportedCurveOperation("pointwise sum is provided for concave curves only")
        cuts = sorted(set(self.breakpoints()) | set(other.breakpoints()))
        samples = []
        prev = Q(0)
        for x in cuts:
            samples.append((prev + x) / 2)
            prev = x
        samples.append(prev + 1)
        pieces = []
        for t in samples:
            a = self._active_piece(t)
            b = other._active_piece(t)
            pieces.append(AffinePiece(a.slope + b.slope, a.intercept + b.intercept))
        return PiecewiseCurve(Shape.CONCAVE_MIN, tuple(pieces))

    def normalized(self) -> "PiecewiseCurve":
        """Re-run normalization (a no-op on any constructed curve)."""
        return PiecewiseCurve(self.shape, self.pieces)

    def is_rate_latency(self) -> bool:
        """True for curves of the form rate * (t - latency) clamped at zero."""
        return (
            self.shape is Shape.CONVEX_MAX
            and len(self.pieces) == 1
            and self.pieces[0].intercept <= 0
        )

    def __str__(self) -> str:
        terms = ", ".join(f"{pc.slope}*t{'+' if pc.intercept >= 0 else ''}{pc.intercept}" for pc in self.pieces)
        op = "min" if self.shape is Shape.CONCAVE_MIN else "max"
        return f"{op}({terms})"


# -- common constructors --------------------------------------------------


def token_bucket(rate: NumberLike, burst: NumberLike) -> PiecewiseCurve:
    """Concave envelope rate*t + burst (burst >= 0), the classic leaky bucket."""
    return PiecewiseCurve(Shape.CONCAVE_MIN, (AffinePiece(as_fraction(rate), as_fraction(burst)),))


def rate_latency(rate: NumberLike, latency: NumberLike = 0) -> PiecewiseCurve:
    """Convex guarantee rate * (t - latency), clamped at zero."""
    r = as_fraction(rate)
    lat = as_fraction(latency)
    if lat < 0:
        raise DomainError("latency must be nonnegative")
    return PiecewiseCurve(Shape.CONVEX_MAX, (AffinePiece(r, -r * lat),))


def constant_rate(rate: NumberLike) -> PiecewiseCurve:
    """Convex guarantee of a server that forwards at a fixed rate."""
    return rate_latency(rate, 0)


@dataclass(frozen=True)
class TSpec:
    """Traffic specification (p, M, r, b): a two-piece concave envelope.

    peak_rate (p) and sustained_rate (r) in bits/second, max_packet (M) and
    burst (b) in bits. Requires p > r >= 0 and b >= M >= 0; the peak piece
    must bind first, and p == r is rejected because the breakpoint
    (b - M) / (p - r) would be undefined (use token_bucket for that shape).
    """

    peak_rate: Fraction
    max_packet: Fraction
    sustained_rate: Fraction
    burst: Fraction

    def __post_init__(self) -> None:
        for name in ("peak_rate", "max_packet", "sustained_rate", "burst"):
            object.__setattr__(self, name, as_fraction(getattr(self, name)))
        if self.sustained_rate < 0:
            raise TSpecError("sustained rate must be nonnegative")
        if self.peak_rate == self.sustained_rate:
            raise DegenerateTSpecError(
                "peak rate equals sustained rate; model this flow as token_bucket(r, b)"
            )
        if self.peak_rate < self.sustained_rate:
            raise TSpecError("peak rate must exceed sustained rate")
        if self.max_packet < 0:
            raise TSpecError("max packet size must be nonnegative")
        if self.burst < self.max_packet:
            raise TSpecError("burst tolerance must be at least the max packet size")

    @property
    def breakpoint(self) -> Fraction:
        """Time at which the peak piece meets the sustained piece."""
        return (self.burst - self.max_packet) / (self.peak_rate - self.sustained_rate)

    def as_curve(self) -> PiecewiseCurve:
        """The envelope min(p*t + M, r*t + b)."""
        return PiecewiseCurve(
            Shape.CONCAVE_MIN,
            (
                AffinePiece(self.peak_rate, self.max_packet),
                AffinePiece(self.sustained_rate, self.burst),
            ),
        )


# -- min-plus operations ---------------------------------------------------


def min_plus_convolve(f: PiecewiseCurve, g: PiecewiseCurve) -> PiecewiseCurve:
    """Min-plus convolution inf over s in [0, t] of f(s) + g(t - s).

    Supported exactly for the cases this toolkit needs: two concave envelopes
    (where the result is their pointwise minimum, since both are 0 at the
    origin) and two rate-latency curves (rates take the min, latencies add).
    """
    if f.shape is Shape.CONCAVE_MIN and g.shape is Shape.CONCAVE_MIN:
        return PiecewiseCurve(Shape.CONCAVE_MIN, f.pieces + g.pieces)
    if f.is_rate_latency() and g.is_rate_latency():
        rf, rg = f.pieces[0], g.pieces[0]
        rate = min(rf.slope, rg.slope)
        lat_f = -rf.intercept / rf.slope if rf.slope > 0 else Q(0)
        lat_g = -rg.intercept / rg.slope if rg.slope > 0 else Q(0)
        return rate_latency(rate, lat_f + lat_g)
    raise UnsupportedCurveOperation(
        "convolution is supported for concave/concave and rate-latency/rate-latency pairs"
    )


def _require_arrival_service(alpha: PiecewiseCurve, beta: PiecewiseCurve) -> None:
    if alpha.shape is not Shape.CONCAVE_MIN:
        raise UnsupportedCurveOperation("the arrival side must be a concave envelope")
    if beta.shape is not Shape.CONVEX_MAX:
        raise UnsupportedCurveOperation("the service side must be a convex guarantee")


def min_plus_deconvolve_at(f: PiecewiseCurve, g: PiecewiseCurve, t: NumberLike) -> Value:
    """Min-plus deconvolution sup over v >= 0 of f(t + v) - g(v), at one point.

    For a concave f and convex g the difference is concave in v, so the sup
    is attained on the finite set of slope changes; this enumerates them
    exactly. Returns UNBOUNDED when f outpaces g in the long run.
    """
    _require_arrival_service(f, g)
    t = as_fraction(t)
    if t < 0:
        raise DomainError("deconvolution point must be nonnegative")
    if f.long_run_slope() > g.long_run_slope():
        return UNBOUNDED
    best = max(f.value(t), f.value_right(t) - g.value_right(0))
    candidates = {bp - t for bp in f.breakpoints() if bp > t}
    candidates.update(g.breakpoints())
    for v in candidates:
        best = max(best, f.value(t + v) - g.value(v))
    return best


def vertical_deviation(alpha: PiecewiseCurve, beta: PiecewiseCurve) -> Value:
    """Largest vertical gap sup over s of alpha(s) - beta(s): the backlog bound."""
    return min_plus_deconvolve_at(alpha, beta, 0)


def horizontal_deviation(alpha: PiecewiseCurve, beta: PiecewiseCurve) -> Value:
    """Largest horizontal gap between alpha and beta: the delay bound.

    sup over s of inf{T >= 0: alpha(s) <= beta(s + T)}. The sup is attained
    either at a slope change of alpha (including the 0+ jump) or where alpha
    crosses the level of a slope change of beta; both sets are enumerated.
    """
    _require_arrival_service(alpha, beta)
    if alpha.long_run_slope() > beta.long_run_slope():
        return UNBOUNDED
    best = Q(0)
    for s in (Q(0),) + alpha.breakpoints():
        x = beta.inverse(alpha.value_right(s))
        if is_unbounded(x):
            return UNBOUNDED
        best = max(best, x - s)
    for x in beta.breakpoints():
        s = alpha.inverse(beta.value(x))
        if not is_unbounded(s):
            best = max(best, x - s)
    return max(best, Q(0))
