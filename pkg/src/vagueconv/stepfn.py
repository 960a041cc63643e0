"""Right-continuous step functions of bounded variation with exact rational data.

A :class:`StepFunction` with breakpoints ``x_1 < ... < x_m`` and values
``v_0, ..., v_m`` is the function::

    f(x) = v_0    for x < x_1
    f(x) = v_i    for x_i <= x < x_{i+1}
    f(x) = v_m    for x >= x_m

Every piece is closed on the left and open on the right, so the function is
right-continuous by construction.  Instances are kept canonical (adjacent
values differ), which makes ``==`` decide equality of functions.
"""

from __future__ import annotations

import re
from bisect import bisect_left, bisect_right
from dataclasses import dataclass
from fractions import Fraction
from heapq import merge
from typing import Iterable, Iterator, Sequence, Union

from .errors import ContractViolation

Scalar = Fraction
ScalarLike = Union[Fraction, int, str]

_RATIONAL_RE = re.compile(r"^\s*([+-]?\d+)(?:\s*/\s*(\d+))?\s*$")


def as_scalar(x: ScalarLike) -> Fraction:
    """Coerce ``x`` to an exact rational.

    Accepts :class:`~fractions.Fraction`, ``int`` and ``"p/q"`` / ``"p"``
    strings.  Floats are rejected so that no rounded value can leak in.
    """
    if isinstance(x, Fraction):
        return x
    if isinstance(x, bool):
        raise ContractViolation(f"not a rational: {x!r}")
    if isinstance(x, int):
        return Fraction(x)
    if isinstance(x, str):
        return parse_scalar(x)
    raise ContractViolation(f"not an exact rational: {x!r}")


def parse_scalar(text: str) -> Fraction:
    m = _RATIONAL_RE.match(text)
    if m is None:
        raise ContractViolation(f"malformed rational {text!r}; expected 'p/q' or 'p'")
    num, den = m.group(1), m.group(2)
    if den is not None and int(den) == 0:
        raise ContractViolation(f"zero denominator in {text!r}")
    return Fraction(int(num), int(den) if den is not None else 1)


def format_scalar(x: Fraction) -> str:
    return str(x)


@dataclass(frozen=True)
class StepFunction:
    breakpoints: tuple[Fraction, ...]
    values: tuple[Fraction, ...]

    def __post_init__(self) -> None:
        bps = tuple(as_scalar(b) for b in self.breakpoints)
        vals = tuple(as_scalar(v) for v in self.values)
        if len(vals) != len(bps) + 1:
            raise ContractViolation(
                f"need {len(bps) + 1} values for {len(bps)} breakpoints, got {len(vals)}"
            )
        for left, right in zip(bps, bps[1:]):
            if not left < right:
                raise ContractViolation("breakpoints must be strictly increasing")
        bps, vals = _canonical(bps, vals)
        object.__setattr__(self, "breakpoints", bps)
        object.__setattr__(self, "values", vals)

    # -- constructors -------------------------------------------------------

    @classmethod
    def constant(cls, value: ScalarLike = 0) -> StepFunction:
        return cls((), (as_scalar(value),))

    @classmethod
    def zero(cls) -> StepFunction:
        return cls.constant(0)

    @classmethod
    def indicator(cls, a: ScalarLike, b: ScalarLike | None = None,
                  height: ScalarLike = 1) -> StepFunction:
        """``height * 1_[a, b)``; ``b=None`` gives ``height * 1_[a, inf)``."""
        a, h = as_scalar(a), as_scalar(height)
        if b is None:
            return cls((a,), (Fraction(0), h))
        b = as_scalar(b)
        if not a < b:
            return cls.zero()
        return cls((a, b), (Fraction(0), h, Fraction(0)))

    @classmethod
    def indicator_of_union(cls, intervals: Iterable[tuple[ScalarLike, ScalarLike]]) -> StepFunction:
        """Indicator of a finite union of pairwise disjoint ``[a, b)`` intervals."""
        ivs = sorted((as_scalar(a), as_scalar(b)) for a, b in intervals)
        bps: list[Fraction] = []
        vals: list[Fraction] = [Fraction(0)]
        for a, b in ivs:
            if not a < b:
                continue
            if bps and a < bps[-1]:
                raise ContractViolation("intervals overlap")
            if bps and a == bps[-1]:
                # abutting interval: extend the previous one
                bps[-1] = b
                continue
            bps += [a, b]
            vals += [Fraction(1), Fraction(0)]
        return cls(tuple(bps), tuple(vals))

    # -- basic queries ------------------------------------------------------

    def __call__(self, x: ScalarLike) -> Fraction:
        return eval_at(self, x)

    @property
    def left_tail(self) -> Fraction:
        return self.values[0]

    @property
    def right_tail(self) -> Fraction:
        return self.values[-1]

    @property
    def in_W(self) -> bool:
        return self.values[0] == 0

    def is_constant(self) -> bool:
        return not self.breakpoints

    def jumps(self) -> Iterator[tuple[Fraction, Fraction]]:
        """Yield ``(x_i, v_i - v_{i-1})`` for each breakpoint."""
        for i, x in enumerate(self.breakpoints):
            yield x, self.values[i + 1] - self.values[i]

    def pieces(self) -> Iterator[tuple[Fraction | None, Fraction | None, Fraction]]:
        """Yield ``(start, end, value)``; ``None`` stands for an infinite end."""
        bps = self.breakpoints
        starts: list[Fraction | None] = [None, *bps]
        ends: list[Fraction | None] = [*bps, None]
        yield from zip(starts, ends, self.values)

    def clipped_pieces(self, l: Fraction, r: Fraction) -> list[tuple[Fraction, Fraction]]:
        """``(value, length)`` of every piece intersected with ``[l, r]``.

        Zero-length intersections are dropped; the lengths sum to ``r - l``.
        """
        bps = self.breakpoints
        lo = bisect_right(bps, l)
        hi = bisect_left(bps, r)
        out: list[tuple[Fraction, Fraction]] = []
        start = l
        for i in range(lo, hi):
            x = bps[i]
            if x > start:
                out.append((self.values[i], x - start))
            start = x
        if r > start:
            out.append((self.values[hi], r - start))
        return out

    def __neg__(self) -> StepFunction:
        return StepFunction(self.breakpoints, tuple(-v for v in self.values))

    def __add__(self, other: StepFunction) -> StepFunction:
        return linear_combine(1, self, 1, other)

    def __sub__(self, other: StepFunction) -> StepFunction:
        return linear_combine(1, self, -1, other)

    def shift(self, c: ScalarLike) -> StepFunction:
        """``f + c``."""
        c = as_scalar(c)
        return StepFunction(self.breakpoints, tuple(v + c for v in self.values))

    def scale(self, a: ScalarLike) -> StepFunction:
        a = as_scalar(a)
        return StepFunction(self.breakpoints, tuple(a * v for v in self.values))

    def __repr__(self) -> str:
        if not self.breakpoints:
            return f"StepFunction.constant({self.values[0]})"
        bps = ", ".join(map(str, self.breakpoints))
        vals = ", ".join(map(str, self.values))
        return f"StepFunction(breakpoints=[{bps}], values=[{vals}])"

    # -- serialization ------------------------------------------------------

    def to_json(self) -> dict:
        return {
            "breakpoints": [format_scalar(x) for x in self.breakpoints],
            "values": [format_scalar(v) for v in self.values],
        }

    @classmethod
    def from_json(cls, data: dict) -> StepFunction:
        try:
            bps = data["breakpoints"]
            vals = data["values"]
        except (KeyError, TypeError) as exc:
            raise ContractViolation(f"step function JSON needs 'breakpoints' and 'values': {exc}")
        return cls(tuple(parse_scalar(str(b)) for b in bps),
                   tuple(parse_scalar(str(v)) for v in vals))


def _canonical(bps: Sequence[Fraction], vals: Sequence[Fraction]
               ) -> tuple[tuple[Fraction, ...], tuple[Fraction, ...]]:
    out_b: list[Fraction] = []
    out_v: list[Fraction] = [vals[0]]
    for x, v in zip(bps, vals[1:]):
        if v != out_v[-1]:
            out_b.append(x)
            out_v.append(v)
    return tuple(out_b), tuple(out_v)


def eval_at(f: StepFunction, x: ScalarLike) -> Fraction:
    """Value of ``f`` at ``x``; breakpoints belong to the piece on their right."""
    return f.values[bisect_right(f.breakpoints, as_scalar(x))]


def linear_combine(a: ScalarLike, f: StepFunction, b: ScalarLike, g: StepFunction) -> StepFunction:
    """``a*f + b*g`` in canonical form."""
    a, b = as_scalar(a), as_scalar(b)
    bps: list[Fraction] = []
    vals = [a * f.values[0] + b * g.values[0]]
    i = j = 0
    fb, gb = f.breakpoints, g.breakpoints
    for x in merge(fb, gb):
        if bps and bps[-1] == x:
            continue
        while i < len(fb) and fb[i] <= x:
            i += 1
        while j < len(gb) and gb[j] <= x:
            j += 1
        bps.append(x)
        vals.append(a * f.values[i] + b * g.values[j])
    return StepFunction(tuple(bps), tuple(vals))


def total_variation_on(f: StepFunction, a: ScalarLike, b: ScalarLike) -> Fraction:
    """Sum of ``|jump|`` over breakpoints in ``(a, b]``.

    A jump sitting exactly at ``a`` is excluded and one at ``b`` is included,
    so that for a distribution function this is ``|mu|((a, b])``.
    """
    a, b = as_scalar(a), as_scalar(b)
    if a > b:
        raise ContractViolation(f"total_variation_on needs a <= b, got [{a}, {b}]")
    bps = f.breakpoints
    lo, hi = bisect_right(bps, a), bisect_right(bps, b)
    return sum((abs(f.values[i + 1] - f.values[i]) for i in range(lo, hi)), Fraction(0))


def total_variation(f: StepFunction) -> Fraction:
    return sum((abs(j) for _, j in f.jumps()), Fraction(0))


def level_excess(f: StepFunction, c: ScalarLike, eps: ScalarLike,
                 l: ScalarLike, r: ScalarLike) -> Fraction:
    """Lebesgue measure of ``{x in [l, r] : |f(x) - c| > eps}``.

    The inequality is strict: a piece at exactly distance ``eps`` from ``c``
    does not count.
    """
    c, eps, l, r = map(as_scalar, (c, eps, l, r))
    if l > r:
        raise ContractViolation(f"level_excess needs l <= r, got [{l}, {r}]")
    if eps < 0:
        raise ContractViolation("level_excess needs eps >= 0")
    return sum((w for v, w in f.clipped_pieces(l, r) if abs(v - c) > eps), Fraction(0))


def normalize_to_W(f: StepFunction) -> StepFunction:
    """``f - f(-inf)``, the representative with left tail 0."""
    return f.shift(-f.values[0])


def lebesgue_measure_of_support(f: StepFunction) -> Fraction:
    """``lambda({f != 0})``; infinite supports raise."""
    if f.values[0] != 0 or f.values[-1] != 0:
        raise ContractViolation("support has infinite measure")
    return sum((end - start for start, end, v in f.pieces() if v != 0), Fraction(0))
