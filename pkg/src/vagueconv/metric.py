"""The almost-basic convergence metric on distribution functions.

For ``f, g`` with left tail 0 the distance is the least ``eps >= 0`` such
that some constant shift ``c`` makes ``|f - c - g| <= eps`` everywhere on
``[-1/eps, 1/eps]`` except on a set of Lebesgue measure at most ``eps``
(``eps = 0`` uses the whole line).  The least ``eps`` is generally
irrational, so :func:`almost_basic_distance` returns a rational enclosure
whose upper end carries an exact feasibility certificate.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from typing import Optional

from .errors import ContractViolation
from .stepfn import (
    ScalarLike,
    StepFunction,
    as_scalar,
    eval_at,
    format_scalar,
    level_excess,
    linear_combine,
)

#: Always feasible: the window [-2/3, 2/3] is no longer than 3/2.
UPPER_SEED = Fraction(3, 2)


@dataclass(frozen=True)
class DistanceBracket:
    lo: Fraction
    hi: Fraction
    feasible_witness_c: Fraction

    def contains(self, x: ScalarLike) -> bool:
        x = as_scalar(x)
        return self.lo <= x <= self.hi

    @property
    def width(self) -> Fraction:
        return self.hi - self.lo

    def to_json(self) -> dict:
        return {
            "lo": format_scalar(self.lo),
            "hi": format_scalar(self.hi),
            "witness_c": format_scalar(self.feasible_witness_c),
        }


def _max_coverage(pieces: list[tuple[Fraction, Fraction]], eps: Fraction
                  ) -> tuple[Fraction, Fraction]:
    """Best closed band ``[c - eps, c + eps]`` over weighted levels.

    ``pieces`` holds ``(value, length)`` pairs.  Returns ``(c, covered)``
    where ``covered`` is the largest total length of pieces whose value lies
    in some band of width ``2*eps``.  Sliding any optimal band right until its
    lower edge meets a covered level loses nothing, so a two-pointer sweep
    over the sorted distinct levels is exhaustive.  The returned ``c`` is the
    midpoint of the extreme covered levels.
    """
    weight: dict[Fraction, Fraction] = {}
    for v, w in pieces:
        weight[v] = weight.get(v, Fraction(0)) + w
    levels = sorted(weight)
    if not levels:
        return Fraction(0), Fraction(0)
    best = Fraction(-1)
    best_c = Fraction(0)
    covered = Fraction(0)
    j = 0
    width = 2 * eps
    for v in levels:
        while j < len(levels) and levels[j] - v <= width:
            covered += weight[levels[j]]
            j += 1
        if covered > best:
            best = covered
            best_c = (v + levels[j - 1]) / 2
        covered -= weight[v]
    return best_c, best


class _Difference:
    """``h = f - g`` with the level weights of its bounded pieces precomputed.

    Windows that contain every breakpoint, the common case during
    bisection, then cost O(#levels) instead of O(#pieces).
    """

    def __init__(self, h: StepFunction):
        self.h = h
        self.inner: dict[Fraction, Fraction] = {}
        bps = h.breakpoints
        for i in range(len(bps) - 1):
            v = h.values[i + 1]
            self.inner[v] = self.inner.get(v, Fraction(0)) + (bps[i + 1] - bps[i])

    def pieces(self, l: Fraction, r: Fraction) -> list[tuple[Fraction, Fraction]]:
        bps = self.h.breakpoints
        if not bps or l > bps[0] or r < bps[-1]:
            return self.h.clipped_pieces(l, r)
        return [*self.inner.items(),
                (self.h.values[0], bps[0] - l),
                (self.h.values[-1], r - bps[-1])]

    def shift_search(self, eps: Fraction, l: Fraction, r: Fraction) -> tuple[Fraction, Fraction]:
        c, covered = _max_coverage(self.pieces(l, r), eps)
        return c, (r - l) - covered

    def feasible(self, eps: Fraction) -> tuple[bool, Optional[Fraction]]:
        if eps == 0:
            # whole line: feasible iff h is a.e. constant, i.e. constant
            if self.h.is_constant():
                return True, self.h.values[0]
            return False, None
        radius = 1 / eps
        c, violation = self.shift_search(eps, -radius, radius)
        if violation <= eps:
            return True, c
        return False, None


def feasible(f: StepFunction, g: StepFunction, eps: ScalarLike
             ) -> tuple[bool, Optional[Fraction]]:
    """Decide whether ``eps`` is admissible for the pair, with a witness shift."""
    eps = as_scalar(eps)
    if eps < 0:
        raise ContractViolation("feasible needs eps >= 0")
    return _Difference(linear_combine(1, f, -1, g)).feasible(eps)


def almost_basic_distance(f: StepFunction, g: StepFunction, tol: ScalarLike) -> DistanceBracket:
    """Certified enclosure ``[lo, hi]`` of the distance with ``hi - lo <= tol``.

    Bisection on ``[0, 3/2]`` keeps ``lo`` infeasible and ``hi`` feasible;
    the admissible set is an up-ray, so the true minimum stays inside.
    """
    tol = as_scalar(tol)
    if tol <= 0:
        raise ContractViolation("almost_basic_distance needs tol > 0")
    h = _Difference(linear_combine(1, f, -1, g))
    ok, c = h.feasible(Fraction(0))
    if ok:
        return DistanceBracket(Fraction(0), Fraction(0), c)
    lo, hi = Fraction(0), UPPER_SEED
    ok, witness = h.feasible(hi)
    assert ok, "upper seed must be feasible"
    while hi - lo > tol:
        mid = (lo + hi) / 2
        ok, c = h.feasible(mid)
        if ok:
            hi, witness = mid, c
        else:
            lo = mid
    return DistanceBracket(lo, hi, witness)


def best_shift(f: StepFunction, g: StepFunction, eps: ScalarLike,
               l: ScalarLike, r: ScalarLike) -> tuple[Fraction, Fraction]:
    """Shift ``c`` minimising ``lambda{x in [l, r] : |f - c - g| > eps}``, and that minimum."""
    eps, l, r = as_scalar(eps), as_scalar(l), as_scalar(r)
    if l > r:
        raise ContractViolation(f"best_shift needs l <= r, got [{l}, {r}]")
    if eps < 0:
        raise ContractViolation("best_shift needs eps >= 0")
    return _Difference(linear_combine(1, f, -1, g)).shift_search(eps, l, r)


def shift_estimate(f_n: StepFunction, f: StepFunction, x0: ScalarLike) -> Fraction:
    """Pointwise shift ``f_n(x0) - f(x0)``."""
    return eval_at(f_n, x0) - eval_at(f, x0)


def shifted_violation(f: StepFunction, g: StepFunction, c: ScalarLike, eps: ScalarLike,
                      l: ScalarLike, r: ScalarLike) -> Fraction:
    """``lambda{x in [l, r] : |f - c - g| > eps}`` for a given shift."""
    return level_excess(linear_combine(1, f, -1, g), c, eps, l, r)
