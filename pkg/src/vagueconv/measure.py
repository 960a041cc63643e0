"""Finite atomic signed measures, their distribution functions, and exact integrals."""

from __future__ import annotations

from bisect import bisect_left, bisect_right
from dataclasses import dataclass
from fractions import Fraction
from typing import Iterable

from .errors import ContractViolation, DomainError
from .stepfn import (
    ScalarLike,
    StepFunction,
    as_scalar,
    format_scalar,
    parse_scalar,
)


@dataclass(frozen=True)
class SignedMeasure:
    """``sum_i w_i * delta_{x_i}`` with strictly increasing ``x_i`` and ``w_i != 0``."""

    atoms: tuple[tuple[Fraction, Fraction], ...] = ()

    def __post_init__(self) -> None:
        atoms = tuple((as_scalar(x), as_scalar(w)) for x, w in self.atoms)
        for (x0, _), (x1, _) in zip(atoms, atoms[1:]):
            if not x0 < x1:
                raise ContractViolation("atom positions must be strictly increasing")
        if any(w == 0 for _, w in atoms):
            raise ContractViolation("atom masses must be non-zero")
        object.__setattr__(self, "atoms", atoms)

    @classmethod
    def from_atoms(cls, atoms: Iterable[tuple[ScalarLike, ScalarLike]]) -> SignedMeasure:
        """Build from unsorted atoms; repeated positions are summed and zeros dropped."""
        acc: dict[Fraction, Fraction] = {}
        for x, w in atoms:
            x = as_scalar(x)
            acc[x] = acc.get(x, Fraction(0)) + as_scalar(w)
        return cls(tuple((x, acc[x]) for x in sorted(acc) if acc[x] != 0))

    @classmethod
    def dirac(cls, x: ScalarLike, mass: ScalarLike = 1) -> SignedMeasure:
        return cls.from_atoms([(x, mass)])

    @classmethod
    def zero(cls) -> SignedMeasure:
        return cls(())

    @property
    def positions(self) -> tuple[Fraction, ...]:
        return tuple(x for x, _ in self.atoms)

    @property
    def masses(self) -> tuple[Fraction, ...]:
        return tuple(w for _, w in self.atoms)

    def total_variation(self) -> Fraction:
        """``|mu|(R)``."""
        return sum((abs(w) for _, w in self.atoms), Fraction(0))

    def total_mass(self) -> Fraction:
        return sum((w for _, w in self.atoms), Fraction(0))

    def __neg__(self) -> SignedMeasure:
        return SignedMeasure(tuple((x, -w) for x, w in self.atoms))

    def __add__(self, other: SignedMeasure) -> SignedMeasure:
        return SignedMeasure.from_atoms([*self.atoms, *other.atoms])

    def __sub__(self, other: SignedMeasure) -> SignedMeasure:
        return self + (-other)

    def scale(self, a: ScalarLike) -> SignedMeasure:
        a = as_scalar(a)
        return SignedMeasure.from_atoms((x, a * w) for x, w in self.atoms)

    def __repr__(self) -> str:
        if not self.atoms:
            return "SignedMeasure.zero()"
        terms = " + ".join(f"{w}*delta({x})" for x, w in self.atoms)
        return f"SignedMeasure({terms})"

    def to_json(self) -> dict:
        return {"atoms": [{"x": format_scalar(x), "w": format_scalar(w)} for x, w in self.atoms]}

    @classmethod
    def from_json(cls, data: dict) -> SignedMeasure:
        try:
            raw = data["atoms"]
            atoms = tuple((parse_scalar(str(a["x"])), parse_scalar(str(a["w"]))) for a in raw)
        except (KeyError, TypeError) as exc:
            raise ContractViolation(f"measure JSON needs 'atoms' with 'x' and 'w': {exc}")
        return cls(atoms)


@dataclass(frozen=True)
class TestFunction:
    """Continuous piecewise-linear function with constant tails.

    Affine between consecutive ``nodes``, equal to ``left_tail`` on
    ``(-inf, t_1]`` and ``right_tail`` on ``[t_k, inf)``.  Continuity forces
    ``node_values[0] == left_tail`` and ``node_values[-1] == right_tail``.
    """

    __test__ = False  # keep pytest from collecting this class

    nodes: tuple[Fraction, ...]
    node_values: tuple[Fraction, ...]
    left_tail: Fraction = Fraction(0)
    right_tail: Fraction = Fraction(0)

    def __post_init__(self) -> None:
        nodes = tuple(as_scalar(t) for t in self.nodes)
        vals = tuple(as_scalar(y) for y in self.node_values)
        lt, rt = as_scalar(self.left_tail), as_scalar(self.right_tail)
        if len(nodes) != len(vals):
            raise ContractViolation("nodes and node_values differ in length")
        for a, b in zip(nodes, nodes[1:]):
            if not a < b:
                raise ContractViolation("nodes must be strictly increasing")
        if nodes:
            if vals[0] != lt or vals[-1] != rt:
                raise ContractViolation("tails must match the end node values")
        elif lt != rt:
            raise ContractViolation("a node-free test function must have equal tails")
        object.__setattr__(self, "nodes", nodes)
        object.__setattr__(self, "node_values", vals)
        object.__setattr__(self, "left_tail", lt)
        object.__setattr__(self, "right_tail", rt)

    @classmethod
    def from_points(cls, points: Iterable[tuple[ScalarLike, ScalarLike]]) -> TestFunction:
        pts = [(as_scalar(t), as_scalar(y)) for t, y in points]
        if not pts:
            return cls.constant(0)
        return cls(tuple(t for t, _ in pts), tuple(y for _, y in pts), pts[0][1], pts[-1][1])

    @classmethod
    def constant(cls, value: ScalarLike) -> TestFunction:
        v = as_scalar(value)
        return cls((), (), v, v)

    @classmethod
    def hat(cls, center: ScalarLike, half_width: ScalarLike, height: ScalarLike = 1) -> TestFunction:
        c, w, h = as_scalar(center), as_scalar(half_width), as_scalar(height)
        if w <= 0:
            raise ContractViolation("hat needs a positive half-width")
        return cls.from_points([(c - w, 0), (c, h), (c + w, 0)])

    @property
    def compactly_supported(self) -> bool:
        return self.left_tail == 0 and self.right_tail == 0

    @property
    def support_hull(self) -> tuple[Fraction, Fraction]:
        """Smallest ``[a, b]`` outside of which the function is 0."""
        if not self.compactly_supported:
            raise ContractViolation("support is not compact")
        nz = [i for i, y in enumerate(self.node_values) if y != 0]
        if not nz:
            return Fraction(0), Fraction(0)
        return self.nodes[nz[0] - 1], self.nodes[nz[-1] + 1]

    def lipschitz_constant(self) -> Fraction:
        return max((abs(s) for s in self._slopes()), default=Fraction(0))

    def _slopes(self) -> list[Fraction]:
        t, y = self.nodes, self.node_values
        return [(y[i + 1] - y[i]) / (t[i + 1] - t[i]) for i in range(len(t) - 1)]

    def __call__(self, x: ScalarLike) -> Fraction:
        x = as_scalar(x)
        t, y = self.nodes, self.node_values
        if not t or x <= t[0]:
            return self.left_tail
        if x >= t[-1]:
            return self.right_tail
        i = bisect_right(t, x) - 1
        if t[i] == x:
            return y[i]
        return y[i] + (y[i + 1] - y[i]) * (x - t[i]) / (t[i + 1] - t[i])

    def to_json(self) -> dict:
        return {
            "nodes": [format_scalar(t) for t in self.nodes],
            "values": [format_scalar(y) for y in self.node_values],
            "left_tail": format_scalar(self.left_tail),
            "right_tail": format_scalar(self.right_tail),
        }

    @classmethod
    def from_json(cls, data: dict) -> TestFunction:
        try:
            nodes = tuple(parse_scalar(str(t)) for t in data["nodes"])
            vals = tuple(parse_scalar(str(y)) for y in data["values"])
        except (KeyError, TypeError) as exc:
            raise ContractViolation(f"test function JSON needs 'nodes' and 'values': {exc}")
        lt = parse_scalar(str(data["left_tail"])) if "left_tail" in data else (vals[0] if vals else Fraction(0))
        rt = parse_scalar(str(data["right_tail"])) if "right_tail" in data else (vals[-1] if vals else lt)
        return cls(nodes, vals, lt, rt)


def cdf(mu: SignedMeasure) -> StepFunction:
    """Distribution function ``x -> mu((-inf, x])``."""
    running = Fraction(0)
    values = [running]
    for _, w in mu.atoms:
        running += w
        values.append(running)
    return StepFunction(mu.positions, tuple(values))


def from_cdf(F: StepFunction) -> SignedMeasure:
    """Inverse of :func:`cdf` on functions with left tail 0."""
    if F.values[0] != 0:
        raise DomainError(f"left tail is {F.values[0]}, not 0; the function is not a distribution function")
    return SignedMeasure(tuple(F.jumps()))


def hahn_jordan(mu: SignedMeasure) -> tuple[SignedMeasure, SignedMeasure]:
    """Split into mutually singular non-negative parts ``(mu_plus, mu_minus)``."""
    plus = tuple((x, w) for x, w in mu.atoms if w > 0)
    minus = tuple((x, -w) for x, w in mu.atoms if w < 0)
    return SignedMeasure(plus), SignedMeasure(minus)


def _atom_range(mu: SignedMeasure, a: Fraction, b: Fraction, closed_left: bool) -> range:
    pos = mu.positions
    lo = bisect_left(pos, a) if closed_left else bisect_right(pos, a)
    return range(lo, bisect_right(pos, b))


def tv_on_interval(mu: SignedMeasure, a: ScalarLike, b: ScalarLike) -> Fraction:
    """``|mu|([a, b])``, both endpoints included."""
    a, b = as_scalar(a), as_scalar(b)
    if a > b:
        raise ContractViolation(f"tv_on_interval needs a <= b, got [{a}, {b}]")
    return sum((abs(mu.atoms[i][1]) for i in _atom_range(mu, a, b, True)), Fraction(0))


def tv_outside(mu: SignedMeasure, a: ScalarLike, b: ScalarLike) -> Fraction:
    """``|mu|(R \\ [a, b])``."""
    return mu.total_variation() - tv_on_interval(mu, a, b)


def interval_mass(mu: SignedMeasure, x: ScalarLike, y: ScalarLike) -> Fraction:
    """``mu((x, y])``."""
    x, y = as_scalar(x), as_scalar(y)
    if x > y:
        raise ContractViolation(f"interval_mass needs x <= y, got ({x}, {y}]")
    return sum((mu.atoms[i][1] for i in _atom_range(mu, x, y, False)), Fraction(0))


def integrate(mu: SignedMeasure, phi: TestFunction) -> Fraction:
    return sum((w * phi(x) for x, w in mu.atoms), Fraction(0))


def derivative_step(phi: TestFunction) -> StepFunction:
    """Right-continuous slope function of ``phi`` (0 on both tails)."""
    t = phi.nodes
    if len(t) < 2:
        return StepFunction.zero()
    return StepFunction(t, (Fraction(0), *phi._slopes(), Fraction(0)))


def integrate_step_product(g: StepFunction, h: StepFunction,
                           a: ScalarLike, b: ScalarLike) -> Fraction:
    """Exact ``int_a^b g(t) h(t) dt`` over the common refinement."""
    a, b = as_scalar(a), as_scalar(b)
    if a > b:
        raise ContractViolation(f"integrate_step_product needs a <= b, got [{a}, {b}]")
    total = Fraction(0)
    gp, hp = g.clipped_pieces(a, b), h.clipped_pieces(a, b)
    i = j = 0
    gi_left, hj_left = (gp[0][1] if gp else 0), (hp[0][1] if hp else 0)
    # walk both piece lists, consuming the shorter remaining length each time
    while i < len(gp) and j < len(hp):
        step = min(gi_left, hj_left)
        total += gp[i][0] * hp[j][0] * step
        gi_left -= step
        hj_left -= step
        if gi_left == 0:
            i += 1
            if i < len(gp):
                gi_left = gp[i][1]
        if hj_left == 0:
            j += 1
            if j < len(hp):
                hj_left = hp[j][1]
    return total
