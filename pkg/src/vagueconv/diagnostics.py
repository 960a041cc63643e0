"""Finite-prefix diagnostics for convergence of a sequence of signed measures.

Convergence cannot be decided from finitely many terms.  Every verdict here
is *prefix evidence*: exact per-index quantities, summarised by trend rules
over the last part of the prefix.

Trend rules, with ``tail`` the last quarter of a prefix (at least one term)
and ``head`` everything before it:

* *decays*: ``max(tail) <= threshold``;
* *bounded*: ``max(tail) <= max(head)``, i.e. the tail sets no new record.

The report combines five probes:

A. vague gaps ``|int phi dmu_n - int phi dmu|`` decay for every test function;
B. local total variation ``|mu_n|([-r, r])`` is bounded for every radius;
C. the almost-basic distance between distribution functions decays;
D. total variation ``|mu_n|(R)`` is bounded;
E. the sequence is tight (the minimal radius carrying all but ``eps`` of the
   variation is bounded).

Vague convergence holds exactly when local variation is bounded and the
distribution functions converge almost basically, so A must agree with
``B and C``; a disagreement raises :class:`~vagueconv.errors.ConsistencyError`.
"""

from __future__ import annotations

import csv
import io
import math
from dataclasses import dataclass, field
from fractions import Fraction
from functools import cached_property
from typing import Iterable, Optional, Sequence, Union

from .errors import ConsistencyError, ContractViolation
from .generators import FamilyId, cantor_staircase, default_test_functions, family
from .measure import (
    SignedMeasure,
    TestFunction,
    cdf,
    integrate,
    tv_on_interval,
    tv_outside,
)
from .metric import DistanceBracket, almost_basic_distance
from .stepfn import ScalarLike, StepFunction, as_scalar, format_scalar

PREFIX_LABEL = "prefix evidence"


@dataclass(frozen=True)
class SequenceSpec:
    """A finite prefix ``(mu_n)`` of a sequence together with its claimed limit."""

    indices: tuple[int, ...]
    measures: tuple[SignedMeasure, ...]
    limit: SignedMeasure
    family: Optional[FamilyId] = None

    def __post_init__(self) -> None:
        if not self.measures:
            raise ContractViolation("a sequence needs at least one term")
        if len(self.indices) != len(self.measures):
            raise ContractViolation("indices and measures differ in length")

    @classmethod
    def from_family(cls, name: Union[str, FamilyId], n_from: int, n_to: int,
                    limit: Optional[SignedMeasure] = None) -> SequenceSpec:
        prof = family(name)
        if n_from > n_to:
            raise ContractViolation(f"empty range {n_from}:{n_to}")
        if n_from < prof.n_min:
            raise ContractViolation(f"{prof.family.value} starts at n = {prof.n_min}")
        idx = tuple(range(n_from, n_to + 1))
        return cls(idx, tuple(prof.measure(n) for n in idx),
                   prof.limit if limit is None else limit, prof.family)

    @classmethod
    def explicit(cls, measures: Sequence[SignedMeasure], limit: SignedMeasure,
                 n_from: int = 1) -> SequenceSpec:
        return cls(tuple(range(n_from, n_from + len(measures))), tuple(measures), limit)

    @cached_property
    def distributions(self) -> tuple[StepFunction, ...]:
        return tuple(cdf(mu) for mu in self.measures)

    @cached_property
    def limit_distribution(self) -> StepFunction:
        return cdf(self.limit)

    def __len__(self) -> int:
        return len(self.indices)


@dataclass(frozen=True)
class RunningSup:
    values: tuple[Fraction, ...]
    running_sup: tuple[Fraction, ...]

    @classmethod
    def of(cls, values: Iterable[Fraction]) -> RunningSup:
        vals = tuple(values)
        sups, best = [], None
        for v in vals:
            best = v if best is None else max(best, v)
            sups.append(best)
        return cls(vals, tuple(sups))

    @property
    def bounded(self) -> bool:
        return tail_is_bounded(self.values)


@dataclass(frozen=True)
class TightnessProfile:
    radii: tuple[Optional[int], ...]
    tight: bool


@dataclass(frozen=True)
class SubsequenceResult:
    found: bool
    indices: tuple[int, ...]
    values: tuple[Fraction, ...]
    failed_threshold: Optional[Fraction] = None
    failed_position: Optional[int] = None


# -- trend rules ------------------------------------------------------------

def tail_split(values: Sequence, fraction: Fraction = Fraction(1, 4)) -> tuple[list, list]:
    size = max(1, math.floor(len(values) * fraction))
    return list(values[:-size]), list(values[-size:])


def tail_decays(values: Sequence[Fraction], threshold: Fraction,
                fraction: Fraction = Fraction(1, 4)) -> bool:
    _, tail = tail_split(values, fraction)
    return max(tail) <= threshold


def tail_is_bounded(values: Sequence, fraction: Fraction = Fraction(1, 4)) -> bool:
    head, tail = tail_split(values, fraction)
    if not head:
        return True
    return max(tail) <= max(head)


# -- probes -----------------------------------------------------------------

def vague_gap_trace(spec: SequenceSpec, phis: Sequence[TestFunction]) -> dict[int, list[Fraction]]:
    """``|int phi dmu_n - int phi dmu|`` for every index and test function."""
    for j, phi in enumerate(phis):
        if not phi.compactly_supported:
            raise ContractViolation(f"test function {j} is not compactly supported")
    base = [integrate(spec.limit, phi) for phi in phis]
    return {
        n: [abs(integrate(mu, phi) - b) for phi, b in zip(phis, base)]
        for n, mu in zip(spec.indices, spec.measures)
    }


def local_tv_profile(spec: SequenceSpec, radii: Sequence[ScalarLike]) -> dict[Fraction, RunningSup]:
    """``|mu_n|([-r, r])`` and its running supremum, per radius."""
    out = {}
    for r in map(as_scalar, radii):
        if r <= 0:
            raise ContractViolation(f"radii must be positive, got {r}")
        out[r] = RunningSup.of(tv_on_interval(mu, -r, r) for mu in spec.measures)
    return out


def uniform_tv_trace(spec: SequenceSpec) -> RunningSup:
    return RunningSup.of(mu.total_variation() for mu in spec.measures)


def minimal_radius(mu: SignedMeasure, eps: Fraction, grid: Sequence[int]) -> Optional[int]:
    for r in grid:
        if tv_outside(mu, -r, r) < eps:
            return r
    return None


def tightness_profile(spec: SequenceSpec, eps: ScalarLike,
                      grid: Sequence[int] = range(0, 65)) -> TightnessProfile:
    """Per index, the least grid radius ``r`` with ``|mu_n|(R \\ [-r, r]) < eps``.

    ``tight`` is False when some index has no such radius on the grid or the
    radii set a new record in the tail of the prefix (mass escaping).
    """
    eps = as_scalar(eps)
    if eps <= 0:
        raise ContractViolation("tightness_profile needs eps > 0")
    radii = tuple(minimal_radius(mu, eps, grid) for mu in spec.measures)
    if any(r is None for r in radii):
        return TightnessProfile(radii, False)
    return TightnessProfile(radii, tail_is_bounded(radii))


def _grid_points(grid: Iterable[ScalarLike], exclude: Iterable[ScalarLike]) -> list[Fraction]:
    excl = {as_scalar(x) for x in exclude}
    return sorted({as_scalar(x) for x in grid} - excl)


def basic_diff_probe(spec: SequenceSpec, grid: Iterable[ScalarLike],
                     exclude: Iterable[ScalarLike] = ()) -> list[Fraction]:
    """``sup |(F_n(x) - F_n(y)) - (F(x) - F(y))|`` over pairs from ``grid \\ exclude``."""
    pts = _grid_points(grid, exclude)
    if not pts:
        return [Fraction(0)] * len(spec)
    F = spec.limit_distribution
    out = []
    for Fn in spec.distributions:
        diffs = [Fn(x) - F(x) for x in pts]
        # sup over pairs of |D(x) - D(y)| is the spread of D
        out.append(max(diffs) - min(diffs))
    return out


def pointwise_probe(spec: SequenceSpec, grid: Iterable[ScalarLike],
                    exclude: Iterable[ScalarLike] = ()) -> list[Fraction]:
    """``sup |F_n(x) - F(x)|`` over ``grid \\ exclude``."""
    pts = _grid_points(grid, exclude)
    F = spec.limit_distribution
    return [max((abs(Fn(x) - F(x)) for x in pts), default=Fraction(0))
            for Fn in spec.distributions]


def subsequence_search(spec: SequenceSpec, grid: Iterable[ScalarLike],
                       schedule: Sequence[ScalarLike], exclude: Iterable[ScalarLike] = (),
                       pointwise: bool = False) -> SubsequenceResult:
    """Greedy selection ``n_1 < n_2 < ...`` with probe value at ``n_j`` below ``schedule[j]``.

    The probe is :func:`basic_diff_probe` (differences), or
    :func:`pointwise_probe` when ``pointwise`` is set.  Failure is returned,
    not raised, together with the first threshold no remaining index meets.
    """
    thresholds = [as_scalar(t) for t in schedule]
    if any(t <= 0 for t in thresholds):
        raise ContractViolation("schedule thresholds must be positive")
    if any(b >= a for a, b in zip(thresholds, thresholds[1:])):
        raise ContractViolation("schedule must be strictly decreasing")
    probe = pointwise_probe if pointwise else basic_diff_probe
    values = probe(spec, grid, exclude)
    chosen: list[int] = []
    chosen_vals: list[Fraction] = []
    pos = 0
    for j, t in enumerate(thresholds):
        while pos < len(values) and not values[pos] < t:
            pos += 1
        if pos == len(values):
            return SubsequenceResult(False, tuple(chosen), tuple(chosen_vals), t, j)
        chosen.append(spec.indices[pos])
        chosen_vals.append(values[pos])
        pos += 1
    return SubsequenceResult(True, tuple(chosen), tuple(chosen_vals))


def almost_basic_probe(spec: SequenceSpec, tol: ScalarLike) -> list[DistanceBracket]:
    tol = as_scalar(tol)
    if tol <= 0:
        raise ContractViolation("almost_basic_probe needs tol > 0")
    F = spec.limit_distribution
    return [almost_basic_distance(Fn, F, tol) for Fn in spec.distributions]


# -- report -----------------------------------------------------------------

def default_grid() -> list[Fraction]:
    """Odd multiples of 1/7 in ``(-4, 4)``.

    They avoid 0, every dyadic rational and every endpoint of a
    middle-thirds stage.
    """
    return [Fraction(2 * k + 1, 7) for k in range(-14, 14)]


def default_schedule(length: int) -> list[Fraction]:
    return [Fraction(1, j) for j in range(1, max(1, length // 4) + 1)]


@dataclass
class ReportConfig:
    radii: Sequence[Fraction] = (Fraction(1), Fraction(2))
    test_functions: Optional[Sequence[TestFunction]] = None
    tol: Fraction = Fraction(1, 10**6)
    d_threshold: Fraction = Fraction(1, 8)
    gap_threshold: Fraction = Fraction(1, 8)
    tail_fraction: Fraction = Fraction(1, 4)
    grid: Optional[Sequence[Fraction]] = None
    exclude: Sequence[Fraction] = ()
    schedule: Optional[Sequence[Fraction]] = None
    tight_eps: Fraction = Fraction(1, 2)
    tight_grid: Sequence[int] = range(0, 65)
    strict: bool = True

    @classmethod
    def for_family(cls, name: Union[str, FamilyId], **overrides) -> ReportConfig:
        """Defaults with the family's trend thresholds and, for Cantor stages, a staircase test."""
        prof = family(name)
        cfg = cls(d_threshold=prof.d_threshold, gap_threshold=prof.gap_threshold)
        for key, value in overrides.items():
            setattr(cfg, key, value)
        return cfg

    def resolved_test_functions(self, spec: SequenceSpec) -> list[TestFunction]:
        if self.test_functions is not None:
            return list(self.test_functions)
        phis = default_test_functions()
        if spec.family is FamilyId.CANTOR_STAGE:
            # Lipschitz tests cannot see the blow-up of these measures; the
            # Cantor staircase (exact at all atoms of the prefix) can.
            phis.append(cantor_staircase(max(spec.indices)))
        return phis


@dataclass(frozen=True)
class TraceRow:
    n: int
    d_bracket: DistanceBracket
    local_tv: dict[Fraction, Fraction]
    gaps: list[Fraction]
    total_tv: Fraction
    tight_r: Optional[int]


@dataclass
class ConvergenceReport:
    rows: list[TraceRow]
    vague: bool
    loose: bool
    weak: bool
    basic_subseq_found: bool
    almost_basic: bool
    consistent: bool
    evidence: dict[str, bool]
    notes: list[str] = field(default_factory=list)
    family: Optional[str] = None
    indices: tuple[int, int] = (0, 0)

    def verdicts(self) -> dict:
        return {
            "vague": self.vague,
            "loose": self.loose,
            "weak": self.weak,
            "basic_subseq_found": self.basic_subseq_found,
            "almost_basic": self.almost_basic,
            "consistent": self.consistent,
        }

    def to_json(self) -> dict:
        out = self.verdicts()
        out.update({
            "label": PREFIX_LABEL,
            "family": self.family,
            "n_range": list(self.indices),
            "evidence": dict(self.evidence),
            "notes": list(self.notes),
        })
        return out


def build_trace(spec: SequenceSpec, config: ReportConfig) -> list[TraceRow]:
    phis = config.resolved_test_functions(spec)
    brackets = almost_basic_probe(spec, config.tol)
    gaps = vague_gap_trace(spec, phis)
    local = local_tv_profile(spec, config.radii)
    total = uniform_tv_trace(spec)
    tight = tightness_profile(spec, config.tight_eps, config.tight_grid)
    rows = []
    for i, n in enumerate(spec.indices):
        rows.append(TraceRow(
            n=n,
            d_bracket=brackets[i],
            local_tv={r: prof.values[i] for r, prof in local.items()},
            gaps=gaps[n],
            total_tv=total.values[i],
            tight_r=tight.radii[i],
        ))
    return rows


def convergence_report(spec: SequenceSpec, config: Optional[ReportConfig] = None) -> ConvergenceReport:
    if config is None:
        config = ReportConfig.for_family(spec.family) if spec.family else ReportConfig()
    frac = config.tail_fraction
    rows = build_trace(spec, config)
    phis = config.resolved_test_functions(spec)
    grid = list(config.grid) if config.grid is not None else default_grid()
    schedule = list(config.schedule) if config.schedule is not None else default_schedule(len(spec))

    per_phi = [[row.gaps[j] for row in rows] for j in range(len(phis))]
    A = all(tail_decays(g, config.gap_threshold, frac) for g in per_phi)
    B = all(tail_is_bounded([row.local_tv[r] for row in rows], frac)
            for r in map(as_scalar, config.radii))
    C = tail_decays([row.d_bracket.hi for row in rows], config.d_threshold, frac)
    D = tail_is_bounded([row.total_tv for row in rows], frac)
    radii = [row.tight_r for row in rows]
    E = all(r is not None for r in radii) and tail_is_bounded(radii, frac)
    basic = subsequence_search(spec, grid, schedule, config.exclude)
    cdf_probe = subsequence_search(spec, grid, schedule, config.exclude, pointwise=True)

    consistent = A == (B and C)
    notes = [f"all verdicts are {PREFIX_LABEL} over n = {spec.indices[0]}..{spec.indices[-1]}"]
    if spec.family is not None:
        prof = family(spec.family)
        if prof.note:
            notes.append(prof.note)
    osc = _oscillating_points(spec, grid, config.exclude)
    if osc:
        notes.append(f"F_n(x) - F(x) keeps changing over the second half of the prefix "
                     f"at {len(osc)} of {len(_grid_points(grid, config.exclude))} grid points")
    if not B and C:
        notes.append("distribution functions converge almost basically but local variation "
                     "is unbounded, so the sequence does not converge vaguely")
    if not D and A:
        notes.append("vaguely convergent but not bounded in total variation: not loosely convergent")

    report = ConvergenceReport(
        rows=rows,
        vague=A,
        loose=A and D,
        weak=D and E and cdf_probe.found,
        basic_subseq_found=basic.found,
        almost_basic=C,
        consistent=consistent,
        evidence={"A_vague_gaps": A, "B_local_tv_bounded": B, "C_distance_decays": C,
                  "D_total_tv_bounded": D, "E_tight": E, "cdf_subsequence_found": cdf_probe.found},
        notes=notes,
        family=spec.family.value if spec.family else None,
        indices=(spec.indices[0], spec.indices[-1]),
    )
    if not consistent and config.strict:
        raise ConsistencyError(
            f"vague-gap verdict {A} disagrees with local-TV {B} and distance {C}", report
        )
    return report


def _oscillating_points(spec: SequenceSpec, grid: Iterable[ScalarLike],
                        exclude: Iterable[ScalarLike]) -> list[Fraction]:
    pts = _grid_points(grid, exclude)
    F = spec.limit_distribution
    half = spec.distributions[len(spec) // 2:]
    return [x for x in pts if len({Fn(x) - F(x) for Fn in half}) > 1]


# -- CSV ----------------------------------------------------------------------

def trace_csv(rows: Sequence[TraceRow], radii: Sequence[ScalarLike]) -> str:
    radii = [as_scalar(r) for r in radii]
    n_gaps = len(rows[0].gaps) if rows else 0
    header = (["n", "d_lo", "d_hi"] + [f"tv_r{format_scalar(r)}" for r in radii]
              + [f"gap_{j}" for j in range(n_gaps)] + ["total_tv", "tight_r"])
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(header)
    for row in rows:
        writer.writerow(
            [row.n, format_scalar(row.d_bracket.lo), format_scalar(row.d_bracket.hi)]
            + [format_scalar(row.local_tv[r]) for r in radii]
            + [format_scalar(g) for g in row.gaps]
            + [format_scalar(row.total_tv), "" if row.tight_r is None else row.tight_r]
        )
    return buf.getvalue()
