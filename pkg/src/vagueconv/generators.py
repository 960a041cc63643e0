"""Named sequences of measures and distribution functions, indexed by ``n``.

All families converge (or fail to converge) to the zero measure; each one
isolates a gap between two of the convergence notions handled in
:mod:`vagueconv.diagnostics`.
"""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass
from fractions import Fraction
from typing import Callable, Optional, Union

from .errors import ContractViolation, DomainError
from .measure import SignedMeasure, TestFunction, cdf, from_cdf
from .stepfn import ScalarLike, StepFunction, as_scalar


class FamilyId(str, enum.Enum):
    ESCAPE_MASS = "escape_mass"
    TYPEWRITER = "typewriter"
    BLOWUP_DIPOLE = "blowup_dipole"
    SPREADING_TYPEWRITER = "spreading_typewriter"
    CANTOR_STAGE = "cantor_stage"
    SVC_STAGE = "svc_stage"
    ALTERNATING_DIRAC = "alternating_dirac"


def _require_positive(n: int, name: str) -> None:
    if not isinstance(n, int) or n < 1:
        raise ContractViolation(f"{name} needs an integer n >= 1, got {n!r}")


def _require_nonnegative(n: int, name: str) -> None:
    if not isinstance(n, int) or n < 0:
        raise ContractViolation(f"{name} needs an integer n >= 0, got {n!r}")


def dyadic_level(n: int) -> int:
    """``k`` with ``2**k <= n < 2**(k+1)``."""
    return n.bit_length() - 1


def typewriter_endpoints(n: int, stretch: bool = False) -> tuple[Fraction, Fraction]:
    k = dyadic_level(n)
    scale = k if stretch else 1
    a = Fraction(scale * (n - 2**k), 2**k)
    b = Fraction(scale * (n + 1 - 2**k), 2**k)
    return a, b


def escape_mass(n: int) -> SignedMeasure:
    """``n * delta_{-n}``: vague but not loose convergence to 0."""
    _require_positive(n, "escape_mass")
    return SignedMeasure.dirac(-n, n)


def typewriter(n: int) -> SignedMeasure:
    """``delta_{a_n} - delta_{b_n}`` with ``[a_n, b_n)`` sweeping ``[0, 1)`` at mesh ``2**-k_n``."""
    _require_positive(n, "typewriter")
    a, b = typewriter_endpoints(n)
    return SignedMeasure.from_atoms([(a, 1), (b, -1)])


def blowup_dipole(n: int) -> SignedMeasure:
    """``n**2 * (delta_0 - delta_{1/n})``."""
    _require_positive(n, "blowup_dipole")
    return SignedMeasure.from_atoms([(0, n * n), (Fraction(1, n), -n * n)])


def spreading_typewriter(n: int) -> SignedMeasure:
    """Typewriter dipole with endpoints stretched by ``k_n``; zero at ``n = 1``."""
    _require_positive(n, "spreading_typewriter")
    a, b = typewriter_endpoints(n, stretch=True)
    return SignedMeasure.from_atoms([(a, 1), (b, -1)])


def alternating_dirac(n: int) -> SignedMeasure:
    _require_positive(n, "alternating_dirac")
    return SignedMeasure.dirac(0 if n % 2 == 0 else 1)


def cantor_intervals(n: int) -> list[tuple[Fraction, Fraction]]:
    """The ``2**n`` intervals ``[a, b)`` of the n-th middle-thirds stage."""
    _require_nonnegative(n, "cantor_stage")
    ivs = [(Fraction(0), Fraction(1))]
    for _ in range(n):
        nxt = []
        for a, b in ivs:
            third = (b - a) / 3
            nxt += [(a, a + third), (b - third, b)]
        ivs = nxt
    return ivs


def cantor_stage(n: int) -> StepFunction:
    """Indicator of the n-th stage ``A_n`` (``A_0 = [0, 1)``); ``lambda(A_n) = (2/3)**n``."""
    return StepFunction.indicator_of_union(cantor_intervals(n))


def svc_intervals(n: int) -> list[tuple[Fraction, Fraction]]:
    """Endpoints of the ``2**n`` intervals of the n-th Smith-Volterra-Cantor stage.

    Stage ``m`` removes a middle interval of length ``4**-m`` from each
    interval of stage ``m - 1``.
    """
    _require_nonnegative(n, "svc_stage")
    ivs = [(Fraction(0), Fraction(1))]
    for m in range(1, n + 1):
        half_gap = Fraction(1, 2 * 4**m)
        nxt = []
        for a, b in ivs:
            mid = (a + b) / 2
            nxt += [(a, mid - half_gap), (mid + half_gap, b)]
        ivs = nxt
    return ivs


def svc_stage(n: int) -> StepFunction:
    """Indicator of the n-th Smith-Volterra-Cantor stage ``S_n``.

    The stages are unions of left-open intervals ``(a, b]``; the returned
    right-continuous function uses ``[a, b)`` instead, which differs only on
    the finitely many endpoints.  ``lambda(S_n) = 1/2 + 2**(-n-1)``.
    """
    return StepFunction.indicator_of_union(svc_intervals(n))


def cantor_staircase(level: int) -> TestFunction:
    """Compactly supported test function matching the Cantor function at stage endpoints.

    Piecewise linear through ``(l_i, i/2**level)`` and ``(r_i, (i+1)/2**level)``
    for the stage-``level`` intervals ``[l_i, r_i)``, then back down to 0 on
    ``[1, 2]``.  It agrees with the (non-Lipschitz) Cantor function at every
    atom of ``from_cdf(cantor_stage(n))`` for ``n <= level``, so
    ``integrate(from_cdf(cantor_stage(n)), phi) == -1`` for all those ``n``.
    """
    ivs = cantor_intervals(level)
    q = Fraction(1, 2**level)
    pts: list[tuple[Fraction, Fraction]] = []
    for i, (a, b) in enumerate(ivs):
        pts += [(a, i * q), (b, (i + 1) * q)]
    pts.append((Fraction(2), Fraction(0)))
    return TestFunction.from_points(pts)


def example_ramp() -> TestFunction:
    """Compactly supported ``phi`` with ``phi(x) = x`` on ``[0, 1]`` and support ``[-1, 2]``."""
    return TestFunction.from_points([(-1, 0), (0, 0), (1, 1), (2, 0)])


def default_test_functions() -> list[TestFunction]:
    """Unit hats of width 1 centred at the integers of ``[-4, 4]``, plus :func:`example_ramp`."""
    hats = [TestFunction.hat(k, Fraction(1, 2)) for k in range(-4, 5)]
    return hats + [example_ramp()]


def dense_approximant(f: StepFunction, delta: ScalarLike) -> StepFunction:
    """Dyadic step function within distance ``delta`` of ``f``.

    Breakpoints are floored to a dyadic mesh no coarser than
    ``delta / (4 (m + 1))`` (``m`` = number of breakpoints) and values to a
    dyadic quantum no coarser than ``delta / 8``.  Functions already on those
    grids come back unchanged.
    """
    delta = as_scalar(delta)
    if delta <= 0:
        raise ContractViolation("dense_approximant needs delta > 0")
    if not f.in_W:
        raise DomainError("dense_approximant needs a function with left tail 0")
    m = len(f.breakpoints)
    mesh = _dyadic_floor(delta / (4 * (m + 1)))
    quantum = _dyadic_floor(delta / 8)

    def snap(x: Fraction, step: Fraction) -> Fraction:
        return math.floor(x / step) * step

    bps: list[Fraction] = []
    vals: list[Fraction] = [Fraction(0)]
    for x, v in zip(f.breakpoints, f.values[1:]):
        sx, sv = snap(x, mesh), snap(v, quantum)
        if bps and bps[-1] == sx:
            # collision: the piece in between has vanished
            vals[-1] = sv
        else:
            bps.append(sx)
            vals.append(sv)
    return StepFunction(tuple(bps), tuple(vals))


def _dyadic_floor(x: Fraction) -> Fraction:
    """Largest ``2**-j`` (``j >= 0``) not exceeding ``x``; ``x`` must be positive."""
    step = Fraction(1)
    while step > x:
        step /= 2
    return step


# -- registry -------------------------------------------------------------

Generated = Union[SignedMeasure, StepFunction]


@dataclass(frozen=True)
class FamilyProfile:
    """Static facts about a family used by the CLI and the convergence report.

    ``d_closed_form`` maps ``n`` to the exact distance from the limit when it
    is rational, ``None`` when irrational or unknown.  The thresholds are the
    trend thresholds for the report; see :mod:`vagueconv.diagnostics`.
    """

    family: FamilyId
    generator: Callable[[int], Generated]
    n_min: int
    default_range: tuple[int, int]
    limit: SignedMeasure
    d_threshold: Fraction = Fraction(1, 8)
    gap_threshold: Fraction = Fraction(1, 8)
    note: str = ""
    d_closed_form: Optional[Callable[[int], Fraction]] = None

    def measure(self, n: int) -> SignedMeasure:
        out = self.generator(n)
        if isinstance(out, StepFunction):
            return from_cdf(out)
        return out

    def distribution(self, n: int) -> StepFunction:
        out = self.generator(n)
        if isinstance(out, SignedMeasure):
            return cdf(out)
        return out


# Default ranges are chosen so that, over the last quarter of the prefix, the
# closed-form distances and Lipschitz gap envelopes of the convergent families
# fall below 1/8 (typewriter 2**-5, blowup 1/16, escape ~1/16, cantor (2/3)**7,
# spreading 7/128 with slope-2 hats giving gaps <= 7/64), while the divergent
# ones sit at distance 1/2 with some gap of at least 1/2.
PROFILES: dict[FamilyId, FamilyProfile] = {
    FamilyId.ESCAPE_MASS: FamilyProfile(
        FamilyId.ESCAPE_MASS, escape_mass, 1, (1, 20), SignedMeasure.zero(),
        note="mass escapes to -infinity: locally bounded but not bounded in total variation",
    ),
    FamilyId.TYPEWRITER: FamilyProfile(
        FamilyId.TYPEWRITER, typewriter, 1, (1, 64), SignedMeasure.zero(),
        d_closed_form=lambda n: Fraction(1, 2 ** dyadic_level(n)) if n >= 2 else Fraction(1, 2),
    ),
    FamilyId.BLOWUP_DIPOLE: FamilyProfile(
        FamilyId.BLOWUP_DIPOLE, blowup_dipole, 1, (1, 20), SignedMeasure.zero(),
        note="distribution functions converge but local total variation grows like 2 n**2",
        d_closed_form=lambda n: Fraction(1, n) if n >= 2 else Fraction(1, 2),
    ),
    FamilyId.SPREADING_TYPEWRITER: FamilyProfile(
        FamilyId.SPREADING_TYPEWRITER, spreading_typewriter, 1, (1, 256), SignedMeasure.zero(),
        note=("the sequence has mass at every point (limsup |mu_n|((x, y)) = 2 for x < y), "
              "so pointwise-convergence criteria for distribution functions do not apply"),
    ),
    FamilyId.CANTOR_STAGE: FamilyProfile(
        FamilyId.CANTOR_STAGE, cantor_stage, 0, (0, 8), SignedMeasure.zero(),
        note="indicators of middle-thirds stages: almost basic limit 0, pointwise limit 1 on the Cantor set",
        d_closed_form=lambda n: Fraction(2, 3) ** n if n >= 2 else Fraction(1, 2),
    ),
    FamilyId.SVC_STAGE: FamilyProfile(
        FamilyId.SVC_STAGE, svc_stage, 0, (0, 10), SignedMeasure.zero(),
        note="Cauchy for the almost basic metric with no limit among distribution functions",
        d_closed_form=lambda n: Fraction(1, 2),
    ),
    FamilyId.ALTERNATING_DIRAC: FamilyProfile(
        FamilyId.ALTERNATING_DIRAC, alternating_dirac, 1, (1, 20), SignedMeasure.zero(),
        note="bounded in variation, but even and odd subsequences have different limits",
        d_closed_form=lambda n: Fraction(1, 2),
    ),
}


def family(name: Union[str, FamilyId]) -> FamilyProfile:
    try:
        return PROFILES[FamilyId(name)]
    except ValueError:
        known = ", ".join(f.value for f in FamilyId)
        raise ContractViolation(f"unknown family {name!r}; known families: {known}") from None


def generate(name: Union[str, FamilyId], n: int) -> Generated:
    prof = family(name)
    return prof.generator(n)
