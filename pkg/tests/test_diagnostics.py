from fractions import Fraction as F

import pytest

from vagueconv.diagnostics import (
    PREFIX_LABEL,
    ReportConfig,
    SequenceSpec,
    almost_basic_probe,
    basic_diff_probe,
    build_trace,
    convergence_report,
    default_grid,
    local_tv_profile,
    subsequence_search,
    tail_decays,
    tail_is_bounded,
    tightness_profile,
    trace_csv,
    uniform_tv_trace,
    vague_gap_trace,
)
from vagueconv.errors import ConsistencyError, ContractViolation
from vagueconv.generators import FamilyId, dyadic_level, example_ramp, family, svc_stage
from vagueconv.measure import SignedMeasure, TestFunction, from_cdf
from vagueconv.metric import best_shift

TOL = F(1, 10**6)
zero_seq = SequenceSpec.explicit([SignedMeasure.zero()] * 6, SignedMeasure.zero())


def fam(name, lo, hi):
    return SequenceSpec.from_family(name, lo, hi)


class TestTrendRules:
    def test_decays(self):
        assert tail_decays([F(1), F(1, 2), F(1, 10), F(1, 20)], F(1, 8))
        assert not tail_decays([F(0), F(0), F(0), F(1)], F(1, 8))

    def test_bounded(self):
        assert tail_is_bounded([5, 1, 2, 3])
        assert not tail_is_bounded([1, 2, 3, 4])
        assert tail_is_bounded([7])


class TestSequenceSpec:
    def test_bad_range(self):
        with pytest.raises(ContractViolation):
            SequenceSpec.from_family("typewriter", 5, 4)

    def test_empty_explicit(self):
        with pytest.raises(ContractViolation):
            SequenceSpec.explicit([], SignedMeasure.zero())


class TestVagueGaps:
    def test_escape_vanishes_once_outside(self):
        phi = TestFunction.from_points([(-3, 0), (-1, 2), (1, -1), (3, 0)])
        gaps = vague_gap_trace(fam("escape_mass", 1, 10), [phi])
        assert all(gaps[n] == [0] for n in range(3, 11))
        assert gaps[2] != [0]

    def test_blowup_magnitude(self):
        gaps = vague_gap_trace(fam("blowup_dipole", 1, 10), [example_ramp()])
        assert all(gaps[n] == [n] for n in range(1, 11))

    def test_typewriter_lipschitz_bound(self):
        phis = [TestFunction.hat(F(1, 3), F(1, 2), 2), example_ramp(),
                TestFunction.from_points([(-1, 0), (F(1, 7), 3), (F(5, 7), -1), (2, 0)])]
        gaps = vague_gap_trace(fam("typewriter", 1, 64), phis)
        for n, row in gaps.items():
            for phi, gap in zip(phis, row):
                assert gap <= phi.lipschitz_constant() * F(1, 2 ** dyadic_level(n))

    def test_non_compact_rejected(self):
        with pytest.raises(ContractViolation):
            vague_gap_trace(zero_seq, [TestFunction.constant(1)])


class TestVariation:
    def test_escape_radius_five(self):
        prof = local_tv_profile(fam("escape_mass", 1, 20), [5])[F(5)]
        assert prof.values == tuple(F(n) if n <= 5 else F(0) for n in range(1, 21))
        assert prof.running_sup[-1] == 5

    def test_blowup_unbounded(self):
        prof = local_tv_profile(fam("blowup_dipole", 1, 10), [1])[F(1)]
        assert prof.values == tuple(F(2 * n * n) for n in range(1, 11))
        assert not prof.bounded

    def test_alternating_constant(self):
        prof = local_tv_profile(fam("alternating_dirac", 1, 10), [2])[F(2)]
        assert set(prof.values) == {1} and prof.bounded

    def test_radius_positive(self):
        with pytest.raises(ContractViolation):
            local_tv_profile(zero_seq, [0])

    def test_uniform(self):
        assert set(uniform_tv_trace(fam("typewriter", 1, 64)).values) == {2}
        esc = uniform_tv_trace(fam("escape_mass", 1, 10))
        assert esc.values == tuple(F(n) for n in range(1, 11)) and not esc.bounded
        assert set(uniform_tv_trace(zero_seq).values) == {0}


class TestTightness:
    def test_typewriter(self):
        prof = tightness_profile(fam("typewriter", 1, 64), F(1, 2))
        assert set(prof.radii) == {1} and prof.tight

    def test_escape(self):
        prof = tightness_profile(fam("escape_mass", 1, 10), F(1, 2))
        assert prof.radii == tuple(range(1, 11)) and not prof.tight

    def test_zero(self):
        assert set(tightness_profile(zero_seq, F(1, 2)).radii) == {0}

    def test_eps_positive(self):
        with pytest.raises(ContractViolation):
            tightness_profile(zero_seq, 0)


class TestBasicDiff:
    def test_escape_integer_grid(self):
        vals = basic_diff_probe(fam("escape_mass", 1, 10), range(-5, 6))
        assert all(v == 0 for v in vals[4:])
        assert vals[0] != 0

    def test_typewriter_oscillates(self):
        vals = basic_diff_probe(fam("typewriter", 1, 64), [F(1, 8), F(3, 8), F(5, 8), F(7, 8)])
        assert set(vals) == {0, 1}
        assert set(vals[32:]) == {0, 1}

    def test_alternating_parity(self):
        spec = SequenceSpec.from_family("alternating_dirac", 1, 10, limit=SignedMeasure.dirac(0))
        vals = basic_diff_probe(spec, [F(-1, 2), F(1, 2), F(3, 2)])
        assert vals == [F(1) if n % 2 else F(0) for n in range(1, 11)]

    def test_exclusion(self):
        spec = fam("typewriter", 1, 1)
        assert basic_diff_probe(spec, [F(1, 2), F(2)]) == [1]
        assert basic_diff_probe(spec, [F(1, 2), F(2)], exclude=[F(1, 2)]) == [0]


class TestSubsequence:
    def test_typewriter_succeeds(self):
        spec = fam("typewriter", 1, 256)
        grid = default_grid()
        schedule = [F(1, j) for j in range(1, 9)]
        res = subsequence_search(spec, grid, schedule)
        assert res.found and len(res.indices) == 8
        assert list(res.indices) == sorted(res.indices)
        # re-verify each selected term directly
        for j, n in enumerate(res.indices):
            Fn = spec.distributions[spec.indices.index(n)]
            diffs = [Fn(x) for x in grid]
            assert max(diffs) - min(diffs) < schedule[j]
            assert res.values[j] < schedule[j]

    def test_alternating_fails(self):
        res = subsequence_search(fam("alternating_dirac", 1, 20), [F(-1, 2), F(1, 2), F(3, 2)],
                                 [F(1), F(1, 2)])
        assert not res.found and res.failed_threshold == 1 and res.failed_position == 0

    def test_constant_sequence(self):
        mu = SignedMeasure.from_atoms([(0, 1), (2, -3)])
        spec = SequenceSpec.explicit([mu] * 5, mu)
        res = subsequence_search(spec, default_grid(), [F(1, j) for j in range(1, 6)])
        assert res.found and res.indices == (1, 2, 3, 4, 5)

    @pytest.mark.parametrize("schedule", [[F(1), F(1)], [F(1, 2), F(1)], [F(0)]])
    def test_bad_schedule(self, schedule):
        with pytest.raises(ContractViolation):
            subsequence_search(zero_seq, [0], schedule)


class TestAlmostBasic:
    def test_blowup(self):
        for n, b in zip(range(2, 21), almost_basic_probe(fam("blowup_dipole", 2, 20), TOL)):
            assert b.contains(F(1, n))

    def test_typewriter(self):
        for n, b in zip(range(2, 65), almost_basic_probe(fam("typewriter", 2, 64), TOL)):
            assert b.contains(F(1, 2 ** dyadic_level(n)))

    def test_svc_explicit_pairs(self):
        m = 9
        spec = SequenceSpec.explicit([from_cdf(svc_stage(n)) for n in range(1, m)], from_cdf(svc_stage(m)))
        for n, b in zip(range(1, m), almost_basic_probe(spec, TOL)):
            assert b.contains(F(1, 2 ** (n + 1)) - F(1, 2 ** (m + 1)))

    def test_bad_tol(self):
        with pytest.raises(ContractViolation):
            almost_basic_probe(zero_seq, 0)


@pytest.fixture(scope="module")
def reports():
    return {fid: convergence_report(SequenceSpec.from_family(fid, *family(fid).default_range)) for fid in FamilyId}


class TestReport:
    def test_blowup(self, reports):
        r = reports[FamilyId.BLOWUP_DIPOLE]
        assert r.evidence["C_distance_decays"] and not r.evidence["B_local_tv_bounded"]
        assert not r.vague and r.almost_basic and r.consistent

    def test_escape(self, reports):
        r = reports[FamilyId.ESCAPE_MASS]
        assert r.evidence["A_vague_gaps"] and r.evidence["B_local_tv_bounded"] and r.evidence["C_distance_decays"]
        assert not r.evidence["D_total_tv_bounded"]
        assert r.vague and not r.loose

    def test_spreading_notes_pointwise_failure(self, reports):
        r = reports[FamilyId.SPREADING_TYPEWRITER]
        assert r.vague and r.evidence["B_local_tv_bounded"] and r.almost_basic and not r.weak
        assert any("keeps changing" in note for note in r.notes)

    def test_labelled_as_prefix_evidence(self, reports):
        for r in reports.values():
            assert r.to_json()["label"] == PREFIX_LABEL

    def test_bounded_local_variation_families(self, reports):
        for fid in (FamilyId.TYPEWRITER, FamilyId.ALTERNATING_DIRAC, FamilyId.SPREADING_TYPEWRITER):
            r = reports[fid]
            assert r.evidence["B_local_tv_bounded"]
            assert r.almost_basic == r.vague

    def test_loose_is_vague_and_bounded(self, reports):
        for r in reports.values():
            assert r.loose == (r.vague and r.evidence["D_total_tv_bounded"])

    def test_shift_violation_fades_when_distance_decays(self, reports):
        for fid, r in reports.items():
            if not r.almost_basic:
                continue
            spec = SequenceSpec.from_family(fid, *family(fid).default_range)
            F0 = spec.limit_distribution
            for radius in (1, 2):
                viol = [best_shift(Fn, F0, F(1, 8), -radius, radius)[1] for Fn in spec.distributions]
                assert tail_decays(viol, F(1, 8)), fid

    def test_inconsistency_raises(self):
        cfg = ReportConfig.for_family("typewriter", d_threshold=F(0))
        with pytest.raises(ConsistencyError) as info:
            convergence_report(fam("typewriter", 1, 32), cfg)
        assert info.value.report is not None and not info.value.report.consistent

    def test_non_strict_returns_report(self):
        cfg = ReportConfig.for_family("typewriter", d_threshold=F(0), strict=False)
        assert not convergence_report(fam("typewriter", 1, 32), cfg).consistent


class TestCsv:
    def test_columns(self):
        spec = fam("typewriter", 1, 4)
        cfg = ReportConfig(radii=[F(1), F(5, 2)])
        text = trace_csv(build_trace(spec, cfg), cfg.radii)
        lines = text.splitlines()
        assert lines[0] == "n,d_lo,d_hi,tv_r1,tv_r5/2," + ",".join(f"gap_{j}" for j in range(10)) + ",total_tv,tight_r"
        assert len(lines) == 5
        assert lines[1].startswith("1,")
