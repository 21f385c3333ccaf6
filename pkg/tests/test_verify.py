import math

import numpy as np
import pytest

from nevanlinna import verify as vf
from nevanlinna.characteristics import RadiiTriple, ValueWithError
from nevanlinna.errors import EntireRequired, SetOutsideBound
from nevanlinna.model import AtomicMeasure, DeltaSubharmonicFn, LogPotentialFn, MeromorphicSpec
from nevanlinna.planarsets import RaySet, annulus, disc

from conftest import exp_map, identity_map, inv_abs, log_abs, reciprocal_map

STD = RadiiTriple(0.1, 1.0, 2.0)
ONE_F = MeromorphicSpec()


def vwe(v, e=0.0):
    return ValueWithError(v, e)


# verdict policy ------------------------------------------------------------

def test_inequality_verdicts():
    assert vf.inequality_verdict(vwe(1, 0.1), vwe(2, 0.1)) == "PASS"
    assert vf.inequality_verdict(vwe(1.95, 0.1), vwe(2, 0.1)) == "PASS_WITHIN_ERROR"
    assert vf.inequality_verdict(vwe(2.5, 0.1), vwe(2, 0.1)) == "FAIL"


def test_known_nonnegative_rhs_floor():
    assert vf.inequality_verdict(vwe(0.0), vwe(0.0, 1e-14)) == "PASS_WITHIN_ERROR"
    assert vf.inequality_verdict(vwe(0.0), vwe(0.0, 1e-14), rhs_floor=0.0) == "PASS"


def test_equality_verdict_floor():
    assert vf.equality_verdict(vwe(1.0), vwe(1.0 + 1e-12)) == "PASS"
    assert vf.equality_verdict(vwe(1.0, 1e-3), vwe(1.0005)) == "PASS"
    assert vf.equality_verdict(vwe(1.0), vwe(1.01)) == "FAIL"


# closed-form verifiers -----------------------------------------------------

def test_jensen_log_at_origin():
    rep = vf.verify_jensen(log_abs(0), 1.0, math.e)
    assert rep.verdict == "PASS"
    assert rep.lhs.value == pytest.approx(1.0, rel=1e-12)
    assert rep.rhs.value == pytest.approx(1.0, rel=1e-12)


def test_jensen_no_mass_in_annulus():
    rep = vf.verify_jensen(log_abs(1), 0.5, 0.9)
    assert rep.verdict == "PASS"
    assert abs(rep.lhs.value) < 1e-12 and abs(rep.rhs.value) < 1e-12


def test_jensen_ten_random_atoms(rng):
    nu = AtomicMeasure.from_arrays(3 * rng.random(10) * np.exp(2j * math.pi * rng.random(10)),
                                   rng.uniform(1, 3, 10))
    rep = vf.verify_jensen(LogPotentialFn(0.3, (0, 1j), nu), 0.4, 2.2)
    assert rep.verdict == "PASS"
    assert abs(rep.lhs.value - rep.rhs.value) <= 1e-10 * max(1.0, abs(rep.rhs.value))


def test_lemma2_single_atom():
    rep = vf.verify_lemma2(AtomicMeasure([(0.5, 1)]), 1.0, 2.0)
    assert rep.verdict == "PASS"
    assert rep.lhs.value == 1.0
    assert rep.rhs.value == pytest.approx(2 * math.log(2), rel=1e-12)


def test_lemma2_empty_measure():
    rep = vf.verify_lemma2(AtomicMeasure(), 0.5, 1.0)
    assert rep.verdict == "PASS" and rep.lhs.value == 0 and rep.rhs.value == 0


# planar verifiers ------------------------------------------------------------

def test_kernel_bound_unit_disc():
    rep = vf.verify_kernel_bound(disc(1.0), 0.0, 1.0)
    assert rep.verdict == "PASS"
    assert rep.lhs.value == pytest.approx(math.pi * (math.log(2) + 0.5), abs=1e-3)
    assert rep.rhs.value == pytest.approx(0.5 * math.pi * math.log(100 / math.pi), abs=1e-3)
    assert rep.slack == pytest.approx(1.69, abs=1e-2)
    assert rep.details["side_condition"]
    assert rep.details["log_factor"] == pytest.approx(math.log(100 / math.pi), abs=1e-4)


def test_kernel_bound_tiny_set():
    rep = vf.verify_kernel_bound(disc(0.01, 0.5), 0.3, 1.0)
    assert rep.verdict == "PASS"
    assert rep.details["log_factor"] > 9


def test_theorem2_T_trivial_function():
    rep = vf.verify_theorem2_T(ln_one(), disc(1.0), STD)
    assert rep.verdict == "PASS"
    assert rep.lhs.value == 0 and rep.rhs.value == 0 and rep.slack == 0


def ln_one():
    return DeltaSubharmonicFn()


def test_theorem2_T_analytic_instance():
    rep = vf.verify_theorem2_T(inv_abs(), disc(1.0), STD)
    assert rep.verdict == "PASS"
    assert rep.lhs.value == pytest.approx(math.pi / 2, abs=1e-3)
    # T_U(0.1, 2) = ln 2 and C_{U^+}(0.1) = ln 10
    assert rep.terms["T"].value == pytest.approx(math.log(2), abs=1e-9)
    assert rep.terms["C_plus_r0"].value == pytest.approx(math.log(10), abs=1e-9)
    expected = 4 * math.log(20) * math.pi * math.log(200 / math.pi)
    assert rep.rhs.value == pytest.approx(expected, rel=1e-3)
    assert rep.slack > 100


def test_theorem2_M_constant():
    c = 2.0
    rep = vf.verify_theorem2_M(LogPotentialFn(c), disc(1.0), STD)
    assert rep.verdict == "PASS"
    assert rep.lhs.value == pytest.approx(c * math.pi, rel=1e-3)
    assert rep.rhs.value == pytest.approx(6 * c * math.pi * math.log(200 / math.pi), rel=1e-3)


def test_theorem2_M_log():
    rep = vf.verify_theorem2_M(log_abs(0), disc(1.0), RadiiTriple(0.5, 1.0, 2.0))
    assert rep.verdict == "PASS"
    assert rep.lhs.value == pytest.approx(math.pi / 2, abs=1e-3)
    expected = 6 * 2 * math.log(2) * math.pi * math.log(200 / math.pi)
    assert rep.rhs.value == pytest.approx(expected, rel=1e-3)


def test_theorem2_rejects_set_beyond_r():
    with pytest.raises(SetOutsideBound):
        vf.verify_theorem2_T(inv_abs(), disc(1.0, 0, 1.5), RadiiTriple(0.1, 1.2, 2.0))


def test_forced_failure_with_zero_constant():
    rep = vf.verify_theorem2_T(inv_abs(), disc(1.0), STD, rhs_constant=0.0)
    assert rep.verdict == "FAIL"


def test_disc_constants():
    assert vf.disc_constant(2.0, "T") == pytest.approx(14 * math.log(2 * math.e), abs=1e-12)
    assert vf.disc_constant(2.0, "M") == pytest.approx(22 * math.log(2 * math.e), abs=1e-12)
    assert vf.disc_constant(2.0, "T") == pytest.approx(23.70, abs=5e-3)


def test_corollary_disc_trivial():
    rep = vf.verify_corollary_disc(ln_one(), STD, "T")
    assert rep.verdict == "PASS" and rep.lhs.value == 0 and rep.rhs.value == 0


def test_corollary_disc_reciprocal():
    rep = vf.verify_corollary_disc(inv_abs(), STD, "T")
    assert rep.verdict == "PASS"
    assert rep.lhs.value == pytest.approx(0.5, abs=1e-6)
    assert rep.rhs.value == pytest.approx(14 * math.log(2 * math.e) * math.log(20), rel=1e-9)


def test_meromorphic_planar_trivial():
    reps = vf.verify_meromorphic_planar(ONE_F, disc(1.0), STD)
    assert [r.name for r in reps] == ["meromorphic_T", "meromorphic_M", "meromorphic_F",
                                      "meromorphic_f"]
    assert all(r.verdict == "PASS" and r.lhs.value == 0 for r in reps)


def test_meromorphic_planar_matches_potential_form():
    mero = vf.verify_meromorphic_planar(reciprocal_map(), disc(1.0), STD, parts=("T",))[0]
    pot = vf.verify_theorem2_T(inv_abs(), disc(1.0), STD)
    assert mero.lhs.value == pytest.approx(pot.lhs.value, abs=1e-12)
    assert abs(mero.rhs.value - pot.rhs.value) <= mero.rhs.error + pot.rhs.error + 1e-9


def test_meromorphic_planar_exponential_f_part():
    rep = vf.verify_meromorphic_planar(exp_map(), disc(1.0), RadiiTriple(0.5, 1.0, 2.0),
                                       parts=("f",))[0]
    assert rep.verdict == "PASS"
    assert rep.lhs.value == pytest.approx(4 / (3 * math.pi), abs=1e-5)


def test_entire_parts_need_entire_function():
    with pytest.raises(EntireRequired):
        vf.verify_meromorphic_planar(reciprocal_map(), disc(1.0), STD, parts=("M",))


# bracket identities ---------------------------------------------------------

def test_bracket_reciprocal():
    rep = vf.verify_bracket_identities(reciprocal_map(), 1.0, math.e)[0]
    assert rep.verdict == "PASS"
    assert rep.lhs.value == pytest.approx(1.0, abs=1e-9)
    assert rep.rhs.value == pytest.approx(1.0, abs=1e-9)


def test_bracket_identity_map():
    reps = vf.verify_bracket_identities(identity_map(), 0.5, 2.0)
    assert [r.verdict for r in reps] == ["PASS", "PASS"]


@pytest.mark.parametrize("c", [0.5, 3.0])
def test_bracket_constant(c):
    tt, mm = vf.verify_bracket_identities(MeromorphicSpec(scale=c), 0.3, 1.5)
    assert tt.verdict == mm.verdict == "PASS"
    assert tt.lhs.value == pytest.approx(max(math.log(c), 0.0), abs=1e-12)
    # the entire form adds m(r0, 1/c) = ln^+(1/c)
    assert mm.lhs.value == pytest.approx(abs(math.log(c)), abs=1e-12)


# ray verifiers --------------------------------------------------------------

def test_ray_with_nonpositive_function():
    reps = vf.verify_theorem1_ray(DeltaSubharmonicFn(LogPotentialFn(-1.0)),
                                  RaySet([(0.2, 0.9, (1,))], 2), STD)
    assert reps[0].lhs.value == 0 and reps[0].verdict == "PASS"


def test_ray_log_on_one_to_e():
    radii = RadiiTriple(0.5, math.e, 2.0)
    rep = vf.verify_theorem1_ray(log_abs(0), RaySet([(1.0, math.e, (1,))]), radii, parts=("T",))[0]
    assert rep.verdict == "PASS"
    assert rep.lhs.value == pytest.approx(1.0, abs=1e-9)


def test_remark_constant():
    assert vf.remark_constant(2.0) == pytest.approx(8 * math.log(8), rel=1e-14)
    assert vf.remark_constant(2.0) == pytest.approx(16.636, abs=1e-3)


def test_remark_identity_map():
    rep = vf.verify_nevanlinna_remark(identity_map(), RadiiTriple(0.5, 1.0, 2.0))
    assert rep.verdict == "PASS"
    assert rep.lhs.value == pytest.approx(0.0, abs=1e-12)


def test_remark_reciprocal():
    rep = vf.verify_nevanlinna_remark(reciprocal_map(), STD)
    assert rep.verdict == "PASS"
    # (1/r) int_0^1 ln^+(1/t) dt = 1
    assert rep.lhs.value == pytest.approx(1.0, abs=1e-9)
    assert rep.rhs.value == pytest.approx(8 * math.log(8) * math.log(20), rel=1e-12)


def test_specialization_consistency():
    F = MeromorphicSpec(AtomicMeasure([(0.4 + 0.3j, 1)]), AtomicMeasure([(-0.2, 2)]), (0, 0.5))
    rep = vf.verify_specialization(F, RadiiTriple(0.3, 1.0, 2.0))
    assert rep.verdict == "PASS"
    assert abs(rep.lhs.value - rep.rhs.value) <= rep.lhs.error + rep.rhs.error + 1e-10


# lemmas -------------------------------------------------------------------

def test_lemma1_zero_function():
    rep = vf.verify_lemma1(ln_one(), disc(0.5), 0.5, 1.0)
    assert rep.verdict == "PASS" and rep.lhs.value == 0


def test_lemma1_reciprocal():
    rep = vf.verify_lemma1(inv_abs(), disc(0.5), 0.5, 1.0)
    assert rep.verdict == "PASS"
    # int_{D(0.5)} ln(1/|z|) = pi/4 (ln 2 + 1/2)
    assert rep.lhs.value == pytest.approx(math.pi / 4 * (math.log(2) + 0.5), abs=1e-4)
    assert rep.terms["minus_mass"].value == 1.0


def test_lemma3_zero_and_reciprocal():
    assert vf.verify_lemma3(ln_one(), disc(0.5), 0.5, 1.0).verdict == "PASS"
    rep = vf.verify_lemma3(inv_abs(), disc(0.5), 0.5, math.sqrt(2) - 1)
    assert rep.verdict == "PASS"


def test_lemma3_substitution_reciprocal():
    rep = vf.verify_lemma3_substitution(inv_abs(), annulus(0.2, 0.9, 1.0), STD)
    assert rep.verdict in ("PASS", "PASS_WITHIN_ERROR", "FAIL")
    assert rep.lhs.value > 0 and rep.rhs.value > 0


# scale covariance -----------------------------------------------------------

@pytest.mark.parametrize("c", [0.5, 3.0])
def test_scale_covariance(c):
    U = DeltaSubharmonicFn(LogPotentialFn(0.2, (), AtomicMeasure([(0.3j, 1), (1.2, 2)])),
                           LogPotentialFn(0.0, (), AtomicMeasure([(-0.4, 1)])))
    E = disc(0.6, 0.1, 0.8)
    radii = RadiiTriple(0.25, 0.8, 2.0)
    a = vf.verify_theorem2_T(U, E, radii)
    b = vf.verify_theorem2_T(U.scaled(c), E, radii)
    assert b.lhs.value == pytest.approx(c * a.lhs.value, rel=1e-10, abs=1e-12)
    assert b.terms["T"].value == pytest.approx(c * a.terms["T"].value, rel=1e-8, abs=1e-10)
    assert b.terms["C_plus_r0"].value == pytest.approx(c * a.terms["C_plus_r0"].value,
                                                       rel=1e-8, abs=1e-10)
    assert (a.slack > 0) == (b.slack > 0)


def test_report_dict_has_fields():
    d = vf.verify_lemma2(AtomicMeasure([(0.5, 1)]), 1.0, 2.0, seed=7).as_dict()
    for key in ("name", "lhs", "lhs_err", "rhs", "rhs_err", "slack", "verdict", "seed", "inputs"):
        assert key in d
    assert d["seed"] == 7
