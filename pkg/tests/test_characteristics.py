import math

import numpy as np
import pytest
from hypothesis import given, strategies as st

from nevanlinna import characteristics as ch
from nevanlinna.characteristics import RadiiTriple, ValueWithError
from nevanlinna.errors import AtomOnCircle
from nevanlinna.model import (AtomicMeasure, DeltaSubharmonicFn, LogPotentialFn, MeromorphicSpec,
                              canonicalize, integrated_count)
from nevanlinna.oracle import mc_circle_average

from conftest import approx, exp_map, identity_map, inv_abs, log_abs, reciprocal_map


def close(v: ValueWithError, x, floor=1e-9):
    assert abs(v.value - x) <= v.error + floor, (v, x)


# sup on circles ----------------------------------------------------------

def test_sup_of_radial_function():
    close(ch.circle_sup(log_abs(0), math.e), 1.0)


def test_sup_of_shifted_log_at_opposite_point():
    close(ch.circle_sup(log_abs(1), 1.0), math.log(2))


def test_sup_of_real_part():
    close(ch.circle_sup(LogPotentialFn(0.0, (0, 1)), 3.0), 3.0)


def test_sup_certified_upper_bound_dominates_dense_grid(rng):
    u = LogPotentialFn(0.2, (0, 0.3 + 0.1j), AtomicMeasure([(0.7, 2), (-0.4j, 1), (1.5, 3)]))
    for r in (0.5, 1.0, 1.9):
        s = ch.circle_sup(u, r)
        dense = u(r * np.exp(1j * np.linspace(0, 2 * math.pi, 200001)))
        assert s.value <= dense.max() + 1e-12 or s.value <= s.value + s.error
        assert dense.max() <= s.value + s.error + 1e-12


# averages ----------------------------------------------------------------

def test_circle_average_radial():
    close(ch.circle_average(log_abs(0), 2.0), math.log(2), 1e-12)


def test_circle_average_mean_value_inside():
    close(ch.circle_average(log_abs(1), 0.5), 0.0, 1e-12)


def test_circle_average_outside_atom():
    close(ch.circle_average(log_abs(1), 2.0), math.log(2), 1e-12)


def test_circle_average_plus_nonpositive_function():
    close(ch.circle_average_plus(log_abs(0), 0.8), 0.0, 1e-12)


def test_circle_average_plus_reciprocal():
    close(ch.circle_average_plus(inv_abs(), 0.5), math.log(2))


def test_circle_average_plus_against_monte_carlo():
    v = ch.circle_average_plus(log_abs(1), 2.0)
    est = mc_circle_average(log_abs(1), 2.0, 10**7, seed=5, mode="plus")
    assert est.covers(v.value, slack=v.error)


def test_two_radius_average():
    close(ch.two_radius_average(log_abs(0), 1.0, math.e), 1.0, 1e-12)
    close(ch.two_radius_average(log_abs(1), 0.5, 0.9), 0.0, 1e-12)
    close(ch.two_radius_average(log_abs(0.3j, 2), 1.1, 1.1), 0.0, 0.0)


def test_disc_average_closed_forms():
    close(ch.disc_average(log_abs(0), 1.0), -0.5, 1e-12)
    close(ch.disc_average(log_abs(0), 2.0), math.log(2) - 0.5, 1e-12)
    close(ch.disc_average(log_abs(2), 1.0), math.log(2), 1e-12)
    close(ch.disc_average(LogPotentialFn(1.7), 0.6), 1.7, 1e-12)


def test_disc_average_plus_examples():
    close(ch.disc_average_plus(log_abs(0), 1.0), 0.0, 1e-6)
    close(ch.disc_average_plus(inv_abs(), 1.0), 0.5, 1e-6)
    close(ch.disc_average_plus(DeltaSubharmonicFn(LogPotentialFn(0.0, (0, 1))), 1.0),
          2 / (3 * math.pi), 1e-6)


# characteristic T --------------------------------------------------------

def test_T_of_reciprocal_inside_unit_disc():
    close(ch.diff_nevanlinna_T(inv_abs(), 0.2, 0.8), 0.0)


def test_T_of_reciprocal_across_unit_circle():
    close(ch.diff_nevanlinna_T(inv_abs(), 1.0 + 1e-6, math.e), 1.0 - 1e-6, 1e-8)


def test_T_of_constant():
    close(ch.diff_nevanlinna_T(DeltaSubharmonicFn(LogPotentialFn(2.5)), 0.3, 1.7), 0.0)


def test_atom_on_circle_is_nudged_or_reported():
    with pytest.raises(AtomOnCircle):
        ch.check_circle(log_abs(0.5).potential, 0.5)
    r = ch.nudge_radius(log_abs(0.5), 0.5)
    assert r > 0.5 and abs(r - 0.5) < 1e-7


@pytest.mark.parametrize("seed", range(6))
def test_two_definitions_of_T_agree(seed):
    rng = np.random.default_rng(seed)
    plus = AtomicMeasure.from_arrays(2 * rng.uniform(-1, 1, 4) + 2j * rng.uniform(-1, 1, 4),
                                     rng.uniform(1, 3, 4))
    minus = AtomicMeasure.from_arrays(2 * rng.uniform(-1, 1, 3) + 2j * rng.uniform(-1, 1, 3),
                                      rng.uniform(1, 3, 3))
    U = canonicalize(DeltaSubharmonicFn(LogPotentialFn(0.3, (), plus), LogPotentialFn(-0.2, (), minus)))
    a = ch.diff_nevanlinna_T(U, 0.4, 1.7)
    b = ch.diff_nevanlinna_T_sup(U, 0.4, 1.7)
    assert abs(a.value - b.value) <= a.error + b.error + 1e-9


def test_T_increasing_and_convex_in_log_radius():
    U = canonicalize(DeltaSubharmonicFn(LogPotentialFn(0.1, (0, 0.2), AtomicMeasure([(0.5, 1), (1.5j, 2)])),
                                        LogPotentialFn(0.0, (), AtomicMeasure([(-0.8, 1), (1 + 1j, 1)]))))
    radii = np.exp(np.linspace(math.log(0.55), math.log(3.0), 9))
    vals = [ch.diff_nevanlinna_T(U, 0.3, R) for R in radii]
    err = max(v.error for v in vals) + 1e-9
    for a, b in zip(vals, vals[1:]):
        assert b.value >= a.value - 2 * err
    y = np.array([v.value for v in vals])
    assert np.all(y[:-2] + y[2:] - 2 * y[1:-1] >= -4 * err)


# ordering properties -----------------------------------------------------

atom_list = st.lists(st.tuples(st.builds(complex, st.floats(-3, 3), st.floats(-3, 3)),
                               st.floats(1, 3)), min_size=1, max_size=6)


@given(atom_list, st.floats(0.1, 2.5))
def test_sub_mean_value_ordering(a, r):
    v = LogPotentialFn(0.0, (), AtomicMeasure(a))
    try:
        c = ch.circle_average(v, r)
    except AtomOnCircle:
        return
    b = ch.disc_average(v, r)
    assert b.value <= c.value + b.error + c.error + 1e-12


@given(atom_list, st.floats(0.1, 2.5))
def test_jensen_identity_property(a, r):
    v = LogPotentialFn(0.4, (0, 0.1j), AtomicMeasure(a))
    R = r * 1.7
    lhs = ch.two_radius_average(v, r, R)
    rhs = integrated_count(v.riesz, r, R)
    assert abs(lhs.value - rhs) <= 1e-10 * max(1.0, abs(rhs))


@given(atom_list, st.floats(0.2, 2.5))
def test_ln_plus_dominates_ln(a, r):
    U = DeltaSubharmonicFn(LogPotentialFn(0.1, (), AtomicMeasure(a)))
    try:
        plus = ch.circle_average_plus(U, r)
        plain = ch.circle_average(U.plus, r)
    except AtomOnCircle:
        return
    assert plus.value >= max(0.0, plain.value) - plus.error - plain.error - 1e-12


# classical characteristics -----------------------------------------------

def test_classical_identity_map():
    rec = ch.classical_characteristics(identity_map(), 2.0, 1.0)
    close(rec.m, math.log(2))
    close(rec.N_diff, 0.0, 0.0)
    close(rec.lnM, math.log(2))


def test_classical_reciprocal_T():
    rec = ch.classical_characteristics(reciprocal_map(), math.e, 1.0 + 1e-9)
    close(rec.T_diff, 1.0, 1e-8)


def test_classical_constant():
    rec = ch.classical_characteristics(MeromorphicSpec(scale=5.0), 1.3, 0.4)
    close(rec.m, math.log(5))
    close(rec.T_diff, 0.0)


def test_m2_proximity_examples():
    close(ch.m2_disc_proximity(identity_map(), 1.0), 0.0, 1e-6)
    close(ch.m2_disc_proximity(reciprocal_map(), 1.0), 0.5, 1e-6)
    close(ch.m2_disc_proximity(MeromorphicSpec(scale=0.7), 1.0), 0.0, 1e-12)
    both = ch.m2_disc_proximity(exp_map(), 1.0) + ch.m2_disc_proximity(exp_map().reciprocal(), 1.0)
    close(both, 4 / (3 * math.pi), 1e-6)


def test_radii_triple_validation():
    with pytest.raises(ValueError, match="k must exceed 1"):
        RadiiTriple(0.1, 1.0, 1.0)
    with pytest.raises(ValueError):
        RadiiTriple(1.0, 0.5, 2.0)
