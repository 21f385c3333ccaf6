import math

import numpy as np
import pytest
from hypothesis import given, strategies as st

from nevanlinna.model import (AtomicMeasure, DeltaSubharmonicFn, LogPotentialFn, MeromorphicSpec,
                              canonicalize, evaluate, integrated_count, jordan_decomposition,
                              ln_modulus, radial_count)

from conftest import approx, identity_map, log_abs, reciprocal_map

coord = st.floats(-3, 3, allow_nan=False)
mass = st.floats(0.5, 3.0)
atoms = st.lists(st.tuples(st.builds(complex, coord, coord), mass), min_size=1, max_size=8)


# radial and integrated counts ---------------------------------------------

def test_radial_count_empty_closed_disc():
    assert radial_count(AtomicMeasure([(0.5, 1)]), 0.4) == 0


def test_radial_count_counts_boundary_atom():
    assert radial_count(AtomicMeasure([(0.5, 1)]), 0.5) == 1


def test_radial_count_hand_enumeration():
    nu = AtomicMeasure([(0, 2), (1 + 1j, 3)])
    assert radial_count(nu, 1.0) == 2


def test_integrated_count_atom_at_origin():
    assert integrated_count(AtomicMeasure([(0, 1)]), 1, 2) == approx(math.log(2))


def test_integrated_count_inner_atom_uses_r():
    assert integrated_count(AtomicMeasure([(0.5, 1)]), 1, 2) == approx(math.log(2))


def test_integrated_count_equal_radii_is_zero():
    assert integrated_count(AtomicMeasure([(0.3, 2), (2j, 1)]), 1.5, 1.5) == 0.0


@given(atoms, st.floats(0.05, 1.0), st.floats(1.0, 2.0), st.floats(2.0, 4.0))
def test_counts_monotone_and_additive(a, r, s, R):
    nu = AtomicMeasure(a)
    assert radial_count(nu, r) <= radial_count(nu, s) <= radial_count(nu, R)
    whole = integrated_count(nu, r, R)
    parts = integrated_count(nu, r, s) + integrated_count(nu, s, R)
    assert whole == pytest.approx(parts, rel=1e-12, abs=1e-12)


# measures ------------------------------------------------------------------

def test_identical_locations_merge_exactly():
    nu = AtomicMeasure([(0.5, 1), (0.5, 2), (0.5 + 1e-16j, 1)])
    assert len(nu) == 2
    assert nu.total_variation == 4


def test_zero_mass_rejected():
    with pytest.raises(ValueError):
        AtomicMeasure([(0, 0.0)])


def test_positive_measure_rejects_negative_mass():
    with pytest.raises(ValueError):
        AtomicMeasure([(0, -1.0)])


def test_jordan_decomposition_is_disjoint():
    charge = AtomicMeasure([(0, 2), (1, -3), (0, -1)], positive=False)
    jd = jordan_decomposition(charge)
    assert set(jd.upper.locations.tolist()).isdisjoint(jd.lower.locations.tolist())
    assert jd.upper.total_variation + jd.lower.total_variation == charge.total_variation


# canonical form ------------------------------------------------------------

def test_canonicalize_nets_mass():
    a = 0.3 + 0.2j
    U = DeltaSubharmonicFn(log_abs(a, 3), log_abs(a, 1))
    C = canonicalize(U)
    assert C.plus.riesz == AtomicMeasure([(a, 2)])
    assert len(C.minus.riesz) == 0


def test_canonicalize_idempotent():
    U = DeltaSubharmonicFn(log_abs(1j, 2), log_abs(-1, 1))
    assert canonicalize(U) == U
    assert canonicalize(canonicalize(U)) == canonicalize(U)


def test_canonicalize_cancels_equal_masses(rng):
    U = DeltaSubharmonicFn(LogPotentialFn(0.5, (0, 1), AtomicMeasure([(1j, 2), (2, 1)])),
                           log_abs(1j, 2))
    C = canonicalize(U)
    assert 1j not in C.plus.riesz.locations.tolist() + C.minus.riesz.locations.tolist()
    z = rng.uniform(-2, 2, 3) + 1j * rng.uniform(-2, 2, 3)
    np.testing.assert_allclose(C(z), U(z), rtol=1e-12, atol=1e-12)


@given(atoms, atoms)
def test_canonicalize_preserves_values(a, b):
    U = DeltaSubharmonicFn(LogPotentialFn(0.0, (), AtomicMeasure(a)),
                           LogPotentialFn(0.0, (), AtomicMeasure(b)))
    C = canonicalize(U)
    assert C.is_canonical
    z = np.random.default_rng(0).uniform(-3, 3, 100) + 1j * np.random.default_rng(1).uniform(-3, 3, 100)
    np.testing.assert_allclose(C(z), U(z), rtol=1e-12, atol=1e-11)


# ln|F| ---------------------------------------------------------------------

def test_ln_modulus_identity_map():
    assert evaluate(ln_modulus(identity_map()), 2.0) == approx(math.log(2))


def test_ln_modulus_reciprocal():
    U = ln_modulus(reciprocal_map())
    assert U.minus.riesz == AtomicMeasure([(0, 1)])
    for r in (0.5, 2.0):
        z = r * np.exp(1j * np.linspace(0, 6, 7))
        np.testing.assert_allclose(U(z), -math.log(r), atol=1e-14)


def test_ln_modulus_exponential():
    U = ln_modulus(MeromorphicSpec(exp_poly=(0, 1)))
    assert len(U.plus.riesz) == 0 and len(U.minus.riesz) == 0
    z = np.array([1.5 - 2j, -0.3 + 1j])
    np.testing.assert_allclose(U(z), z.real, atol=1e-14)


def test_ln_modulus_matches_direct_product(rng):
    F = MeromorphicSpec(AtomicMeasure([(0.5, 2), (1j, 1)]), AtomicMeasure([(-1, 1)]),
                        (0.1, 0.3 - 0.2j, 0.05j), 2.0 - 1.0j)
    z = rng.uniform(-2, 2, 200) + 1j * rng.uniform(-2, 2, 200)
    direct = np.log(np.abs(F(z)))
    np.testing.assert_allclose(ln_modulus(F)(z), direct, rtol=1e-10, atol=1e-12)


def test_evaluate_at_atom_is_infinite():
    u = log_abs(0)
    assert evaluate(u, math.e) == approx(1.0)
    assert evaluate(u, 0.0) == -math.inf
    assert evaluate(ln_modulus(reciprocal_map()), 0.0) == math.inf


def test_meromorphic_rejects_shared_location():
    with pytest.raises(ValueError):
        MeromorphicSpec(AtomicMeasure([(1, 1)]), AtomicMeasure([(1, 1)]))


def test_meromorphic_rejects_fractional_multiplicity():
    with pytest.raises(ValueError):
        MeromorphicSpec(AtomicMeasure([(1, 1.5)]))
