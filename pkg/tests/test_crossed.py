import json
from fractions import Fraction

import numpy as np
import pytest

from bulkedge import crossed as cr
from bulkedge.crossed import (Cocycle, conditional_expectation,
                              from_json, generator, identity, position_commutator,
                              symbolically_equal, to_json, toeplitz_equal,
                              toeplitz_identity, toeplitz_isometry, toeplitz_lift,
                              toeplitz_projection, toeplitz_quotient)
from bulkedge.disorder import DisorderSpace
from bulkedge.errors import StructureError
from bulkedge.rep import grid_geometry, interior_mask, represent, represent_toeplitz

from conftest import IntSiteDiag, random_element


def test_untwisted_group_algebra():
    sp = DisorderSpace(kind="point", d=1)
    coc = Cocycle(d=1)
    s = generator(sp, coc, 1)
    s2 = s * s
    assert set(s2.terms) == {((2,), 0)}
    assert symbolically_equal(s2 * s, s * s2)


def test_flux_commutator_scalar():
    sp = DisorderSpace(kind="point", d=2)
    coc = Cocycle(d=2, flux=Fraction(1, 5))
    s1, s2 = generator(sp, coc, 1), generator(sp, coc, 2)
    lhs = s1 * s2
    rhs = s2 * s1
    # same support, phases differ by exactly one power of the flux unit
    assert set(n for n, _ in lhs.terms) == set(n for n, _ in rhs.terms) == {(1, 1)}
    (k_l,) = [k for _, k in lhs.terms]
    (k_r,) = [k for _, k in rhs.terms]
    assert (k_l - k_r) % 5 == 1
    # conjugation by the split generator twists the edge generator by one flux
    # unit: this is how the magnetic field enters the iterated crossed product
    twisted = s2 * s1 * s2.adjoint()
    assert set(twisted.terms) == {((1, 0), 4)}
    # while the cocycle itself stays trivial against the split axis
    assert coc.exponent((3, -2), (0, 1)) == 0


def test_star_product_matches_truncated_representation():
    sp = DisorderSpace(kind="iid", d=2, channels=1, count=2, seed=2, W=1.0)
    coc = Cocycle(d=2, flux=Fraction(1, 5))
    b = cr.from_coefficient(IntSiteDiag(1, 77), sp, coc)
    sn = generator(sp, coc, 1) * generator(sp, coc, 2)
    a = sn * b
    prod = a.adjoint() * a
    assert set(n for n, _ in prod.terms) == {(0, 0)}
    geom = grid_geometry((6, 6), "open", nu=1)
    om = sp.samples()[0]
    lhs = represent(prod, om, geom).matrix
    rhs = represent(a, om, geom).matrix.conj().T @ represent(a, om, geom).matrix
    inner = interior_mask(geom, 2)
    assert np.allclose(lhs[np.ix_(inner, inner)], rhs[np.ix_(inner, inner)], atol=1e-12)


def test_conditional_expectation_picks_zero_mode():
    sp = DisorderSpace(kind="point", d=2)
    coc = Cocycle(d=2)
    b = cr.constant([[2.0]], sp, coc)
    s = generator(sp, coc, 1)
    assert np.array_equal(conditional_expectation(b).matrices()[0], [[2.0]])
    assert np.array_equal(conditional_expectation(s * b).matrices()[0], [[0.0]])


def test_conditional_expectation_positivity(iid_space_2d):
    rng = np.random.default_rng(8)
    coc = Cocycle(d=2, flux=Fraction(1, 5))
    for _ in range(10):
        a = random_element(rng, iid_space_2d, coc, nu=2, max_terms=5)
        phi = conditional_expectation(a.adjoint() * a)
        for m in phi.matrices():
            assert np.min(np.linalg.eigvalsh(m)) > -1e-9


def test_cauchy_schwarz_bound(iid_space_2d):
    rng = np.random.default_rng(13)
    coc = Cocycle(d=2)
    geom = grid_geometry((6, 6), "open", nu=1)
    om = iid_space_2d.samples()[0]
    for _ in range(5):
        a = random_element(rng, iid_space_2d, coc, nu=1, max_terms=3, hop=1)
        b = random_element(rng, iid_space_2d, coc, nu=1, max_terms=3, hop=1)
        norm_a = np.linalg.norm(represent(a, om, geom).matrix, 2)
        lhs = conditional_expectation(b.adjoint() * (a.adjoint() * a) * b)
        rhs = conditional_expectation(b.adjoint() * b)
        for ml, mr in zip(lhs.matrices(), rhs.matrices()):
            bound = (norm_a ** 2) * mr + 1e-9 * np.eye(1)
            assert np.min(np.linalg.eigvalsh(bound - ml)) > -1e-7


def test_position_commutator():
    sp = DisorderSpace(kind="point", d=2)
    coc = Cocycle(d=2)
    b = cr.constant([[1.5]], sp, coc)
    s = generator(sp, coc, 1)
    a = (s * s * s) * b  # S^(3,0) b
    assert symbolically_equal(position_commutator(1, a), a.scale(3.0))
    assert position_commutator(1, b).is_zero()
    a21 = (s * s) * generator(sp, coc, 2) * b
    twice = position_commutator(1, position_commutator(1, a21))
    assert symbolically_equal(twice, a21.scale(4.0))
    with pytest.raises(StructureError):
        position_commutator(3, a)


def test_adjoint_antihomomorphism_exact(iid_space_2d):
    rng = np.random.default_rng(21)
    for flux in (Fraction(0), Fraction(1, 5)):
        coc = Cocycle(d=2, flux=flux)
        for _ in range(20):
            a = random_element(rng, iid_space_2d, coc, nu=2)
            b = random_element(rng, iid_space_2d, coc, nu=2)
            assert symbolically_equal((a * b).adjoint(), b.adjoint() * a.adjoint())
            assert symbolically_equal(a.adjoint().adjoint(), a)


def test_associativity_exact(iid_space_2d):
    rng = np.random.default_rng(22)
    for flux in (Fraction(0), Fraction(1, 5)):
        coc = Cocycle(d=2, flux=flux)
        for _ in range(20):
            a = random_element(rng, iid_space_2d, coc, nu=1)
            b = random_element(rng, iid_space_2d, coc, nu=1)
            c = random_element(rng, iid_space_2d, coc, nu=1)
            assert symbolically_equal((a * b) * c, a * (b * c))


def test_structure_mismatch_rejected():
    sp = DisorderSpace(kind="point", d=2)
    other = DisorderSpace(kind="point", d=2, channels=2)
    a = identity(sp, Cocycle(d=2))
    b = identity(sp, Cocycle(d=2, flux=Fraction(1, 3)))
    with pytest.raises(StructureError):
        a * b
    c = identity(other, Cocycle(d=2))
    with pytest.raises(StructureError):
        a * c
    # conjugation flips the flux sign, so a genuinely complex cocycle refuses
    with pytest.raises(StructureError):
        identity(sp, Cocycle(d=2, flux=Fraction(1, 5))).conjugate()
    identity(sp, Cocycle(d=2, flux=Fraction(1, 2))).conjugate()


# ---------------------------------------------------------------------------
# Toeplitz extension


def _toeplitz_setup(flux=Fraction(0)):
    sp = DisorderSpace(kind="iid", d=2, channels=1, count=2, seed=4, W=1.0)
    coc = Cocycle(d=2, flux=flux)
    V = toeplitz_isometry(sp, coc)
    one = toeplitz_identity(sp, coc)
    p = toeplitz_projection(sp, coc)
    return sp, coc, V, one, p


def test_isometry_relations_symbolic():
    _sp, _coc, V, one, p = _toeplitz_setup()
    assert toeplitz_equal(V.adjoint() * V, one)
    assert toeplitz_equal(V * V.adjoint(), one - p)
    assert toeplitz_equal(p * p, p)
    assert toeplitz_equal(p.adjoint(), p)
    # p annihilates the isometry from the correct sides
    assert not (p * V).unitary and not (p * V).corrections
    assert not (V.adjoint() * p).unitary and not (V.adjoint() * p).corrections


def test_isometry_relations_under_longer_words(iid_space_2d):
    rng = np.random.default_rng(31)
    sp, coc, V, one, p = _toeplitz_setup(flux=Fraction(1, 5))
    for _ in range(10):
        c1 = toeplitz_lift(random_element(rng, sp, coc, nu=1, max_terms=2, hop=1))
        # (V* V) c = c and (V V*) c = (1 - p) c for arbitrary lifted words
        assert toeplitz_equal(V.adjoint() * (V * c1), c1)
        assert toeplitz_equal(V * (V.adjoint() * c1), (one - p) * c1)


def test_quotient_of_lift_is_identity(iid_space_2d):
    rng = np.random.default_rng(32)
    sp = iid_space_2d
    for flux in (Fraction(0), Fraction(1, 5)):
        coc = Cocycle(d=2, flux=flux)
        for _ in range(10):
            a = random_element(rng, sp, coc, nu=2)
            assert symbolically_equal(toeplitz_quotient(toeplitz_lift(a)), a)


def test_quotient_kills_exactly_the_projection_ideal():
    sp, coc, V, one, p = _toeplitz_setup()
    sd = generator(sp, coc, 2)
    assert symbolically_equal(toeplitz_quotient(V), sd)
    q_p = toeplitz_quotient(p)
    assert q_p.pruned().is_zero()


def test_lift_product_defect_lies_in_ideal():
    sp, coc, V, one, p = _toeplitz_setup()
    c = cr.from_coefficient(IntSiteDiag(1, 5), sp, coc)
    cp = cr.from_coefficient(IntSiteDiag(1, 6), sp, coc)
    sd = generator(sp, coc, 2)
    lhs = toeplitz_lift(sd * c) * toeplitz_lift(sd.adjoint() * cp)
    rhs = toeplitz_lift((sd * c) * (sd.adjoint() * cp))
    defect = lhs - rhs
    assert defect.in_boundary_ideal()
    assert defect.corrections  # genuinely nonzero boundary part
    assert toeplitz_quotient(defect).pruned().is_zero()


def test_toeplitz_halfspace_representation_cross_check():
    sp, coc, V, one, p = _toeplitz_setup()
    om = sp.samples()[0]
    geom = grid_geometry((4, 8), "open", nu=1)  # depth 8 in the split axis
    c = cr.from_coefficient(IntSiteDiag(1, 5), sp, coc)
    t = (V * toeplitz_lift(c)) * (V.adjoint() * toeplitz_lift(c))
    M_sym = represent_toeplitz(t, om, geom).matrix
    MV = represent_toeplitz(V, om, geom).matrix
    Mc = represent(c, om, geom).matrix
    M_dir = (MV @ Mc) @ (MV.T @ Mc)
    # exact away from the far face of the strip, where the isometry is truncated
    far = np.repeat(geom.coords[:, -1] < 7, geom.nu)
    assert np.allclose(M_sym[np.ix_(far, far)], M_dir[np.ix_(far, far)], atol=1e-12)
    # the boundary projection is the bottom layer
    Mp = represent_toeplitz(p, om, geom).matrix
    assert np.array_equal(np.diag(Mp), np.repeat(geom.coords[:, -1] == 0, 1).astype(float))


def test_lift_requires_edge_coefficients():
    sp, coc, V, one, p = _toeplitz_setup()
    bad = generator(sp, coc, 2)
    from bulkedge.crossed import ToeplitzElement
    with pytest.raises(StructureError):
        ToeplitzElement({0: bad}, {}, one.proto)


def test_serialization_round_trip(iid_space_2d):
    rng = np.random.default_rng(77)
    coc = Cocycle(d=2, flux=Fraction(1, 5))
    a = random_element(rng, iid_space_2d, coc, nu=2)
    doc = json.loads(json.dumps(to_json(a)))
    b = from_json(doc, iid_space_2d)
    assert b.d == a.d and b.nu == a.nu and b.cocycle == a.cocycle
    for cfg in iid_space_2d.samples():
        for n in {n for n, _ in a.terms}:
            assert np.allclose(a.coefficient_at(n, cfg), b.coefficient_at(n, cfg),
                               atol=1e-15)


def test_serialized_clean_element_represents_everywhere():
    sp = DisorderSpace(kind="point", d=2)
    coc = Cocycle(d=2)
    a = generator(sp, coc, 1) * cr.constant([[2.0]], sp, coc)
    b = from_json(to_json(a), sp)
    geom = grid_geometry((5, 5), "open", nu=1)
    om = sp.samples()[0]
    assert np.allclose(represent(a, om, geom).matrix, represent(b, om, geom).matrix)
