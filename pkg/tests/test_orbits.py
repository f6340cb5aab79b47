from fractions import Fraction

import pytest

from hyperconv.core.algebra import klein_action, reflection_action, sign_action, swap_action, zxn_reflection
from hyperconv.core.constructions import cp1, semigroup_descriptor
from hyperconv.core.elements import DoubleCosetLabel, OrbitLabel, QuotientLabel
from hyperconv.core.errors import NotCentral, NotCommutative, NotSubgroup
from hyperconv.core.hypergroup import Claim, Window, verify_axioms
from hyperconv.core.measure import FiniteMeasure, point_mass, push_forward
from hyperconv.core.orbits import (automorphism_orbit_hypergroup, coset_semiconvo, double_coset_hypergroup,
                                   orbit_semiconvo, orbit_to_nonneg, quotient_rule_table, ross_quotient,
                                   semigroup_orbit_semiconvo)

F = Fraction


@pytest.fixture
def sign_orbits():
    return automorphism_orbit_hypergroup(sign_action())


def test_sign_orbit_rule(sign_orbits):
    K = sign_orbits
    mu = K.convolve(K.project(2), K.project(3))
    assert mu == FiniteMeasure({OrbitLabel.of([1, -1]): F(1, 2), OrbitLabel.of([5, -5]): F(1, 2)})
    assert K.identity == OrbitLabel((0,))
    assert {Claim.HYPERGROUP, Claim.COMMUTATIVE, Claim.HERMITIAN} <= K.claims


def test_sign_orbits_are_cp1(sign_orbits):
    K = sign_orbits
    reference = cp1()
    for m in range(12):
        for n in range(12):
            pushed = push_forward(K.convolve(K.project(m), K.project(n)), orbit_to_nonneg)
            assert pushed == reference.convolve(m, n)


def test_orbit_window_and_axioms(sign_orbits):
    w = sign_orbits.window(5)
    assert [orbit_to_nonneg(X) for X in w] == [0, 1, 2, 3, 4]
    assert verify_axioms(sign_orbits, w).passed


def test_klein_orbits_form_a_hermitian_hypergroup():
    K = automorphism_orbit_hypergroup(klein_action())
    X = K.project((1, 2))
    assert len(X) == 4
    assert K.involution(X) == X
    assert Claim.HERMITIAN in K.claims
    assert verify_axioms(K, K.window(5)).passed


def test_orbit_contains_rejects_partial_labels(sign_orbits):
    assert sign_orbits.contains(OrbitLabel.of([3, -3]))
    assert not sign_orbits.contains(OrbitLabel.of([3]))


def test_affine_orbit_semiconvo():
    K = orbit_semiconvo(reflection_action(1))
    assert K.form == "affine"
    assert Claim.SEMICONVO_ONLY in K.claims
    zero = K.project(0)
    assert zero == OrbitLabel.of([0, 1])
    assert K.convolve(zero, zero) == FiniteMeasure({zero: F(3, 4), OrbitLabel.of([-1, 2]): F(1, 4)})


def test_two_sided_orbit_semiconvo_weights():
    K = orbit_semiconvo(sign_action())
    mu = K.convolve(K.project(1), K.project(1))
    assert mu == FiniteMeasure({OrbitLabel.of([0]): F(1, 2), OrbitLabel.of([2, -2]): F(1, 2)})


def test_swap_orbits_on_natural_pairs():
    K = semigroup_orbit_semiconvo(swap_action())
    mu = K.convolve(K.project((1, 2)), K.project((3, 0)))
    assert mu == FiniteMeasure({OrbitLabel.of([(2, 4), (4, 2)]): F(1, 2), OrbitLabel.of([(1, 5), (5, 1)]): F(1, 2)})
    assert K.form == "semigroup"


def test_zxn_reflection_orbits():
    K = semigroup_orbit_semiconvo(zxn_reflection())
    mu = K.convolve(K.project((1, 1)), K.project((2, 3)))
    assert mu == FiniteMeasure({OrbitLabel.of([(3, 3), (-3, 3)]): F(1, 2), OrbitLabel.of([(1, 3), (-1, 3)]): F(1, 2)})


def test_semigroup_orbits_refuse_automorphism_construction():
    with pytest.raises(NotSubgroup):
        automorphism_orbit_hypergroup(swap_action())


def test_double_cosets_of_s3(S3):
    H = [S3.identity, S3.element("(12)")]
    K = double_coset_hypergroup(S3, H)
    assert len(K.elements) == 2
    D = K.project(S3.element("(13)"))
    assert len(D) == 4
    assert isinstance(D, DoubleCosetLabel)
    assert K.convolve(D, D) == FiniteMeasure({K.identity: F(1, 2), D: F(1, 2)})
    assert {Claim.COMMUTATIVE, Claim.HERMITIAN} <= K.claims
    assert verify_axioms(K, K.window(2)).passed


def test_cosets_of_a_normal_subgroup(S3):
    A3 = [S3.identity, S3.element("(123)"), S3.element("(132)")]
    K = coset_semiconvo(S3, A3)
    assert len(K.elements) == 2
    odd = K.project(S3.element("(12)"))
    assert K.convolve(odd, odd) == point_mass(K.identity)
    assert Claim.COMMUTATIVE in K.claims


@pytest.mark.parametrize("names", [["(12)"], ["e", "(123)"]])
def test_invalid_subgroups(S3, names):
    with pytest.raises(NotSubgroup):
        double_coset_hypergroup(S3, [S3.element(n) for n in names])


def test_quotient_of_example_deformation(example_k):
    Q = ross_quotient(example_k, [0, 1], example_k.window(21))
    zero = Q.project(0)
    assert zero == QuotientLabel.of([0, 1])
    assert Q.identity == zero
    assert Q.project(1) == zero
    assert Q.project(5) == QuotientLabel((5,))
    two = Q.project(2)
    assert Q.convolve(two, two) == FiniteMeasure({zero: F(2, 3), two: F(1, 3)})
    assert Q.preimage([zero]) == {0, 1}
    assert Q.family == "quotient"


def test_quotient_table_is_point_mass_off_the_diagonal(example_k):
    Q = ross_quotient(example_k, [0, 1], example_k.window(21))
    labels = [Q.project(n) for n in range(2, 8)]
    table = quotient_rule_table(Q, labels)
    for (X, Y), mu in table.items():
        if X != Y:
            assert mu == point_mass(max(X, Y, key=lambda L: L.representative))


def test_trivial_subgroup_reproduces_the_parent():
    K = cp1()
    Q = ross_quotient(K, [0], Window.range(0, 8))
    mu = Q.convolve(Q.project(2), Q.project(3))
    assert mu == FiniteMeasure({QuotientLabel((1,)): F(1, 2), QuotientLabel((5,)): F(1, 2)})


def test_noncentral_subgroup_is_refused(example_k):
    with pytest.raises(NotCentral):
        ross_quotient(example_k, [0, 2], example_k.window(21))


def test_quotient_preconditions(example_k, S3):
    with pytest.raises(NotSubgroup):
        ross_quotient(example_k, [1], example_k.window(21))
    with pytest.raises(NotCommutative):
        ross_quotient(semigroup_descriptor(S3), [S3.identity], Window.of(S3.elements))
