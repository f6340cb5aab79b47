import json
import random
from fractions import Fraction

import pytest
from sympy.polys.densearith import dup_mul
from sympy.polys.domains import QQ

from hyperconv.cli import main
from hyperconv.core.constructions import cp1, cp2
from hyperconv.core.errors import NegativeLinearization, NormalizationError, ParamRange, RuleDomainError
from hyperconv.core.hypergroup import Window, check_bracketing, verify_axioms
from hyperconv.core.measure import FiniteMeasure
from hyperconv.core.polynomials import (cartier, chebyshev_t, chebyshev_u_normalized, constant_recurrence,
                                        expand_in_basis, from_qq, linearization_coefficients, polynomial_hypergroup,
                                        to_qq)
from hyperconv.specs import build

F = Fraction


def test_chebyshev_t_polynomials():
    polys = chebyshev_t().polynomials(3)
    assert polys[2] == [QQ(2), QQ(0), QQ(-1)]
    assert polys[3] == [QQ(4), QQ(0), QQ(-3), QQ(0)]


def test_rational_conversion():
    assert from_qq(to_qq("3/4")) == F(3, 4)
    assert from_qq(to_qq(F(-2, 6))) == F(-1, 3)


def test_expand_in_basis_is_triangular():
    basis = chebyshev_t().polynomials(2)
    assert expand_in_basis([QQ(1), QQ(0), QQ(0)], basis) == {0: F(1, 2), 2: F(1, 2)}
    # T_1 T_1 = x^2 = (T_0 + T_2)/2
    assert expand_in_basis(dup_mul(basis[1], basis[1], QQ), basis) == {0: F(1, 2), 2: F(1, 2)}
    assert expand_in_basis([], basis) == {}


@pytest.mark.parametrize("recurrence, closed_form", [(chebyshev_t, cp1), (chebyshev_u_normalized, cp2)])
def test_linearization_matches_closed_forms(recurrence, closed_form):
    n_max = 12
    K = polynomial_hypergroup(recurrence(), n_max)
    reference = closed_form()
    for m in range(n_max + 1):
        for n in range(n_max + 1):
            assert K.convolve(m, n) == reference.convolve(m, n), (m, n)


def test_cartier_tree_walk():
    g = linearization_coefficients(cartier(2), 3)
    assert g[(1, 1)] == {0: F(1, 3), 2: F(2, 3)}
    K = polynomial_hypergroup(cartier(2), 6)
    assert K.family == "polynomial"
    assert K.spec["q"] == "2"
    assert verify_axioms(K, K.window(3)).passed


def test_cartier_rejects_small_q():
    with pytest.raises(ParamRange):
        cartier(F(1, 2))


def test_negative_coefficient_is_rejected():
    rec = constant_recurrence(F(3, 4), F(-1, 2), F(3, 4))
    with pytest.raises(NegativeLinearization) as info:
        linearization_coefficients(rec, 2)
    assert (info.value.n, info.value.m, info.value.k) == (1, 1, 1)
    assert info.value.value == F(-1, 2)


def test_unnormalized_recurrence_is_rejected():
    with pytest.raises(NormalizationError) as info:
        constant_recurrence(F(1, 2), 0, F(1, 4)).polynomials(3)
    assert info.value.n == 2
    assert info.value.value == F(3, 2)


def test_polynomial_hypergroup_is_truncated():
    K = polynomial_hypergroup(chebyshev_t(), 4)
    assert K.convolve(1, 4) == FiniteMeasure({3: F(1, 2), 5: F(1, 2)})
    with pytest.raises(RuleDomainError):
        K.convolve(5, 0)
    assert list(K.window(100)) == [0, 1, 2]


def test_default_polynomial_spec_verifies_on_the_default_window():
    K = build({"builtin": "polynomial", "recurrence": "chebyshev_t"}).descriptor
    window = K.window(12)
    assert len(window) == 11
    report = verify_axioms(K, window)
    assert report.passed, report.to_dict()
    assert report.check("associativity").note is None


def test_bracketing_skips_sequences_leaving_the_table():
    K = polynomial_hypergroup(chebyshev_t(), 20)
    # folds of four or more terms from 8..10 leave the table
    report = check_bracketing(K, Window.range(8, 10), random.Random(0), trials=50)
    assert report.passed
    assert "leave the computed range" in report.checks[0].note


def test_verify_command_on_a_polynomial_hypergroup(capsys):
    assert main(["verify", "--inline", '{"builtin": "polynomial", "recurrence": "chebyshev_u"}']) == 0
    assert json.loads(capsys.readouterr().out)["axioms"]["passed"] is True
