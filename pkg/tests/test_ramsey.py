from fractions import Fraction

import pytest

from hyperconv.core.algebra import nonneg_integers, sign_action
from hyperconv.core.constructions import DeformationWeights, max_deformation
from hyperconv.core.errors import ParamRange, PreconditionViolated, SpecError
from hyperconv.core.hypergroup import Window
from hyperconv.core.measure import FiniteMeasure
from hyperconv.core.orbits import automorphism_orbit_hypergroup
from hyperconv.core.ramsey import (Closed, Coloring, Criterion, EscapesWindow, Verdict, check_criterion, class_masses,
                                   fs_fp_set, index_sets, inspect_substructure, search_sequence, sfc,
                                   subalgebra_closure, triangular_block)

F = Fraction


@pytest.fixture
def powers_of_two():
    """δ_m*δ_n = δ_max(m,n) off the diagonal, so δ_F sits at the largest chosen term"""
    return max_deformation(DeformationWeights.geometric(2), 20)


def test_index_sets_order():
    assert index_sets(3, 2) == [(1,), (2,), (3,), (1, 2), (1, 3), (2, 3)]
    assert len(index_sets(4, 10)) == 15


def test_fs_fp_set_sums():
    S = nonneg_integers()
    assert fs_fp_set(S, [1, 2, 4], 3) == {1, 2, 3, 4, 5, 6, 7}
    assert fs_fp_set(S, [1, 2, 4], 1) == {1, 2, 4}
    with pytest.raises(ParamRange):
        fs_fp_set(S, [1], 0)


def test_sfc_family(CP1):
    family = sfc(CP1, [1, 2], 2)
    assert [entry.F for entry in family] == [(1,), (2,), (1, 2)]
    assert family[2].measure == FiniteMeasure({1: F(1, 2), 3: F(1, 2)})
    assert family[2].support == frozenset({1, 3})


def test_sfc_composes_in_index_order(CP2):
    family = {entry.F: entry.measure for entry in sfc(CP2, [1, 2, 3], 3)}
    assert family[(1, 2, 3)] == CP2.convolve_sequence([1, 2, 3])


@pytest.mark.parametrize("n, block", [(0, 0), (1, 1), (2, 2), (3, 2), (4, 3), (6, 3), (7, 4), (10, 4), (11, 5)])
def test_triangular_blocks(n, block):
    assert triangular_block(n) == block


def test_triangular_coloring_alternates():
    coloring = Coloring.triangular_two()
    assert [coloring.classify(n) for n in range(11)] == [1, 2, 1, 1, 2, 2, 2, 1, 1, 1, 1]


def test_residue_colorings():
    assert Coloring.mod_k(3).classify(7) == 2
    assert Coloring.mod_4k(1).r == 4
    with pytest.raises(SpecError):
        Coloring.mod_k(2).classify((1, 2))
    with pytest.raises(ParamRange):
        Coloring.mod_k(0)


def test_pullback_colors_labels():
    K = automorphism_orbit_hypergroup(sign_action())
    coloring = Coloring.mod_k(2).pullback(lambda X: abs(X.representative))
    assert coloring.classify(K.project(-3)) == 2
    assert coloring.describe()["of"]["kind"] == "mod_k"


def test_table_coloring_and_class_masses():
    coloring = Coloring.table({1: 1, 2: 1, 3: 2}, default=2)
    assert coloring.r == 2
    assert coloring.classify(40) == 2
    mu = FiniteMeasure({1: F(1, 2), 3: F(1, 2)})
    assert class_masses(mu, coloring) == {1: F(1, 2), 2: F(1, 2)}
    with pytest.raises(SpecError):
        Coloring.table({1: 1}).classify(5)


def test_mono_criterion_refuted(CP1):
    coloring = Coloring.table({1: 1, 2: 1, 3: 2}, default=2)
    report = check_criterion(CP1, [1, 2], coloring, 2, Criterion.mono())
    assert report.verdict is Verdict.REFUTED
    assert report.refuting == (1, 2)


def test_alpha_mass_criterion(CP1):
    coloring = Coloring.table({1: 1, 2: 1, 3: 2}, default=2)
    report = check_criterion(CP1, [1, 2], coloring, 2, Criterion.alpha_mass("1/3"))
    assert report.verdict is Verdict.WITNESS
    assert report.color == 1
    strict = check_criterion(CP1, [1, 2], coloring, 2, Criterion.alpha_mass("1/2"))
    assert strict.verdict is Verdict.REFUTED
    with pytest.raises(ParamRange):
        Criterion.alpha_mass(1)


def test_almost_criterion_ignores_early_index_sets(powers_of_two):
    coloring = Coloring.mod_k(2)
    mono = check_criterion(powers_of_two, [1, 2, 4], coloring, 3, Criterion.mono())
    assert mono.verdict is Verdict.REFUTED
    assert mono.refuting == (2,)
    almost = check_criterion(powers_of_two, [1, 2, 4], coloring, 3, Criterion.almost(2))
    assert almost.verdict is Verdict.WITNESS
    assert almost.color == 1
    assert [row.exempt for row in almost.rows][:3] == [True, True, False]


def test_sequence_preconditions(CP1):
    with pytest.raises(PreconditionViolated):
        check_criterion(CP1, [1, 1], Coloring.mod_k(2), 2, Criterion.mono())
    with pytest.raises(PreconditionViolated):
        check_criterion(CP1, [0, 1], Coloring.mod_k(2), 2, Criterion.mono())


def test_cp2_mod3_pairs_are_exhausted(CP2):
    report = search_sequence(CP2, Coloring.mod_k(3), 2, CP2.window(13), Criterion.mono())
    assert report.verdict is Verdict.EXHAUSTED
    assert report.sequence is None
    assert report.nodes["visited"] > 12


def test_search_finds_first_witness(powers_of_two):
    report = search_sequence(powers_of_two, Coloring.mod_k(2), 4, powers_of_two.window(13), Criterion.mono())
    assert report.verdict is Verdict.WITNESS
    assert report.sequence == (1, 3, 5, 7)
    assert report.color == 2
    assert report.nodes == {"visited": 10, "pruned": 6}
    assert all(len(row.support) == 1 for row in report.rows)


def test_single_class_always_has_a_witness(CP1):
    report = search_sequence(CP1, Coloring.mod_k(1), 3, CP1.window(8), Criterion.mono())
    assert report.sequence == (1, 2, 3)
    assert report.color == 1


@pytest.mark.parametrize("depth", [2, 3])
def test_threaded_search_is_deterministic(CP2, depth):
    window = CP2.window(9)
    single = search_sequence(CP2, Coloring.mod_k(3), depth, window, Criterion.mono())
    pooled = search_sequence(CP2, Coloring.mod_k(3), depth, window, Criterion.mono(), threads=4)
    assert single.verdict is pooled.verdict is Verdict.EXHAUSTED
    assert single.to_dict() == pooled.to_dict()


def test_threaded_witness_matches_sequential(powers_of_two):
    window = powers_of_two.window(13)
    single = search_sequence(powers_of_two, Coloring.mod_k(3), 3, window, Criterion.mono())
    pooled = search_sequence(powers_of_two, Coloring.mod_k(3), 3, window, Criterion.mono(), threads=3)
    assert single.to_dict() == pooled.to_dict()
    assert single.sequence == (1, 4, 7)


def test_search_argument_ranges(CP1):
    with pytest.raises(ParamRange):
        search_sequence(CP1, Coloring.mod_k(2), 0, CP1.window(5), Criterion.mono())
    with pytest.raises(ParamRange):
        search_sequence(CP1, Coloring.mod_k(2), 2, CP1.window(5), Criterion.mono(), threads=0)


def test_report_renderings(powers_of_two):
    report = search_sequence(powers_of_two, Coloring.mod_k(2), 2, powers_of_two.window(6), Criterion.mono())
    data = report.to_dict()
    assert data["verdict"] == "witness"
    assert data["window_relative"] is True
    assert data["rows"][2] == {"F": [1, 2], "support": [3], "masses": {"2": "1/1"}, "exempt": False}
    assert "| {1,2} | {3} | C2: 1/1 |" in report.markdown()
    assert report.csv_rows()[0] == "F;support;class;mass_num;mass_den"
    assert report.csv_rows()[3] == "{1,2};{3};2;1;1"


def test_closure_escapes_or_truncates(CP1):
    window = Window.range(0, 20)
    escaped = subalgebra_closure(CP1, [2], window)
    assert isinstance(escaped, EscapesWindow)
    assert escaped.element % 2 == 0 and escaped.element > 20
    truncated = subalgebra_closure(CP1, [2], window, truncate=True)
    assert isinstance(truncated, Closed)
    assert truncated.elements == tuple(range(0, 21, 2))
    assert truncated.truncated
    assert truncated.additive_closed is True


def test_closure_inside_the_center(example_k):
    closed = subalgebra_closure(example_k, [2, 3], example_k.window(21))
    assert closed == Closed((0, 1, 2, 3), None, False)


def test_substructure_distribution(example_k):
    report = inspect_substructure(example_k, [2, 3], example_k.window(21), Coloring.mod_k(2))
    assert report.distribution == {1: 2, 2: 2}
    assert not report.monochromatic
    assert report.to_dict()["closure"]["elements"] == [0, 1, 2, 3]


def test_point_mass_sequences_share_one_class(CP2):
    report = check_criterion(CP2, [2, 4], Coloring.mod_k(2), 2, Criterion.mono())
    assert report.verdict is Verdict.WITNESS
    assert report.color == 1
    assert report.rows[0].masses == {1: F(1), 2: F(0)}


def test_closure_of_a_generator_fills_a_large_window(CP1):
    truncated = subalgebra_closure(CP1, [1], Window.range(0, 120), truncate=True)
    assert truncated.elements == tuple(range(121))
    assert truncated.truncated
