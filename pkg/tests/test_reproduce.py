from fractions import Fraction

import pytest

from hyperconv.core.constructions import cp1, dunkl_ramirez
from hyperconv.core.errors import LiftMissing, ParamRange, PreconditionViolated
from hyperconv.core.algebra import sign_action
from hyperconv.core.orbits import automorphism_orbit_hypergroup
from hyperconv.core.reproduce import (REPRODUCERS, alpha_instances, almost_ramsey_refutation, example_quotient,
                                      linearization_match, orbit_equivalence, orbit_mass_bound,
                                      quotient_pushforward_identity, recurrent_pool, recurrent_witness,
                                      reproduce_almost_ramsey, reproduce_cp2_alpha, reproduce_orbit_bound,
                                      reproduce_pushforward, reproduce_quotient_table, reproduce_recurrent,
                                      run_reproducer, verify_cp2_alpha, verify_cp2_mod3)
from hyperconv.core.ramsey import Coloring

F = Fraction


def test_cp2_mod3_obstruction():
    report = verify_cp2_mod3(window_max=30, search_window=15)
    assert report.passed, report.failures[:3]
    assert report.checked == 30 * 29 // 2
    assert report.values["search"]["verdict"] == "exhausted"


def test_cp2_mod3_needs_a_window():
    with pytest.raises(PreconditionViolated):
        verify_cp2_mod3(window_max=1)


def test_canonical_alpha_instance():
    result = verify_cp2_alpha(2, 1, 32, 112)
    assert result["lhs"] == F(5, 33)
    assert result["closed_form"] == result["residue_form"] == F(5, 33)
    assert result["bound"] == F(55, 224)
    assert (result["l0"], result["l1"]) == (2, 7)
    assert result["match"] and result["below_bound"]


@pytest.mark.parametrize("args", [
    (1, 1, 32, 112),
    (2, 2, 33, 113),
    (2, 1, 33, 112),
    (2, 1, 16, 112),
    (2, 1, 32, 96),
])
def test_alpha_preconditions(args):
    with pytest.raises(PreconditionViolated):
        verify_cp2_alpha(*args)


def test_alpha_instances_satisfy_preconditions():
    instances = alpha_instances(20)
    assert len(instances) == 20
    assert len(set(instances)) == 20
    for k, i, m, n in instances:
        assert m % 4 ** k == n % 4 ** k == i - 1


def test_alpha_reproducer_passes():
    report = reproduce_cp2_alpha()
    assert report.passed, report.failures
    assert report.checked == 21
    assert report.to_dict()["values"]["canonical"]["lhs"] == "5/33"


def test_almost_ramsey_without_exceptions():
    xs = [3 * j + 1 for j in range(1, 41)]
    result = almost_ramsey_refutation(xs, [])
    assert (result["m"], result["F"]) == (1, [1, 2])
    assert result["support"] == [3, 5, 7, 9, 11]
    assert result["refutes"]


def test_almost_ramsey_avoids_the_exceptional_support():
    xs = [3 * j + 1 for j in range(1, 41)]
    result = almost_ramsey_refutation(xs, [(1,)])
    assert result["D"] == [4]
    assert result["m"] == 5
    assert result["F"] == [5, 10]
    assert result["avoids_D"]
    assert len(result["classes"]) >= 2


@pytest.mark.parametrize("xs, exceptional", [([3, 2], []), ([1, 2], [(1,)]), ([1, 2, 3], [(7,)])])
def test_almost_ramsey_preconditions(xs, exceptional):
    with pytest.raises(PreconditionViolated):
        almost_ramsey_refutation(xs, exceptional)


def test_almost_ramsey_reproducer():
    report = reproduce_almost_ramsey()
    assert report.passed
    assert report.checked == 5


def test_recurrent_witness():
    assert recurrent_witness(cp1(), [1, 2, 3, 5], 4).passed
    with pytest.raises(PreconditionViolated):
        recurrent_witness(dunkl_ramirez(F(1, 3)), [1, 2], 2)


def test_recurrent_reproducer_is_seeded():
    first = reproduce_recurrent(seed=3, sequences=5, depth=4, n_max=20)
    second = reproduce_recurrent(seed=3, sequences=5, depth=4, n_max=20)
    assert first.passed
    assert first.to_dict() == second.to_dict()
    assert first.checked == 3 * 5 * 15
    assert first.values["pool"] == [1, 6]


@pytest.mark.parametrize("n_max, depth, top", [(20, 4, 6), (40, 5, 10), (40, 3, 14), (60, 1, 60)])
def test_recurrent_pool_grows_with_the_table(n_max, depth, top):
    assert recurrent_pool(n_max, depth) == top
    assert sum(range(top - depth + 1, top + 1)) <= n_max


def test_recurrent_pool_needs_room_for_distinct_terms():
    with pytest.raises(ParamRange):
        recurrent_pool(5, 3)
    with pytest.raises(ParamRange):
        recurrent_pool(20, 0)


def test_recurrent_reproducer_draws_beyond_small_terms():
    report = reproduce_recurrent(seed=1, sequences=8, depth=3, n_max=40)
    assert report.passed, report.failures[:3]
    assert report.values["pool"] == [1, 14]


def test_orbit_mass_bound_on_sign_orbits():
    K = automorphism_orbit_hypergroup(sign_action())
    result = orbit_mass_bound(K, [1, 3])
    assert result["tau"] == K.project(4)
    assert result["mass_at_tau_F"] == F(1, 2)
    assert result["bound"] == F(1, 2)
    assert result["holds"]
    assert orbit_mass_bound(K, [1, 3, 9], [1, 3])["m"] == 2


@pytest.mark.parametrize("lift", [None, [], ["a"], [1, 1]])
def test_orbit_mass_bound_needs_a_lift(lift):
    K = automorphism_orbit_hypergroup(sign_action())
    with pytest.raises(LiftMissing):
        orbit_mass_bound(K, lift)


def test_orbit_mass_bound_needs_an_orbit_descriptor():
    with pytest.raises(LiftMissing):
        orbit_mass_bound(cp1(), [1, 2])


def test_orbit_reproducers():
    assert orbit_equivalence(n_max=15).passed
    report = reproduce_orbit_bound(max_length=3)
    assert report.passed, report.failures[:3]
    assert report.values["ZxZ/V4"]["c"] == 4
    assert all(case["monochromatic"] for case in report.values.values())


def test_orbit_bound_records_a_lift_that_is_not_monochromatic():
    K = automorphism_orbit_hypergroup(sign_action())
    report = reproduce_orbit_bound(max_length=2, cases=[("Z/{±1}", K, [1, 3], Coloring.mod_k(2))])
    assert not report.passed
    assert report.values["Z/{±1}"]["monochromatic"] is False
    assert report.failures == [{"case": "Z/{±1}", "reason": "lift is not monochromatic",
                                "coloring": {"kind": "mod_k", "r": 2, "k": 2}, "classes": [1, 2]}]


def test_quotient_reproducers():
    table = reproduce_quotient_table(n_max=10)
    assert table.passed, table.failures[:3]
    assert table.values["labels"] == 10
    pushforward = reproduce_pushforward(n_max=10, max_length=2)
    assert pushforward.passed
    assert pushforward.values["events"] == 255


def test_pushforward_identity_on_a_single_event():
    Q = example_quotient(10)
    assert quotient_pushforward_identity(Q, [2, 3, 2], [Q.project(0)])
    assert quotient_pushforward_identity(Q, [4, 4], [Q.project(0), Q.project(3)])


def test_linearization_reproducer():
    assert linearization_match(n_max=10).passed


def test_registry():
    assert set(REPRODUCERS) == {"cp2-mod3", "cp2-alpha", "orbit-cp1", "quotient-table", "quotient-pushforward",
                                "linearization-match", "recurrent", "orbit-bound", "almost-ramsey"}
    [report] = run_reproducer("almost-ramsey")
    assert report.name == "almost-ramsey"
    with pytest.raises(ParamRange):
        run_reproducer("nope")
