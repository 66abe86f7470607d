import json

import pytest

from towernorm import verify
from towernorm.verify import CHECKS, VerificationReport, octahedral_threshold, verify_all

FIELDS = {"check_name", "samples", "violations", "worst_violation", "worst_witness",
          "tolerance", "passed", "runtime_ms", "details"}

SMALL = {"shape": 5, "structure": 30, "equivalence": 30, "octahedral": 30,
         "case1": 3, "case2": 2, "smoothness": 5}


@pytest.mark.parametrize("name", list(CHECKS))
def test_each_check_passes_on_a_small_run(space, name):
    rep = CHECKS[name](space, samples=SMALL[name], seed=1)
    assert isinstance(rep, VerificationReport)
    assert rep.passed, rep.worst_witness
    assert rep.violations == 0
    assert rep.details["subchecks"]
    d = rep.to_dict()
    assert set(d) == FIELDS
    json.dumps(d)


def test_checks_are_deterministic(space):
    a = verify.verify_structure(space, samples=20, seed=5).to_dict()
    b = verify.verify_structure(space, samples=20, seed=5).to_dict()
    c = verify.verify_structure(space, samples=20, seed=6).to_dict()
    for r in (a, b, c):
        r.pop("runtime_ms")
    assert a == b
    assert a != c


def test_octahedral_threshold(space):
    assert octahedral_threshold(space, 0.1) == 3
    assert octahedral_threshold(space, 0.3) == 1
    with pytest.raises(ValueError):
        octahedral_threshold(space, 0.0)
    with pytest.raises(ValueError):
        verify.verify_octahedral(space, samples=3, witness_levels=[2])


def test_a_broken_oracle_is_caught(space, monkeypatch):
    real = verify.minkowski_oracle
    monkeypatch.setattr(verify, "minkowski_oracle", lambda sp, x, *a, **k: 1.01 * real(sp, x))
    rep = verify.verify_structure(space, samples=10, seed=0)
    assert not rep.passed
    assert rep.details["subchecks"]["oracle_agreement"]["violations"] == 10
    assert rep.worst_witness["subcheck"] == "oracle_agreement"


def test_witness_inequality_fails_below_threshold(space):
    # level 1 sits below n0 = 3: the flat region of f_1 absorbs a = 1/4
    from towernorm.norm import tower_norm
    from towernorm.space import TowerVector

    y = TowerVector([1.0, 0.0, 0.0])
    lhs = tower_norm(space, TowerVector([1.0, 0.0, 0.0], [0.25]))
    assert lhs == 1.0 < 0.9 * (tower_norm(space, y) + 0.25)


def test_case2_trace(space):
    rep = verify.verify_case2(space, samples=2, seed=3)
    tr = rep.details["trace"]
    assert tr["n"] >= 3
    assert all(abs(c) <= 16 / 15 + 1e-6 for c in tr["C_sequence"])
    assert tr["lhs"] <= tr["rhs"] + 1e-8


def test_verify_all_order(space):
    reps = verify_all(space, samples=2, seed=0)
    assert [r.check_name for r in reps] == list(CHECKS)
    assert all(r.passed for r in reps)
