import json
from fractions import Fraction

import pytest

from wzwsle import build_sl
from wzwsle.weylmod import build_weyl
from wzwsle.nullsolver import (
    build_candidate,
    conjecture_scan,
    solve,
    verify_null,
)


@pytest.fixture(scope="module")
def sl2_candidate(sl2_vac):
    return build_candidate(sl2_vac, sl2_vac.vacuum(), 2, tie="per-generator")


def test_candidate_shape(sl2_candidate):
    assert sl2_candidate.unknowns == ("kappa0", "kappa1", "kappa2", "kappa3")
    assert sl2_candidate.degree == 4
    assert sl2_candidate.v_const.degree() == 4
    for vec in sl2_candidate.family:
        assert vec.degree() == 4


def test_candidate_validation(sl2_vac):
    from wzwsle.weylmod import ModuleVector

    with pytest.raises(ValueError):
        build_candidate(sl2_vac, ModuleVector(), 2)
    with pytest.raises(ValueError):
        build_candidate(sl2_vac, sl2_vac.vacuum(), 3)  # 2n = 6 > D = 4
    with pytest.raises(ValueError):
        build_candidate(sl2_vac, sl2_vac.vacuum(), 2, tie="bogus")


def test_sl2_unique_solution(sl2_candidate):
    rep = solve(sl2_candidate)
    assert rep.status == "unique-solution"
    assert rep.values["kappa0"] == Fraction(8, 3)
    assert all(rep.values[f"kappa{r}"] == 1 for r in (1, 2, 3))
    assert rep.positive is True
    assert rep.algebraic_only is False
    assert rep.residual_max == 0
    assert rep.matches_reference is True


def test_sl2_single_tau(sl2_vac):
    rep = solve(build_candidate(sl2_vac, sl2_vac.vacuum(), 2, tie="single-tau"))
    assert rep.status == "unique-solution"
    assert rep.values == {"kappa0": Fraction(8, 3), "tau": Fraction(1)}


def test_sl3_single_tau(sl3_vac):
    rep = solve(build_candidate(sl3_vac, sl3_vac.vacuum(), 2, tie="single-tau"))
    assert rep.status == "unique-solution"
    assert rep.values == {"kappa0": Fraction(12, 5), "tau": Fraction(4, 5)}
    assert rep.positive is True


def test_sl3_per_generator_agrees_with_tau(sl3_vac):
    rep = solve(build_candidate(sl3_vac, sl3_vac.vacuum(), 2, tie="per-generator"))
    assert rep.status == "unique-solution"
    assert rep.values["kappa0"] == Fraction(12, 5)
    assert all(rep.values[f"kappa{r + 1}"] == Fraction(4, 5) for r in range(8))


def test_spin_module_infeasible(sl2_spin):
    cand = build_candidate(sl2_spin, sl2_spin.top_vector(), 2)
    rep = solve(cand)
    assert rep.status == "infeasible"
    assert rep.values == {}


def test_verify_roundtrip_and_perturbation(sl2_vac, sl2_candidate):
    rep = solve(sl2_candidate)
    good = sl2_candidate.at(rep.values)
    ok, cert = verify_null(sl2_vac, good)
    assert ok and cert["nonzero_pairings"] == []
    bad_values = dict(rep.values)
    bad_values["kappa0"] += 1
    bad = sl2_candidate.at(bad_values)
    ok, cert = verify_null(sl2_vac, bad)
    assert not ok
    assert cert["nonzero_pairings"]


def test_verify_zero_vector(sl2_vac):
    from wzwsle.weylmod import ModuleVector

    ok, cert = verify_null(sl2_vac, ModuleVector())
    assert ok


def test_solution_invariant_under_basis_reorder(sl2):
    for perm in ((2, 0, 1), (1, 2, 0)):
        M = build_weyl(sl2, 1, (0,), 4, gen_priority=perm)
        rep = solve(build_candidate(M, M.vacuum(), 2, tie="per-generator"))
        assert rep.status == "unique-solution"
        assert rep.values["kappa0"] == Fraction(8, 3)
        assert all(rep.values[f"kappa{r}"] == 1 for r in (1, 2, 3))


def test_mode_depth_one_runs(sl2_vac):
    # no reference values exist at n=1; the solver output is just recorded
    rep = solve(build_candidate(sl2_vac, sl2_vac.vacuum(), 1, tie="per-generator"))
    assert rep.status in ("unique-solution", "family", "infeasible")
    if rep.status != "infeasible":
        vec = rep and build_candidate(sl2_vac, sl2_vac.vacuum(), 1).at(rep.values)
        assert verify_null(sl2_vac, vec)[0]


def test_scan_checkpoint_resume(tmp_path):
    ck = tmp_path / "scan.json"
    table1 = conjecture_scan([2], checkpoint_path=str(ck))
    assert set(table1["rows"]) == {"sl2"}
    saved = json.loads(ck.read_text())
    saved["rows"]["sl2"]["wall_seconds"] = -1  # marker proves the row is reused
    ck.write_text(json.dumps(saved))
    table2 = conjecture_scan([2, 3], checkpoint_path=str(ck))
    assert set(table2["rows"]) == {"sl2", "sl3"}
    assert table2["rows"]["sl2"]["wall_seconds"] == -1
    assert table2["rows"]["sl3"]["values"] == {"kappa0": "12/5", "tau": "4/5"}


def test_report_json_rationals(sl2_candidate):
    rep = solve(sl2_candidate)
    doc = rep.to_json()
    assert doc["values"]["kappa0"] == "8/3"
    assert doc["status"] == "unique-solution"
    assert doc["residual_max"] == "0/1"
