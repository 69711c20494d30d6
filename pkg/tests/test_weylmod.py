from fractions import Fraction

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from wzwsle import build_sl, exactla
from wzwsle.weylmod import (
    ModuleVector,
    TruncationError,
    WeightError,
    affine_mode,
    build_weyl,
    serialize_module,
    virasoro_mode,
)


# ---- independent oracles -------------------------------------------------------


def colored_partition_counts(colors, dmax):
    """Coefficients of prod_n (1 - q^n)^-colors by direct series arithmetic."""
    coeff = [1] + [0] * dmax
    for n in range(1, dmax + 1):
        for _ in range(colors):
            # multiply by 1/(1-q^n)
            for d in range(n, dmax + 1):
                coeff[d] += coeff[d - n]
    return coeff


def theta_over_eta_counts(dmax):
    """Brute-force product (sum_m q^{m^2}) * prod (1-q^n)^-1 for rank 1."""
    part = colored_partition_counts(1, dmax)
    out = [0] * (dmax + 1)
    m = 0
    while m * m <= dmax:
        mult = 1 if m == 0 else 2
        for d in range(m * m, dmax + 1):
            out[d] += mult * part[d - m * m]
        m += 1
    return out


# ---- construction ---------------------------------------------------------------


def test_weyl_dimensions(sl2_vac, sl3_vac):
    assert sl2_vac.dim == colored_partition_counts(3, 4)
    assert sl3_vac.dim == colored_partition_counts(8, 4)


def test_top_space_dimensions(sl2_vac, sl2_spin):
    assert sl2_vac.dim[0] == 1
    assert sl2_spin.dim[0] == 2


def test_weight_validation(sl2):
    with pytest.raises(WeightError):
        build_weyl(sl2, 1, (2,), 2)  # level exceeded
    with pytest.raises(WeightError):
        build_weyl(sl2, 0, (0,), 2)  # level must be positive
    with pytest.raises(WeightError):
        build_weyl(sl2, 1, (-1,), 2)


# ---- mode actions ---------------------------------------------------------------


def test_positive_modes_kill_top(sl2_vac, sl2):
    vac = sl2_vac.vacuum()
    for a in range(sl2.dim):
        for m in (1, 2, 3):
            assert sl2_vac.apply_gen(a, m, vac).is_zero()


def test_bracket_with_central_term(sl2_vac, sl2):
    e = sl2.index[("E", 0, 1)]
    f = sl2.index[("F", 0, 1)]
    vac = sl2_vac.vacuum()
    v = sl2_vac.apply_gen(e, 1, sl2_vac.apply_gen(f, -1, vac))
    # [E_1, F_-1]|0> = (H_0 + (E|F) k)|0> = |0> at level 1
    assert v == vac


def test_level_scalar_in_central_term(sl2):
    M2 = build_weyl(sl2, 2, (0,), 2)
    e = sl2.index[("E", 0, 1)]
    f = sl2.index[("F", 0, 1)]
    v = M2.apply_gen(e, 1, M2.apply_gen(f, -1, M2.vacuum()))
    assert v == M2.vacuum().scale(2)


def test_truncation_error(sl2_vac, sl2):
    deep = sl2_vac.apply_gen(0, -4, sl2_vac.vacuum())
    with pytest.raises(TruncationError):
        sl2_vac.apply_gen(0, -1, deep)


def test_mode_dataclass_dispatch(sl2_vac):
    vac = sl2_vac.vacuum()
    assert sl2_vac.apply_mode(virasoro_mode(-2), vac) == sl2_vac.sugawara(-2, vac)
    assert sl2_vac.apply_mode(affine_mode(0, -1), vac) == sl2_vac.apply_gen(0, -1, vac)


def test_act_matches_mode_matrix(sl2_vac):
    for d in range(1, 5):
        for a in range(3):
            for m in (-2, -1, 1, 2):
                if not (0 <= d - m <= 4):
                    continue
                mat = sl2_vac.mode_matrix(a, m, d).toarray()
                for j, mono in enumerate(sl2_vac.basis[d]):
                    img = sl2_vac.apply_gen(a, m, ModuleVector({mono: 1}))
                    col = sl2_vac.vector_coords(img, d - m) if not img.is_zero() else None
                    for i in range(sl2_vac.dim[d - m]):
                        expect = col[i] if col is not None else 0
                        assert mat[i, j] == expect


# ---- Virasoro --------------------------------------------------------------------


def test_l0_grading_and_conformal_weight(sl2_vac, sl2_spin):
    for M, h in ((sl2_vac, Fraction(0)), (sl2_spin, Fraction(1, 4))):
        for d in range(M.D + 1):
            for mono in M.basis[d]:
                v = ModuleVector({mono: 1})
                assert M.sugawara(0, v) == v.scale(h + d)


def test_virasoro_vacuum_values(sl2_vac):
    vac = sl2_vac.vacuum()
    assert sl2_vac.sugawara(0, vac).is_zero()
    assert sl2_vac.sugawara(-1, vac).is_zero()  # translation-invariant vacuum
    lm2 = sl2_vac.sugawara(-2, vac)
    assert sl2_vac.pair(lm2, lm2) == Fraction(1, 2)  # c/2 at c = 1


def test_virasoro_central_term_2_m2(sl2_vac):
    vac = sl2_vac.vacuum()
    v = sl2_vac.sugawara(2, sl2_vac.sugawara(-2, vac)) - sl2_vac.sugawara(
        -2, sl2_vac.sugawara(2, vac)
    )
    assert v == vac.scale(Fraction(1, 2))


def test_bracket_l1_lm1_vacuum(sl2_vac):
    vac = sl2_vac.vacuum()
    v = sl2_vac.sugawara(1, sl2_vac.sugawara(-1, vac)) - sl2_vac.sugawara(
        -1, sl2_vac.sugawara(1, vac)
    )
    assert v.is_zero()  # 2 L_0 |0> = 0


def test_virasoro_suite_sl2(sl2_vac):
    rep = sl2_vac.verify_virasoro(max_mode=4)
    assert rep["ok"], rep["failures"]


def test_affine_suite_sl2(sl2_vac):
    rep = sl2_vac.verify_affine_relations(max_mode=2)
    assert rep["ok"], rep["failures"]


def test_primary_relation_example(sl2_vac, sl2):
    # [L_1, E_-1] = E_0 on the degree <= 3 slice
    e = sl2.index[("E", 0, 1)]
    for d in range(4):
        for mono in sl2_vac.basis[d]:
            v = ModuleVector({mono: 1})
            lhs = sl2_vac.sugawara(1, sl2_vac.apply_gen(e, -1, v)) - sl2_vac.apply_gen(
                e, -1, sl2_vac.sugawara(1, v)
            )
            assert lhs == sl2_vac.apply_gen(e, 0, v)


# ---- Gram form -------------------------------------------------------------------


def test_gram_degree0_and_degree1(sl2_vac):
    assert sl2_vac.gram(0).tolist() == [[1]]
    G1 = sl2_vac.gram(1)
    assert G1.tolist() == [[1, 0, 0], [0, 2, 0], [0, 0, 1]]


def test_gram_symmetric_and_weight_blocked(sl2_vac, sl3_vac):
    for M in (sl2_vac, sl3_vac):
        for d in range(5):
            G = M.gram(d)
            assert np.array_equal(G, G.T)
            ws = [M.mono_weight(m) for m in M.basis[d]]
            for i in range(len(ws)):
                for j in range(len(ws)):
                    if ws[i] != ws[j]:
                        assert G[i, j] == 0


def test_contravariance_suites(sl2_vac, sl2_spin):
    assert sl2_vac.verify_contravariance()["ok"]
    assert sl2_spin.verify_contravariance()["ok"]


def test_gram_rank_matches_theta_eta_oracle(sl2_vac):
    oracle = theta_over_eta_counts(4)
    assert oracle == [1, 3, 4, 7, 13]
    assert [sl2_vac.gram_rank(d) for d in range(5)] == oracle


def test_pair_degree_mismatch(sl2_vac):
    vac = sl2_vac.vacuum()
    v = sl2_vac.apply_gen(0, -1, vac)
    with pytest.raises(ValueError):
        sl2_vac.pair(vac, v)


# ---- property tests ---------------------------------------------------------------


@settings(max_examples=20, deadline=None)
@given(st.permutations(list(range(3))))
def test_gram_rank_invariant_under_generator_reorder(perm):
    L = build_sl(2)
    M = build_weyl(L, 1, (0,), 3, gen_priority=perm)
    assert [M.gram_rank(d) for d in range(4)] == [1, 3, 4, 7]


@settings(max_examples=30, deadline=None)
@given(st.data())
def test_pairing_is_contravariant_on_random_vectors(data):
    L = build_sl(2)
    M = build_weyl(L, 1, (0,), 4)
    d = data.draw(st.integers(min_value=1, max_value=3))
    m = data.draw(st.integers(min_value=1, max_value=min(2, 4 - d)))
    a = data.draw(st.integers(min_value=0, max_value=2))
    iu = data.draw(st.integers(min_value=0, max_value=M.dim[d + m] - 1))
    iv = data.draw(st.integers(min_value=0, max_value=M.dim[d] - 1))
    u = ModuleVector({M.basis[d + m][iu]: 1})
    v = ModuleVector({M.basis[d][iv]: 1})
    lhs = M.pair(M.apply_gen(a, m, u), v)
    rhs = M.pair(u, M.apply_gen(M.omega_gen[a], -m, v))
    assert lhs == rhs


# ---- serialization ----------------------------------------------------------------


def test_serialize_module(sl2_vac):
    doc = serialize_module(sl2_vac)
    assert doc["schema"] == "wzwsle.module@1"
    assert doc["central_charge"] == "1/1"
    assert doc["conformal_weight"] == "0/1"
    assert [len(doc["basis"][str(d)]) for d in range(5)] == [1, 3, 9, 22, 51]
    assert doc["gram"]["1"] == [["1/1", "0/1", "0/1"], ["0/1", "2/1", "0/1"], ["0/1", "0/1", "1/1"]]
    entry = doc["basis"]["1"][0]
    assert set(entry) == {"top", "word"}
    g1 = doc["gram"]["4"]
    assert len(g1) == 51 and all(exactla.parse_frac(x) is not None for x in g1[0])
