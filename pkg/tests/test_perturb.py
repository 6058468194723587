import json
import pathlib

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from ncca.errors import InvalidPair
from ncca.lattice import DirectionPair, directions, GridGeometry, lambda_canonical, lambda_selections, matching, omega
from ncca.localfn import Configuration, apply_global, from_wolfram_code, sigma
from ncca.neighborhood import NeighborhoodConfig, StateSet, config_table, dimer, iter_configs, monomer
from ncca.perturb import (
    Perturbation,
    basis,
    basis_matrix,
    coefficient_labels,
    coefficients_from_lut,
    dimer_value,
    pert_dim,
    pert_eval,
    pert_to_lut,
    reexpress,
)
from ncca.split import split_from_label, split_to_lut

DATA = json.loads((pathlib.Path(__file__).parent / "data" / "three_state_d1_luts.json").read_text())
Q1 = StateSet.upto(1)
Q2 = StateSet.upto(2)


@pytest.mark.parametrize("d", [1, 2, 3, 4])
@pytest.mark.parametrize("qstar", [1, 2, 3])
def test_pert_dim(d, qstar):
    assert pert_dim(d, StateSet.upto(qstar)) == d * d * qstar * qstar
    assert len(coefficient_labels(d, StateSet.upto(qstar))) == pert_dim(d, StateSet.upto(qstar))


def test_pert_dim_examples():
    assert pert_dim(2, Q2) == 16
    assert pert_dim(1, Q1) == 1
    assert pert_dim(4, StateSet.upto(3)) == 144
    assert len(basis(3, Q2)) == 36


def test_binary_basic_perturbation():
    (g1,) = basis(1, Q1)
    assert g1(NeighborhoodConfig((0, 1, 1))) == 1
    assert g1(NeighborhoodConfig((1, 1, 0))) == -1
    assert pert_to_lut(g1).table.tolist() == [0, 0, 0, 1, 0, 0, -1, 0]
    # traffic rule = shift-right split + g1
    assert split_to_lut(split_from_label(1, Q1, ("100",))) + pert_to_lut(g1) == from_wolfram_code(184)


def test_three_state_d1_basis_matches_reference_table():
    labels = coefficient_labels(1, Q2)
    assert [str(dimer(pair, p, q, 1)) for pair, p, q in labels] == ["011", "012", "021", "022"]
    assert [str(N) for N in iter_configs(1, Q2)] == DATA["configs"]
    for g, column in zip(basis(1, Q2), DATA["basis"]):
        assert pert_to_lut(g).table.tolist() == column


def test_general_perturbation_symbolic_entries():
    a, b, c, d = 3, 5, 7, 11
    g = Perturbation(1, Q2, [a, b, c, d])
    assert g(NeighborhoodConfig((1, 1, 2))) == -a + b
    assert g(NeighborhoodConfig((2, 2, 1))) == c - d
    assert pert_eval(basis(1, Q2)[2], NeighborhoodConfig((2, 1, 0))) == -1


def test_zero_perturbation_lut():
    for d, Q in [(1, Q2), (2, Q2), (3, Q1)]:
        assert not pert_to_lut(Perturbation.zero(d, Q)).table.any()


@pytest.mark.parametrize("d, Q", [(1, Q1), (1, Q2), (2, Q1), (2, Q2), (3, Q1), (3, Q2)])
def test_basis_matrix_matches_literal_evaluation(d, Q):
    B = basis_matrix(d, Q)
    assert set(np.unique(B)) <= {-1, 0, 1}
    rows = config_table(d, Q)
    step = 1 if len(rows) <= 300 else 37
    for k, g in enumerate(basis(d, Q)):
        for r in range(0, len(rows), step):
            assert B[r, k] == pert_eval(g, NeighborhoodConfig(tuple(rows[r])))


@pytest.mark.parametrize("d, Q", [(1, Q1), (1, Q2), (2, Q1), (2, Q2), (3, Q1), (3, Q2)])
def test_basis_unit_on_own_dimer(d, Q):
    lam = lambda_canonical(d)
    labels = coefficient_labels(d, Q, lam)
    for g, (pair, p, q) in zip(basis(d, Q), labels):
        lut = pert_to_lut(g)
        for pair2, p2, q2 in labels:
            assert lut(dimer(pair2, p2, q2, d)) == int((pair2, p2, q2) == (pair, p, q))


@pytest.mark.parametrize("d, Q", [(1, Q1), (1, Q2), (2, Q1), (2, Q2), (3, Q1), (3, Q2)])
def test_vanishes_on_monomers_and_antisymmetric(d, Q):
    B = basis_matrix(d, Q)
    rng = np.random.default_rng(d * 10 + len(Q))
    g = Perturbation(d, Q, rng.integers(-3, 4, size=B.shape[1]))
    lut = pert_to_lut(g)
    for v in directions(d):
        for q in Q:
            assert lut(monomer(v, q, d)) == 0
    # antisymmetry on every dimer of omega, for every basis element and a random combination
    for h in [*basis(d, Q), g]:
        lut = pert_to_lut(h)
        for pair in omega(d):
            u, w = pair
            m = matching(pair)
            for p in Q.positive:
                for q in Q.positive:
                    mirror = dimer(m, *((p, q) if m.first == -w else (q, p)), d)
                    assert lut(dimer(pair, p, q, d)) == -lut(mirror)
                    assert dimer_value(h, {u: p, w: q}) == lut(dimer(pair, p, q, d))


@pytest.mark.parametrize("d", [1, 2])
@pytest.mark.parametrize("Q", [Q1, Q2])
def test_selection_independence_all(d, Q):
    rng = np.random.default_rng(7)
    g = Perturbation(d, Q, rng.integers(-2, 3, size=pert_dim(d, Q)))
    ref = pert_to_lut(g)
    for lam in lambda_selections(d):
        g2 = reexpress(g, lam)
        assert pert_to_lut(g2) == ref
        assert coefficients_from_lut(ref, lam) == g2


def test_selection_independence_sampled_d3():
    rng = np.random.default_rng(11)
    g = Perturbation(3, Q2, rng.integers(-2, 3, size=36))
    ref = pert_to_lut(g)
    selections = list(lambda_selections(3))
    for i in rng.choice(len(selections), size=64, replace=False):
        assert pert_to_lut(reexpress(g, selections[i])) == ref


def test_bad_selection():
    with pytest.raises(InvalidPair):
        Perturbation(2, Q1, [0] * 4, (DirectionPair.of(0, 1), DirectionPair.of(0, -1),
                                      DirectionPair.of(1, 2), DirectionPair.of(1, -2)))


def test_linearity():
    rng = np.random.default_rng(5)
    a = Perturbation(2, Q2, rng.integers(-3, 4, 16))
    b = Perturbation(2, Q2, rng.integers(-3, 4, 16))
    assert pert_to_lut(a + b) == pert_to_lut(a) + pert_to_lut(b)
    assert pert_to_lut(3 * a - b) == 3 * pert_to_lut(a) - pert_to_lut(b)
    assert pert_to_lut(-a) == -pert_to_lut(a)


@settings(max_examples=30, deadline=None)
@given(st.integers(1, 3), st.integers(1, 2), st.integers(0, 2**31 - 1))
def test_global_image_sums_to_zero(d, qstar, seed):
    Q = StateSet.upto(qstar)
    rng = np.random.default_rng(seed)
    g = Perturbation(d, Q, rng.integers(-3, 4, size=pert_dim(d, Q)))
    geo = GridGeometry((5,) * d)
    x = Configuration(geo, rng.integers(0, qstar + 1, size=geo.size))
    assert sigma(apply_global(pert_to_lut(g), x)) == 0


def test_alternative_three_dimensional_selection_gives_same_tables():
    lam = tuple(DirectionPair.of(u, w) for u, w in [
        (0, 1), (1, -2), (1, 3), (1, -3), (0, -2), (0, -3), (-1, -2), (-2, -3), (-2, 3),
    ])
    rng = np.random.default_rng(3)
    g = Perturbation(3, Q2, rng.integers(-2, 3, size=36))
    assert pert_to_lut(reexpress(g, lam)) == pert_to_lut(g)
    assert reexpress(reexpress(g, lam), lambda_canonical(3)) == g
