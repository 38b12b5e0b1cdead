import itertools
import random
from fractions import Fraction

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from hvfactor.analysis import is_ch_factorizable, is_deterministic
from hvfactor.demos import build_demo
from hvfactor.determinize import NoisePartition, ResponseTable, determinize, marginalize
from hvfactor.factorize import (
    FactorizedModel,
    NotFactorizable,
    analyze_factorized,
    build_shared_noise,
    factorize_independent,
    induced_scenario,
    reconstruct,
    verify_factorization,
)
from hvfactor.scenario import ScenarioError

import generators

H, Q = Fraction(1, 2), Fraction(1, 4)
seeds = st.integers(0, 2**32).map(random.Random)


def test_counterexample_not_factorizable():
    with pytest.raises(NotFactorizable) as exc:
        factorize_independent(build_demo("counterexample"))
    w = exc.value.witness
    assert (w.lam, w.outcomes, w.lhs, w.rhs) == ("λ0", ("+1", "+1"), H, Q)
    assert "1/2 != 1/4" in str(exc.value)


def test_product_noise():
    s = build_demo("product-noise")
    fm = factorize_independent(s)
    assert set(fm.xi) == {"A", "B"}
    assert set(fm.responses) == {"A1", "A2", "B1", "B2"}
    for ctx in s.contexts:
        for lam in s.lambda_space.ids:
            assert reconstruct(fm, ctx.id, lam) == ctx.table[lam]
    assert verify_factorization(fm)


def test_deterministic_pair_single_cells():
    s = build_demo("deterministic-pair")
    fm = factorize_independent(s)
    assert all(part.breakpoints == (0, 1) for part in fm.xi.values())
    assert reconstruct(fm, "A2B1", "λ1") == s.context("A2B1").table["λ1"]
    assert verify_factorization(fm)


def test_independent_sign_responses_give_quarters():
    s = build_demo("counterexample")
    two = NoisePartition((0, H, 1))
    sign = ResponseTable({"λ0": ("+1", "-1")})
    fm = FactorizedModel(s, {"A": two, "B": two}, {"A": sign, "B": sign})
    assert reconstruct(fm, "AB", "λ0") == {k: Q for k in itertools.product(("+1", "-1"), repeat=2)}
    assert verify_factorization(fm)


def test_reconstruct_unknown_ids():
    fm = factorize_independent(build_demo("product-noise"))
    with pytest.raises(KeyError):
        reconstruct(fm, "nope", "λ0")
    with pytest.raises(KeyError):
        reconstruct(fm, "A1B1", "nope")


def test_induced_model_is_deterministic_and_factorizable():
    fm = factorize_independent(build_demo("product-noise"))
    ind = induced_scenario(fm)
    assert is_deterministic(ind) == (True, None)
    assert is_ch_factorizable(ind) == (True, None)
    r = analyze_factorized(fm)
    assert r.deterministic and r.ch_factorizable


def test_invalid_input_rejected():
    s = build_demo("counterexample")
    with pytest.raises(ScenarioError):
        factorize_independent(s.with_contexts([]))


# -- coupled noise ----------------------------------------------------------


def test_shared_noise_counterexample():
    s = build_demo("counterexample")
    shared = build_shared_noise(s)
    assert shared.shared
    plain = determinize(s)
    assert (shared.mu, shared.responses) == (plain.mu, plain.responses)
    # both parties read the same cell, so A = B on every cell
    assert all(a == b for a, b in shared.responses["AB"].rows["λ0"])
    back = marginalize(shared)
    assert back == s
    row = back.context("AB").table["λ0"]
    assert row[("+1", "+1")] + row[("-1", "-1")] == 1
    assert is_ch_factorizable(back)[0] is False


def test_shared_noise_deterministic_pair():
    s = build_demo("deterministic-pair")
    shared = build_shared_noise(s)
    assert len(shared.mu) == 1
    assert is_ch_factorizable(marginalize(shared)) == (True, None)


def test_shared_noise_demo():
    s = build_demo("shared-noise")
    shared = build_shared_noise(s)
    assert shared.mu.breakpoints == (0, Fraction(1, 3), 1)
    assert marginalize(shared) == s
    with pytest.raises(NotFactorizable):
        factorize_independent(s)


# -- properties -------------------------------------------------------------


@settings(max_examples=150, deadline=None)
@given(seeds, st.integers(2, 3))
def test_products_factorize(rnd, n):
    s = generators.random_product(rnd, n_parties=n)
    fm = factorize_independent(s)
    assert verify_factorization(fm)
    for ctx in s.contexts:
        for lam in s.lambda_space.ids:
            assert reconstruct(fm, ctx.id, lam) == ctx.table[lam]


@settings(max_examples=150, deadline=None)
@given(seeds, st.integers(2, 3))
def test_perturbed_products_do_not(rnd, n):
    s, (cid, lam) = generators.perturb(rnd, generators.random_product(rnd, n_parties=n, positive=True))
    with pytest.raises(NotFactorizable) as exc:
        factorize_independent(s)
    w = exc.value.witness
    row = s.context(w.context).table[w.lam]
    rhs = Fraction(1)
    for pos, label in enumerate(w.outcomes):
        rhs *= sum(p for k, p in row.items() if k[pos] == label)
    assert (row[w.outcomes], rhs) == (w.lhs, w.rhs) and w.lhs != w.rhs


@settings(max_examples=150, deadline=None)
@given(seeds, st.integers(2, 3))
def test_decision_matches_factorability(rnd, n):
    s = generators.random_general(rnd, n_parties=n)
    ok, _ = is_ch_factorizable(s)
    try:
        fm = factorize_independent(s)
    except NotFactorizable:
        assert not ok
    else:
        assert ok and verify_factorization(fm)


@settings(max_examples=100, deadline=None)
@given(seeds)
def test_shared_noise_preserves_point_statistics(rnd):
    s = generators.random_general(rnd)
    assert marginalize(build_shared_noise(s)) == s
