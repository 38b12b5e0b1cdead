import random
from fractions import Fraction

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from hvfactor.analysis import is_ch_factorizable, is_deterministic
from hvfactor.demos import build_demo
from hvfactor.determinize import (
    AugmentedScenario,
    NoisePartition,
    ResponseTable,
    determinize,
    induced_scenario,
    induced_scenarios,
    is_gamma_factorizable,
    marginalize,
    refine,
)
from hvfactor.scenario import Context, LambdaSpace, Measurement, Scenario

import generators

H = Fraction(1, 2)
PP, MM = ("+1", "+1"), ("-1", "-1")
seeds = st.integers(0, 2**32).map(random.Random)


def brute_force_marginal(aug, cid, lam):
    """Locate each cell's midpoint on the stacked original table by linear scan."""
    s = aug.base
    keys = s.outcome_tuples(cid)
    probs = [s.context(cid).prob(lam, k) for k in keys]
    out = {k: Fraction(0) for k in keys}
    for j, (lo, hi) in enumerate(aug.mu.cells):
        mid = (lo + hi) / 2
        acc = Fraction(0)
        for k, p in zip(keys, probs):
            acc += p
            if mid < acc:
                assert aug.responses[cid](lam, j) == k
                out[k] += hi - lo
                break
    return out


def two_lambda_model():
    ms = (Measurement("A", "A", ("+1", "-1")), Measurement("B", "B", ("+1", "-1")))
    table = {
        "l1": {PP: Fraction(1, 3), MM: Fraction(2, 3)},
        "l2": {PP: H, MM: H},
    }
    return Scenario("two", LambdaSpace.from_weights({"l1": H, "l2": H}), ("A", "B"), ms,
                    (Context("AB", ("A", "B"), table),))


def test_partition_rules():
    p = NoisePartition((0, Fraction(1, 3), 1))
    assert p.weights == (Fraction(1, 3), Fraction(2, 3))
    assert len(p) == 2
    for bad in [(0,), (0, H), (H, 1), (0, H, H, 1), (0, Fraction(3, 4), H, 1)]:
        with pytest.raises(ValueError):
            NoisePartition(bad)


def test_refine_skips_zero_width():
    assert refine([[0, H, 0, H]]).breakpoints == (0, H, 1)


def test_counterexample():
    aug = determinize(build_demo("counterexample"))
    assert aug.mu.breakpoints == (0, H, 1)
    assert aug.mu.weights == (H, H)
    assert aug.responses["AB"].rows["λ0"] == (PP, MM)
    assert brute_force_marginal(aug, "AB", "λ0") == aug.base.context("AB").table["λ0"]
    assert marginalize(aug) == aug.base


def test_deterministic_pair_single_cell():
    s = build_demo("deterministic-pair")
    aug = determinize(s)
    assert aug.mu.breakpoints == (0, 1)
    for ctx in s.contexts:
        for lam in s.lambda_space.ids:
            (only,) = aug.responses[ctx.id].rows[lam]
            assert ctx.prob(lam, only) == 1


def test_two_lambda_breakpoint_union():
    s = two_lambda_model()
    aug = determinize(s)
    assert aug.mu.breakpoints == (0, Fraction(1, 3), H, 1)
    assert aug.mu.weights == (Fraction(1, 3), Fraction(1, 6), H)
    for lam in ("l1", "l2"):
        assert brute_force_marginal(aug, "AB", lam) == s.context("AB").table[lam]
    assert marginalize(aug) == s


def test_single_context_selection():
    s = build_demo("prbox")
    aug = determinize(s, "A2B2")
    assert list(aug.responses) == ["A2B2"]
    m = marginalize(aug)
    assert [c.id for c in m.contexts] == ["A2B2"]
    assert m.context("A2B2") == s.context("A2B2")
    with pytest.raises(KeyError):
        determinize(s, "nope")


def test_marginalize_single_cell_augmentation():
    s = build_demo("deterministic-pair")
    aug = AugmentedScenario(
        s,
        NoisePartition((0, 1)),
        {c.id: ResponseTable({lam: [next(k for k, p in c.table[lam].items() if p == 1)] for lam in c.table})
         for c in s.contexts},
    )
    assert marginalize(aug) == s


def test_gamma_factorizable_but_not_at_lambda():
    s = build_demo("counterexample")
    assert is_ch_factorizable(s)[0] is False
    aug = determinize(s)
    assert is_gamma_factorizable(aug)
    ind = induced_scenario(aug, "AB")
    assert [p.weight for p in ind.lambda_space] == [H, H]
    assert is_deterministic(ind) == (True, None)


@pytest.mark.parametrize("name", ["deterministic-pair", "product-noise", "prbox", "singlet-chsh", "shared-noise"])
def test_demos_round_trip(name):
    s = build_demo(name)
    aug = determinize(s)
    assert marginalize(aug) == s
    assert all(is_deterministic(x)[0] for x in induced_scenarios(aug))
    assert is_gamma_factorizable(aug)


def _check_construction(s):
    for ctx in s.contexts:
        aug = determinize(s, ctx.id)
        nonzero = sum(sum(1 for p in ctx.table[lam].values() if p) - 1 for lam in s.lambda_space.ids)
        assert len(aug.mu) <= 1 + nonzero
        for lam in s.lambda_space.ids:
            assert brute_force_marginal(aug, ctx.id, lam) == ctx.table[lam]
    aug = determinize(s)
    assert marginalize(aug) == s
    for ind in induced_scenarios(aug):
        assert is_deterministic(ind) == (True, None)
    assert is_gamma_factorizable(aug)
    # one partition object, the same cell weights for every point
    assert all(len(r.rows[lam]) == len(aug.mu) for r in aug.responses.values() for lam in r.rows)


@settings(max_examples=150, deadline=None)
@given(seeds, st.integers(2, 3))
def test_random_general(rnd, n):
    _check_construction(generators.random_general(rnd, n_parties=n))


@settings(max_examples=50, deadline=None)
@given(seeds)
def test_random_product(rnd):
    _check_construction(generators.random_product(rnd))
