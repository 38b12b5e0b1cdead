"""Exit criteria.  Each test prints one PASS/FAIL line in the terminal summary.

Run alone with ``pytest tests/test_acceptance.py``.  All comparisons are
exact rational equality unless a tolerance is stated.
"""

import io
import random
import time
from fractions import Fraction

import pytest

from hvfactor import fileformat
from hvfactor.analysis import chsh, chsh_patterns, is_ch_factorizable, is_deterministic
from hvfactor.cli import run
from hvfactor.demos import CHSH_CONTEXTS, DEMOS, build_demo
from hvfactor.determinize import determinize, induced_scenarios, is_gamma_factorizable, marginalize
from hvfactor.factorize import NotFactorizable, build_shared_noise, factorize_independent, reconstruct, verify_factorization

import generators

criterion = pytest.mark.criterion


class Timer:
    def __enter__(self):
        self.start = time.perf_counter()
        return self

    def __exit__(self, *exc):
        self.elapsed = time.perf_counter() - self.start


def _witness_recomputed(s, w):
    row = s.context(w.context).table[w.lam]
    rhs = Fraction(1)
    for pos, label in enumerate(w.outcomes):
        rhs *= sum(p for k, p in row.items() if k[pos] == label)
    return row[w.outcomes], rhs


@criterion(1, "counterexample: joint 1/2 vs product 1/4 at λ0 (+1,+1)")
def test_counterexample_reproduction():
    with Timer() as t:
        out, err = io.StringIO(), io.StringIO()
        code = run(["check", "demo:counterexample"], out, err)
        ok, w = is_ch_factorizable(build_demo("counterexample"))
    assert code == 1
    assert "CH-factorizable: no" in out.getvalue()
    assert "witness λ0 (+1,+1): 1/2 ≠ 1/4" in out.getvalue()
    assert not ok
    assert (w.lam, w.outcomes) == ("λ0", ("+1", "+1"))
    assert (w.lhs, w.rhs) == (Fraction(1, 2), Fraction(1, 4))
    assert t.elapsed < 1


@criterion(2, "deterministic tables always factorize (1000 scenarios)")
def test_deterministic_implies_factorizable():
    rng = random.Random(2)
    with Timer() as t:
        for i in range(1000):
            s = generators.random_deterministic(rng, n_parties=2 + i % 2)
            assert 1 <= len(s.lambda_space) <= 4
            assert all(2 <= len(m.outcomes) <= 3 for m in s.measurements)
            assert is_deterministic(s)[0]
            assert is_ch_factorizable(s) == (True, None)
    assert t.elapsed < 10


@criterion(3, "determinization: deterministic, factorizable on the enlarged variable, exact round trip (1000)")
def test_determinization():
    rng = random.Random(3)
    with Timer() as t:
        for i in range(1000):
            s = generators.random_general(rng, n_parties=2 + (i % 4 == 0))
            aug = determinize(s)
            assert all(is_deterministic(x) == (True, None) for x in induced_scenarios(aug))
            assert is_gamma_factorizable(aug)
            assert marginalize(aug) == s
    assert t.elapsed < 60


@criterion(4, "independent noise: products succeed exactly, perturbed products fail with sound witness (1000+1000)")
def test_independent_noise():
    rng = random.Random(4)
    with Timer() as t:
        for i in range(1000):
            s = generators.random_product(rng, n_parties=2 + (i % 4 == 0))
            fm = factorize_independent(s)
            assert verify_factorization(fm)
            for ctx in s.contexts:
                for lam in s.lambda_space.ids:
                    assert reconstruct(fm, ctx.id, lam) == ctx.table[lam]
        for i in range(1000):
            s, _ = generators.perturb(rng, generators.random_product(rng, n_parties=2 + (i % 4 == 0), positive=True))
            with pytest.raises(NotFactorizable) as exc:
                factorize_independent(s)
            w = exc.value.witness
            lhs, rhs = _witness_recomputed(s, w)
            assert (lhs, rhs) == (w.lhs, w.rhs) and lhs != rhs
    assert t.elapsed < 60


@criterion(5, "shared noise reproduces the counterexample and stays non-factorizable")
def test_shared_noise():
    with Timer() as t:
        s = build_demo("counterexample")
        shared = build_shared_noise(s)
        back = marginalize(shared)
        ok, w = is_ch_factorizable(back)
    assert shared.shared
    assert back == s
    assert not ok and (w.lhs, w.rhs) == (Fraction(1, 2), Fraction(1, 4))
    assert t.elapsed < 1


@criterion(6, "|S| <= 2 for factorizable models (500), PR box S = 4, singlet S ~ 2.8284271 within 1e-6")
def test_bell_bound():
    rng = random.Random(6)
    with Timer() as t:
        for i in range(500):
            make = generators.random_deterministic if i % 5 == 0 else generators.random_product
            s = make(rng, pm=True)
            assert is_ch_factorizable(s)[0]
            patterns = chsh_patterns(s)
            assert patterns
            for pattern in patterns:
                assert abs(chsh(s, pattern)) <= 2
        assert chsh(build_demo("prbox"), CHSH_CONTEXTS) == 4
        singlet = chsh(build_demo("singlet-chsh"), CHSH_CONTEXTS)
    assert abs(singlet - Fraction("2.8284271")) <= Fraction(1, 10**6)
    assert t.elapsed < 30


@criterion(7, "write-then-read is byte-identical (all demos, 100 random scenarios)")
def test_file_round_trip():
    rng = random.Random(7)
    models = [build_demo(name) for name in DEMOS]
    makers = [generators.random_deterministic, generators.random_product, generators.random_general]
    models += [makers[i % 3](rng) for i in range(100)]
    for s in models:
        text = fileformat.dumps(s)
        back = fileformat.loads(text)
        assert back == s
        assert fileformat.dumps(back) == text
