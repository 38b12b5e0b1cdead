"""Built-in example scenarios.

==================  ======================================================
counterexample      one point, perfectly correlated fair outcomes; the
                    joint 1/2 differs from the product of marginals 1/4
deterministic-pair  every outcome fixed by the hidden variable, so the
                    model factorizes trivially; CHSH value 2
product-noise       joints built as products of per-point marginals
prbox               Popescu-Rohrlich box: no-signaling, CHSH value 4
singlet-chsh        rational approximation of the singlet correlations at
                    the optimal angles; CHSH value close to 2*sqrt(2)
shared-noise        both parties read one common noise variable; outcomes
                    are deterministic given (point, noise) yet the
                    point-level joint does not factorize
==================  ======================================================
"""

from __future__ import annotations

from fractions import Fraction
from typing import Callable

from .scenario import Context, LambdaSpace, Measurement, Scenario, product_table

PM = ("+1", "-1")
PM_VALUES = (Fraction(1), Fraction(-1))

# cos(pi/4) to 8 decimals; approximate by design
COS_PI_4 = Fraction(70710678, 10**8)


class UnknownDemo(KeyError):
    def __init__(self, name: str):
        super().__init__(f"unknown demo {name!r}; available: {', '.join(DEMOS)}")
        self.name = name

    def __str__(self) -> str:
        return self.args[0]


def _pm(mid: str, party: str) -> Measurement:
    return Measurement(mid, party, PM, PM_VALUES)


def _chsh_layout():
    ms = (_pm("A1", "A"), _pm("A2", "A"), _pm("B1", "B"), _pm("B2", "B"))
    pairs = [("A1", "B1"), ("A1", "B2"), ("A2", "B1"), ("A2", "B2")]
    return ms, pairs


def counterexample() -> Scenario:
    return Scenario(
        "counterexample",
        LambdaSpace.from_weights({"λ0": 1}),
        ("A", "B"),
        (_pm("A", "A"), _pm("B", "B")),
        (Context("AB", ("A", "B"), {"λ0": {("+1", "+1"): Fraction(1, 2), ("-1", "-1"): Fraction(1, 2)}}),),
    )


def deterministic_pair() -> Scenario:
    ms, pairs = _chsh_layout()
    assignment = {
        "λ0": {"A1": "+1", "A2": "+1", "B1": "+1", "B2": "+1"},
        "λ1": {"A1": "+1", "A2": "-1", "B1": "-1", "B2": "+1"},
    }
    contexts = tuple(
        Context(a + b, (a, b), {lam: {(out[a], out[b]): 1} for lam, out in assignment.items()})
        for a, b in pairs
    )
    return Scenario(
        "deterministic-pair",
        LambdaSpace.from_weights({"λ0": Fraction(1, 2), "λ1": Fraction(1, 2)}),
        ("A", "B"),
        ms,
        contexts,
    )


def product_noise() -> Scenario:
    ms, pairs = _chsh_layout()
    by_id = {m.id: m for m in ms}
    half = {"+1": Fraction(1, 2), "-1": Fraction(1, 2)}

    def dist(p):
        return {"+1": Fraction(p), "-1": 1 - Fraction(p)}

    marginals = {
        "λ0": {"A1": half, "A2": half, "B1": dist("3/4"), "B2": dist("1/3")},
        "λ1": {"A1": dist("1/3"), "A2": dist("1/5"), "B1": half, "B2": half},
    }
    contexts = tuple(
        Context(
            a + b,
            (a, b),
            {lam: product_table([by_id[a], by_id[b]], [m[a], m[b]]) for lam, m in marginals.items()},
        )
        for a, b in pairs
    )
    return Scenario(
        "product-noise",
        LambdaSpace.from_weights({"λ0": Fraction(1, 3), "λ1": Fraction(2, 3)}),
        ("A", "B"),
        ms,
        contexts,
    )


def prbox() -> Scenario:
    ms, pairs = _chsh_layout()
    contexts = []
    for a, b in pairs:
        anti = a == "A2" and b == "B2"
        table = {(x, y): (Fraction(1, 2) if (x == y) != anti else Fraction(0)) for x in PM for y in PM}
        contexts.append(Context(a + b, (a, b), {"λ0": table}))
    return Scenario("prbox", LambdaSpace.from_weights({"λ0": 1}), ("A", "B"), ms, tuple(contexts))


def singlet_chsh(cos_approx: Fraction = COS_PI_4) -> Scenario:
    """Tables P(a,b) = (1 - a*b*c)/4 with c = -cos for three settings, +cos for (A2,B2)."""
    ms, pairs = _chsh_layout()
    c = Fraction(cos_approx)
    coeff = {("A1", "B1"): -c, ("A1", "B2"): -c, ("A2", "B1"): -c, ("A2", "B2"): c}
    contexts = []
    for a, b in pairs:
        table = {
            (x, y): (1 - vx * vy * coeff[a, b]) / 4
            for x, vx in zip(PM, PM_VALUES)
            for y, vy in zip(PM, PM_VALUES)
        }
        contexts.append(Context(a + b, (a, b), {"λ0": table}))
    return Scenario("singlet-chsh", LambdaSpace.from_weights({"λ0": 1}), ("A", "B"), ms, tuple(contexts))


def shared_noise() -> Scenario:
    # common noise on [0,1): cells [0,1/3) and [1/3,1), read by both parties
    cells = (Fraction(1, 3), Fraction(2, 3))
    response = {
        "λ0": {"A": ("+1", "-1"), "B": ("+1", "-1")},
        "λ1": {"A": ("+1", "-1"), "B": ("-1", "+1")},
    }
    table = {}
    for lam, r in response.items():
        row: dict = {}
        for j, w in enumerate(cells):
            key = (r["A"][j], r["B"][j])
            row[key] = row.get(key, Fraction(0)) + w
        table[lam] = row
    return Scenario(
        "shared-noise",
        LambdaSpace.from_weights({"λ0": Fraction(1, 2), "λ1": Fraction(1, 2)}),
        ("A", "B"),
        (_pm("A", "A"), _pm("B", "B")),
        (Context("AB", ("A", "B"), table),),
    )


DEMOS: dict[str, tuple[Callable[[], Scenario], str]] = {
    "counterexample": (counterexample, "perfectly correlated fair coin at one point: joint 1/2, product 1/4"),
    "deterministic-pair": (deterministic_pair, "outcomes fixed by the hidden variable; factorizable, S = 2"),
    "product-noise": (product_noise, "joints are products of per-point marginals; factorizable"),
    "prbox": (prbox, "PR box; marginals 1/2, S = 4"),
    "singlet-chsh": (singlet_chsh, "rational singlet correlations; S = 4*70710678/10^8 (approx. 2*sqrt(2))"),
    "shared-noise": (shared_noise, "both parties read the same noise; deterministic given it, not factorizable"),
}

CHSH_CONTEXTS = ("A1B1", "A1B2", "A2B1", "A2B2")


def build_demo(name: str) -> Scenario:
    try:
        builder, _ = DEMOS[name]
    except KeyError:
        raise UnknownDemo(name) from None
    return builder()


def default_chsh_contexts(name: str) -> tuple[str, ...] | None:
    return CHSH_CONTEXTS if name in ("deterministic-pair", "product-noise", "prbox", "singlet-chsh") else None
