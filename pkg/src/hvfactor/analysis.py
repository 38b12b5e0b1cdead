"""Determinism, Clauser-Horne factorability, correlations and CHSH.

Every check is exact.  When a check fails, the reported witness is the
first failure found scanning contexts in scenario order, then
hidden-variable points in order, then outcome tuples in canonical order.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from typing import Sequence

from .scenario import Outcomes, Scenario, marginal, require_valid


@dataclass(frozen=True)
class DeterminismWitness:
    context: str
    lam: str
    outcomes: Outcomes
    p: Fraction


@dataclass(frozen=True)
class FactorabilityWitness:
    context: str
    lam: str
    outcomes: Outcomes
    lhs: Fraction  # joint probability
    rhs: Fraction  # product of single-measurement marginals


@dataclass(frozen=True)
class AnalysisReport:
    """Verdicts for one scenario.  ``None`` marks a check that was not run."""

    deterministic: bool | None = None
    determinism_witness: DeterminismWitness | None = None
    ch_factorizable: bool | None = None
    ch_witness: FactorabilityWitness | None = None

    @property
    def affirmative(self) -> bool:
        return self.deterministic is not False and self.ch_factorizable is not False


class ChshPatternError(ValueError):
    pass


def is_deterministic(scenario: Scenario) -> tuple[bool, DeterminismWitness | None]:
    """True iff every entry of every per-point context table is 0 or 1."""
    require_valid(scenario)
    for ctx in scenario.contexts:
        for lam in scenario.lambda_space.ids:
            for key in scenario.outcome_tuples(ctx):
                p = ctx.prob(lam, key)
                if 0 < p < 1:
                    return False, DeterminismWitness(ctx.id, lam, key, p)
    return True, None


def factorability_failure(scenario: Scenario, ctx, lam: str) -> FactorabilityWitness | None:
    """First outcome tuple where the joint differs from the product of marginals."""
    ctx = scenario.context(ctx)
    margs = [marginal(scenario, ctx, mid, lam) for mid in ctx.measurement_ids]
    for key in scenario.outcome_tuples(ctx):
        rhs = Fraction(1)
        for label, dist in zip(key, margs):
            rhs *= dist[label]
        lhs = ctx.prob(lam, key)
        if lhs != rhs:
            return FactorabilityWitness(ctx.id, lam, key, lhs, rhs)
    return None


def is_ch_factorizable(scenario: Scenario) -> tuple[bool, FactorabilityWitness | None]:
    """Joint equals the product of single-measurement marginals, everywhere.

    Contexts with more than two parties are checked against the full
    product over all of their measurements.
    """
    require_valid(scenario)
    for ctx in scenario.contexts:
        for lam in scenario.lambda_space.ids:
            w = factorability_failure(scenario, ctx, lam)
            if w is not None:
                return False, w
    return True, None


def analyze(scenario: Scenario, determinism: bool = True, factorability: bool = True) -> AnalysisReport:
    det = det_w = fac = fac_w = None
    if determinism:
        det, det_w = is_deterministic(scenario)
    if factorability:
        fac, fac_w = is_ch_factorizable(scenario)
    return AnalysisReport(det, det_w, fac, fac_w)


def merge_reports(reports: Sequence[AnalysisReport]) -> AnalysisReport:
    """Combine reports of several sub-models; the first witness wins."""

    def combine(flags, witnesses):
        if any(f is None for f in flags):
            return None, None
        for f, w in zip(flags, witnesses):
            if not f:
                return False, w
        return True, None

    det, det_w = combine([r.deterministic for r in reports], [r.determinism_witness for r in reports])
    fac, fac_w = combine([r.ch_factorizable for r in reports], [r.ch_witness for r in reports])
    return AnalysisReport(det, det_w, fac, fac_w)


def correlation(scenario: Scenario, context_id: str) -> Fraction:
    """Exact expectation of the product of outcome values in a context."""
    ctx = scenario.context(context_id)
    ms = [scenario.measurement(mid) for mid in ctx.measurement_ids]
    for m in ms:
        if m.outcome_values is None:
            raise ValueError(f"measurement {m.id!r} has no outcome values; correlation is undefined")
    total = Fraction(0)
    for point in scenario.lambda_space:
        inner = Fraction(0)
        for key, p in ctx.table[point.id].items():
            if not p:
                continue
            v = Fraction(1)
            for m, label in zip(ms, key):
                v *= m.value_of(label)
            inner += v * p
        total += point.weight * inner
    return total


def chsh(scenario: Scenario, contexts: Sequence[str]) -> Fraction:
    """S = E11 + E12 + E21 - E22 for contexts ordered (A1B1, A1B2, A2B1, A2B2)."""
    c11, c12, c21, c22 = check_chsh_pattern(scenario, contexts)
    e = [correlation(scenario, c.id) for c in (c11, c12, c21, c22)]
    return e[0] + e[1] + e[2] - e[3]


_PATTERN_HELP = (
    "expected contexts (A1,B1), (A1,B2), (A2,B1), (A2,B2) with A1 != A2 and B1 != B2, "
    "each naming exactly two measurements in party order"
)


def check_chsh_pattern(scenario: Scenario, contexts: Sequence[str]):
    if len(contexts) != 4:
        raise ChshPatternError(f"need 4 contexts, got {len(contexts)}; {_PATTERN_HELP}")
    try:
        cs = [scenario.context(c) for c in contexts]
    except KeyError as e:
        raise ChshPatternError(str(e.args[0])) from None
    for c in cs:
        if len(c.measurement_ids) != 2:
            raise ChshPatternError(f"context {c.id!r} has {len(c.measurement_ids)} measurements; {_PATTERN_HELP}")
    (a1, b1), (a1b, b2), (a2, b1b), (a2b, b2b) = (c.measurement_ids for c in cs)
    ok = a1 == a1b and a2 == a2b and b1 == b1b and b2 == b2b and a1 != a2 and b1 != b2
    if not ok:
        got = ", ".join("(" + ",".join(c.measurement_ids) + ")" for c in cs)
        raise ChshPatternError(f"got {got}; {_PATTERN_HELP}")
    return cs


def chsh_patterns(scenario: Scenario) -> list[tuple[str, str, str, str]]:
    """Every ordered 4-tuple of context ids forming a CHSH pattern."""
    by_pair = {c.measurement_ids: c.id for c in scenario.contexts if len(c.measurement_ids) == 2}
    firsts = sorted({k[0] for k in by_pair}, key=lambda m: [x.id for x in scenario.measurements].index(m))
    seconds = sorted({k[1] for k in by_pair}, key=lambda m: [x.id for x in scenario.measurements].index(m))
    out = []
    for a1 in firsts:
        for a2 in firsts:
            if a1 == a2:
                continue
            for b1 in seconds:
                for b2 in seconds:
                    if b1 == b2:
                        continue
                    keys = [(a1, b1), (a1, b2), (a2, b1), (a2, b2)]
                    if all(k in by_pair for k in keys):
                        out.append(tuple(by_pair[k] for k in keys))
    return out
