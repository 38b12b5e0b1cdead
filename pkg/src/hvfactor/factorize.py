"""Per-party independent noise: deciding and constructing it.

A scenario is realized with independent noise when each party ``i`` owns a
noise variable ``xi_i``, the ``xi_i`` are independent of each other and of
the hidden variable, and every measurement of party ``i`` is a
deterministic function of (hidden variable, ``xi_i``).  Such a model always
satisfies Clauser-Horne factorability at every hidden-variable point.  For
finite scenarios the converse holds constructively: when factorability
holds, stacking each party's marginals builds the noise (see
:mod:`hvfactor.determinize`).  So the decision reduces to the exact
factorability check.

The joint weight of (lambda, xi_A, xi_B, ...) is only ever formed as the
product of the separate weights; the single exception is
:func:`build_shared_noise`, which deliberately lets every party read the
same noise variable.
"""

from __future__ import annotations

import dataclasses
import itertools
from dataclasses import dataclass
from fractions import Fraction
from typing import Mapping

from .analysis import AnalysisReport, FactorabilityWitness, analyze, is_ch_factorizable
from .determinize import (
    AugmentedScenario,
    NoisePartition,
    ResponseTable,
    determinize,
    gamma_id,
    refine,
    stack_lookup,
)
from .scenario import Context, LambdaPoint, LambdaSpace, Outcomes, Scenario, measurement_marginal, require_valid


class NotFactorizable(Exception):
    """No independent per-party noise reproduces the scenario."""

    def __init__(self, witness: FactorabilityWitness):
        w = witness
        super().__init__(
            f"not factorizable: context {w.context}, {w.lam} ({','.join(w.outcomes)}): {w.lhs} != {w.rhs}"
        )
        self.witness = witness


class UnsupportedStructure(ValueError):
    pass


@dataclass(frozen=True)
class FactorizedModel:
    base: Scenario
    xi: Mapping[str, NoisePartition]  # party -> noise
    responses: Mapping[str, ResponseTable]  # measurement id -> outcome per (lambda, xi-cell)

    def party_of(self, mid: str) -> str:
        return self.base.measurement(mid).party


def _used_measurements(scenario: Scenario) -> list[str]:
    used = {mid for c in scenario.contexts for mid in c.measurement_ids}
    return [m.id for m in scenario.measurements if m.id in used]


def factorize_independent(scenario: Scenario) -> FactorizedModel:
    """Construct independent per-party noise, or raise :class:`NotFactorizable`.

    The raised exception carries the first factorability failure in
    canonical order.
    """
    require_valid(scenario)
    for c in scenario.contexts:
        parties = [scenario.measurement(mid).party for mid in c.measurement_ids]
        if len(set(parties)) != len(parties):
            raise UnsupportedStructure(f"context {c.id!r} has several measurements of one party")

    ok, witness = is_ch_factorizable(scenario)
    if not ok:
        raise NotFactorizable(witness)

    lam_ids = scenario.lambda_space.ids
    used = _used_measurements(scenario)
    dists = {
        (mid, lam): list(measurement_marginal(scenario, mid, lam).values())
        for mid in used
        for lam in lam_ids
    }
    xi, responses = {}, {}
    for party in scenario.parties:
        mids = [mid for mid in used if scenario.measurement(mid).party == party]
        if not mids:
            continue
        part = refine(dists[mid, lam] for mid in mids for lam in lam_ids)
        xi[party] = part
        for mid in mids:
            labels = scenario.measurement(mid).outcomes
            responses[mid] = ResponseTable(
                {lam: tuple(labels[i] for i in stack_lookup(dists[mid, lam], part)) for lam in lam_ids}
            )

    fm = FactorizedModel(scenario, xi, responses)
    for c in scenario.contexts:
        for lam in lam_ids:
            if reconstruct(fm, c.id, lam) != c.table[lam]:
                raise RuntimeError(f"reconstruction mismatch in context {c.id!r} at {lam!r}")
    return fm


def reconstruct(fm: FactorizedModel, context_id: str, lam: str) -> dict[Outcomes, Fraction]:
    """Joint table at ``lam`` obtained by summing over the parties' noise cells.

    Each combination of cells contributes the product of the cell weights
    to the outcome tuple the responses produce there.
    """
    scenario = fm.base
    ctx = scenario.context(context_id)
    if lam not in scenario.lambda_space.ids:
        raise KeyError(f"unknown hidden-variable point {lam!r}")
    out = {key: Fraction(0) for key in scenario.outcome_tuples(ctx)}
    weights = [fm.xi[fm.party_of(mid)].weights for mid in ctx.measurement_ids]
    rows = [fm.responses[mid].rows[lam] for mid in ctx.measurement_ids]
    for cells in itertools.product(*(range(len(w)) for w in weights)):
        w = Fraction(1)
        for ws, j in zip(weights, cells):
            w *= ws[j]
        out[tuple(row[j] for row, j in zip(rows, cells))] += w
    return out


def verify_factorization(fm: FactorizedModel) -> bool:
    """Check that the reconstructed joints factorize at every point.

    Recomputes each joint from the noise model, then compares every entry
    with the product of the reconstructed single-measurement marginals.
    """
    scenario = fm.base
    for ctx in scenario.contexts:
        for lam in scenario.lambda_space.ids:
            joint = reconstruct(fm, ctx.id, lam)
            margs = [dict.fromkeys(scenario.measurement(mid).outcomes, Fraction(0)) for mid in ctx.measurement_ids]
            for key, p in joint.items():
                for pos, label in enumerate(key):
                    margs[pos][label] += p
            for key, p in joint.items():
                rhs = Fraction(1)
                for pos, label in enumerate(key):
                    rhs *= margs[pos][label]
                if p != rhs:
                    return False
    return True


def induced_scenario(fm: FactorizedModel) -> Scenario:
    """Full model over points (lambda, xi-cell per party), all responses deterministic."""
    scenario = fm.base
    parties = [p for p in scenario.parties if p in fm.xi]
    points = []
    tables: dict[str, dict] = {c.id: {} for c in scenario.contexts}
    for lp in scenario.lambda_space:
        for cells in itertools.product(*(range(len(fm.xi[p])) for p in parties)):
            gid = gamma_id(lp.id, *cells)
            w = lp.weight
            for p, j in zip(parties, cells):
                w *= fm.xi[p].weights[j]
            points.append(LambdaPoint(gid, w))
            cell_of = dict(zip(parties, cells))
            for c in scenario.contexts:
                key = tuple(fm.responses[mid](lp.id, cell_of[fm.party_of(mid)]) for mid in c.measurement_ids)
                tables[c.id][gid] = {key: Fraction(1)}
    return Scenario(
        f"{scenario.name}+xi",
        LambdaSpace(tuple(points)),
        scenario.parties,
        scenario.measurements,
        tuple(Context(c.id, c.measurement_ids, tables[c.id]) for c in scenario.contexts),
    )


def analyze_factorized(fm: FactorizedModel, determinism: bool = True, factorability: bool = True) -> AnalysisReport:
    return analyze(induced_scenario(fm), determinism, factorability)


def build_shared_noise(scenario: Scenario) -> AugmentedScenario:
    """Model in which every party reads the same noise variable.

    Statistics at each hidden-variable point are exactly those of the
    input, so a non-factorizable input stays non-factorizable there even
    though every outcome is a deterministic function of (point, noise).
    """
    return dataclasses.replace(determinize(scenario), shared=True)
