"""Determinizing noise by cumulative-breakpoint refinement.

Given a conditional distribution at each hidden-variable point, stack the
outcome probabilities (in canonical order) on the unit interval.  The union
of all cumulative sums, across all points, partitions [0, 1) into cells; on
each cell every point's outcome is fixed.  The resulting noise variable has
the same cell weights for every point, so it is independent of the hidden
variable, and reading an outcome off the stack is a deterministic response
function of (point, cell).

This is our own construction.  It is exact and canonical but makes no
attempt to minimize the number of cells.
"""

from __future__ import annotations

from bisect import bisect_right
from dataclasses import dataclass, field
from functools import cached_property
from fractions import Fraction
from typing import Iterable, Mapping, Sequence

from .analysis import AnalysisReport, analyze, is_ch_factorizable, merge_reports
from .scenario import Context, LambdaPoint, LambdaSpace, Scenario, require_valid

ZERO, ONE = Fraction(0), Fraction(1)


@dataclass(frozen=True)
class NoisePartition:
    """Partition of [0, 1) into half-open cells ``[b_j, b_{j+1})``."""

    breakpoints: tuple[Fraction, ...]

    def __post_init__(self):
        bps = tuple(Fraction(b) for b in self.breakpoints)
        object.__setattr__(self, "breakpoints", bps)
        if len(bps) < 2 or bps[0] != 0 or bps[-1] != 1:
            raise ValueError(f"breakpoints must start at 0 and end at 1, got {[str(b) for b in bps]}")
        if any(a >= b for a, b in zip(bps, bps[1:])):
            raise ValueError("breakpoints must be strictly increasing")

    @cached_property
    def weights(self) -> tuple[Fraction, ...]:
        return tuple(b - a for a, b in zip(self.breakpoints, self.breakpoints[1:]))

    @cached_property
    def cells(self) -> tuple[tuple[Fraction, Fraction], ...]:
        return tuple(zip(self.breakpoints, self.breakpoints[1:]))

    def __len__(self) -> int:
        return len(self.breakpoints) - 1


def cumulative(probs: Sequence[Fraction]) -> list[Fraction]:
    out, acc = [], ZERO
    for p in probs:
        acc += p
        out.append(acc)
    return out


def refine(distributions: Iterable[Sequence[Fraction]]) -> NoisePartition:
    """Common refinement of the cumulative stacks of several distributions."""
    points = {ZERO, ONE}
    for probs in distributions:
        points.update(cumulative(probs))
    return NoisePartition(tuple(sorted(points)))


def stack_lookup(probs: Sequence[Fraction], partition: NoisePartition) -> tuple[int, ...]:
    """Outcome index of each cell when ``probs`` is stacked on [0, 1).

    Zero-probability outcomes own an empty interval and are never hit.
    """
    ends = cumulative(probs)
    return tuple(bisect_right(ends, lo) for lo, _ in partition.cells)


@dataclass(frozen=True)
class ResponseTable:
    """Deterministic response: point id -> outcome per noise cell."""

    rows: Mapping[str, tuple]

    def __post_init__(self):
        object.__setattr__(self, "rows", {k: tuple(v) for k, v in self.rows.items()})

    def __call__(self, lam: str, cell: int):
        return self.rows[lam][cell]

    def pushforward(self, lam: str, partition: NoisePartition) -> dict:
        out: dict = {}
        for outcome, w in zip(self.rows[lam], partition.weights):
            out[outcome] = out.get(outcome, ZERO) + w
        return out


@dataclass(frozen=True)
class AugmentedScenario:
    """A scenario extended by one noise variable read by every party.

    ``responses`` maps a context id to the joint outcome tuple produced at
    each (point, cell).  ``shared`` marks models built to exhibit coupled
    noise rather than as plain determinizations.
    """

    base: Scenario
    mu: NoisePartition
    responses: Mapping[str, ResponseTable]
    shared: bool = field(default=False)


def determinize(scenario: Scenario, context_id: str | None = None) -> AugmentedScenario:
    """Build a noise variable making the chosen context(s) deterministic.

    Without ``context_id`` every context is covered and a single partition
    serves all of them.
    """
    require_valid(scenario)
    contexts = [scenario.context(context_id)] if context_id is not None else list(scenario.contexts)
    lam_ids = scenario.lambda_space.ids
    dists = {
        (c.id, lam): [c.prob(lam, key) for key in scenario.outcome_tuples(c)]
        for c in contexts
        for lam in lam_ids
    }
    mu = refine(dists.values())
    responses = {}
    for c in contexts:
        keys = scenario.outcome_tuples(c)
        responses[c.id] = ResponseTable(
            {lam: tuple(keys[i] for i in stack_lookup(dists[c.id, lam], mu)) for lam in lam_ids}
        )
    return AugmentedScenario(scenario, mu, responses)


def marginalize(augmented: AugmentedScenario) -> Scenario:
    """Sum the noise out: weight of cells mapping to each outcome tuple."""
    base = augmented.base
    contexts = []
    for cid, resp in augmented.responses.items():
        ctx = base.context(cid)
        contexts.append(Context(cid, ctx.measurement_ids, {lam: resp.pushforward(lam, augmented.mu) for lam in resp.rows}))
    return base.with_contexts(contexts)


def gamma_id(lam: str, *cells: int) -> str:
    return ":".join([lam, *map(str, cells)])


def induced_scenario(augmented: AugmentedScenario, context_id: str) -> Scenario:
    """The single-context model over points (lam, cell), weight w(lam)*w(cell)."""
    base = augmented.base
    ctx = base.context(context_id)
    resp = augmented.responses[context_id]
    points, table = [], {}
    for p in base.lambda_space:
        for j, w in enumerate(augmented.mu.weights):
            gid = gamma_id(p.id, j)
            points.append(LambdaPoint(gid, p.weight * w))
            table[gid] = {resp(p.id, j): ONE}
    return Scenario(
        f"{base.name}+noise[{context_id}]",
        LambdaSpace(tuple(points)),
        base.parties,
        base.measurements,
        (Context(context_id, ctx.measurement_ids, table),),
    )


def induced_scenarios(augmented: AugmentedScenario) -> list[Scenario]:
    return [induced_scenario(augmented, cid) for cid in augmented.responses]


def is_gamma_factorizable(augmented: AugmentedScenario) -> bool:
    """Factorability of every determinized context on the enlarged variable."""
    return all(is_ch_factorizable(s)[0] for s in induced_scenarios(augmented))


def analyze_augmented(augmented: AugmentedScenario, determinism: bool = True, factorability: bool = True) -> AnalysisReport:
    return merge_reports([analyze(s, determinism, factorability) for s in induced_scenarios(augmented)])
