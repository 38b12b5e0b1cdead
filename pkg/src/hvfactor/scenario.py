"""Finite hidden-variable scenarios.

A scenario is a finite set of hidden-variable points with a rational prior,
a set of measurements grouped by party, and a list of contexts.  Each
context names one measurement per party and carries, for every
hidden-variable point, the joint conditional distribution of their outcomes.

Outcome tuples are always ordered by party order, and enumerated
lexicographically by declared outcome index (the canonical order).
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Iterator, Mapping, Sequence

from .rational import as_rational

Outcomes = tuple[str, ...]
Table = dict[str, dict[Outcomes, Fraction]]


class ScenarioError(ValueError):
    """A scenario failed validation; ``report`` lists every violation."""

    def __init__(self, report: "ValidationReport"):
        lines = "; ".join(str(v) for v in report.violations[:5])
        more = len(report.violations) - 5
        if more > 0:
            lines += f"; ... ({more} more)"
        super().__init__(f"invalid scenario: {lines}")
        self.report = report


@dataclass(frozen=True)
class Measurement:
    id: str
    party: str
    outcomes: tuple[str, ...]
    outcome_values: tuple[Fraction, ...] | None = None

    def __post_init__(self):
        object.__setattr__(self, "outcomes", tuple(self.outcomes))
        if self.outcome_values is not None:
            vals = tuple(as_rational(v) for v in self.outcome_values)
            object.__setattr__(self, "outcome_values", vals)

    def value_of(self, outcome: str) -> Fraction:
        if self.outcome_values is None:
            raise ValueError(f"measurement {self.id!r} has no outcome values")
        return self.outcome_values[self.outcomes.index(outcome)]


@dataclass(frozen=True)
class LambdaPoint:
    id: str
    weight: Fraction

    def __post_init__(self):
        object.__setattr__(self, "weight", as_rational(self.weight))


@dataclass(frozen=True)
class LambdaSpace:
    points: tuple[LambdaPoint, ...]

    def __post_init__(self):
        object.__setattr__(self, "points", tuple(self.points))

    @classmethod
    def from_weights(cls, weights: Mapping[str, Fraction | int | str]) -> "LambdaSpace":
        return cls(tuple(LambdaPoint(k, v) for k, v in weights.items()))

    @property
    def ids(self) -> tuple[str, ...]:
        return tuple(p.id for p in self.points)

    def weight(self, lam: str) -> Fraction:
        for p in self.points:
            if p.id == lam:
                return p.weight
        raise KeyError(f"unknown hidden-variable point {lam!r}")

    def __iter__(self) -> Iterator[LambdaPoint]:
        return iter(self.points)

    def __len__(self) -> int:
        return len(self.points)


def _key(k: str | Sequence[str]) -> Outcomes:
    return tuple(k.split(",")) if isinstance(k, str) else tuple(k)


@dataclass(frozen=True)
class Context:
    """Jointly measured observables and their per-point joint table.

    ``table`` maps a hidden-variable id to a map from outcome tuple to
    probability.  Missing tuples mean probability zero.  Treat it as
    read-only once the context belongs to a :class:`Scenario`.
    """

    id: str
    measurement_ids: tuple[str, ...]
    table: Table = field(compare=True)

    def __post_init__(self):
        object.__setattr__(self, "measurement_ids", tuple(self.measurement_ids))
        table = {
            lam: {_key(k): as_rational(v) for k, v in row.items()}
            for lam, row in self.table.items()
        }
        object.__setattr__(self, "table", table)

    def prob(self, lam: str, outcomes: Sequence[str]) -> Fraction:
        try:
            row = self.table[lam]
        except KeyError:
            raise KeyError(f"context {self.id!r} has no row for {lam!r}") from None
        return row.get(tuple(outcomes), Fraction(0))


@dataclass(frozen=True)
class Scenario:
    name: str
    lambda_space: LambdaSpace
    parties: tuple[str, ...]
    measurements: tuple[Measurement, ...]
    contexts: tuple[Context, ...]

    def __post_init__(self):
        object.__setattr__(self, "parties", tuple(self.parties))
        object.__setattr__(self, "measurements", tuple(self.measurements))
        contexts = tuple(self._densify(c) for c in self.contexts)
        object.__setattr__(self, "contexts", contexts)

    def _densify(self, ctx: Context) -> Context:
        # Fill every canonical tuple (zeros included) so equality does not
        # depend on whether zeros were spelled out.  Unknown keys are kept
        # so that validation can report them.
        known = {m.id: m for m in self.measurements}
        if not all(mid in known for mid in ctx.measurement_ids):
            return ctx
        tuples = list(itertools.product(*(known[mid].outcomes for mid in ctx.measurement_ids)))
        table = {}
        for lam, row in ctx.table.items():
            dense = {t: row.get(t, Fraction(0)) for t in tuples}
            for k, v in row.items():
                if k not in dense:
                    dense[k] = v
            table[lam] = dense
        return Context(ctx.id, ctx.measurement_ids, table)

    def measurement(self, mid: str) -> Measurement:
        for m in self.measurements:
            if m.id == mid:
                return m
        raise KeyError(f"unknown measurement {mid!r}")

    def context(self, cid: str | Context) -> Context:
        if isinstance(cid, Context):
            return cid
        for c in self.contexts:
            if c.id == cid:
                return c
        raise KeyError(f"unknown context {cid!r}")

    def measurements_of(self, party: str) -> tuple[Measurement, ...]:
        return tuple(m for m in self.measurements if m.party == party)

    def outcome_tuples(self, ctx: str | Context) -> list[Outcomes]:
        """Outcome tuples of a context in canonical order."""
        ctx = self.context(ctx)
        spaces = [self.measurement(mid).outcomes for mid in ctx.measurement_ids]
        return list(itertools.product(*spaces))

    def with_contexts(self, contexts: Sequence[Context], name: str | None = None) -> "Scenario":
        return Scenario(name or self.name, self.lambda_space, self.parties, self.measurements, tuple(contexts))


# --------------------------------------------------------------------------
# validation


@dataclass(frozen=True)
class Violation:
    path: str
    message: str

    def __str__(self) -> str:
        return f"{self.path}: {self.message}"


@dataclass
class ValidationReport:
    violations: list[Violation] = field(default_factory=list)

    @property
    def ok(self) -> bool:
        return not self.violations

    def add(self, path: str, message: str) -> None:
        self.violations.append(Violation(path, message))

    def __len__(self) -> int:
        return len(self.violations)

    def __str__(self) -> str:
        if self.ok:
            return "valid"
        return "\n".join(str(v) for v in self.violations)


def validate(scenario: Scenario) -> ValidationReport:
    """Check every structural and probabilistic invariant of ``scenario``.

    Returns an empty report iff the scenario is well formed.  Nothing is
    raised; each violation carries a path to the offending element.
    """
    report = ValidationReport()
    _check_lambda(scenario, report)
    _check_parties_and_measurements(scenario, report)
    ctx_ok = _check_contexts(scenario, report)
    if ctx_ok:
        _check_marginal_consistency(scenario, report)
    return report


def require_valid(scenario: Scenario) -> Scenario:
    report = validate(scenario)
    if not report.ok:
        raise ScenarioError(report)
    return scenario


def _check_lambda(s: Scenario, report: ValidationReport) -> None:
    points = s.lambda_space.points
    if not points:
        report.add("lambda", "hidden-variable space is empty")
        return
    seen = set()
    for i, p in enumerate(points):
        if p.id in seen:
            report.add(f"lambda[{i}]", f"duplicate id {p.id!r}")
        seen.add(p.id)
        if p.weight <= 0:
            report.add(f"lambda[{i}]", f"weight {p.weight} of {p.id!r} is not strictly positive")
    total = sum((p.weight for p in points), Fraction(0))
    if total != 1:
        report.add("lambda", f"weights sum ≠ 1 (sum is {total})")


def _check_parties_and_measurements(s: Scenario, report: ValidationReport) -> None:
    if len(set(s.parties)) != len(s.parties):
        report.add("parties", "duplicate party names")
    if not s.parties:
        report.add("parties", "no parties declared")
    seen = set()
    for i, m in enumerate(s.measurements):
        path = f"measurements[{i}]"
        if m.id in seen:
            report.add(path, f"duplicate measurement id {m.id!r}")
        seen.add(m.id)
        if m.party not in s.parties:
            report.add(path, f"undeclared party {m.party!r}")
        if len(m.outcomes) < 2:
            report.add(path, f"{m.id!r} needs at least 2 outcomes")
        if len(set(m.outcomes)) != len(m.outcomes):
            report.add(path, f"{m.id!r} has duplicate outcome labels")
        for label in m.outcomes:
            if not label or "," in label:
                report.add(path, f"outcome label {label!r} must be non-empty and comma-free")
        if m.outcome_values is not None and len(m.outcome_values) != len(m.outcomes):
            report.add(path, f"{m.id!r} has {len(m.outcome_values)} values for {len(m.outcomes)} outcomes")


def _check_contexts(s: Scenario, report: ValidationReport) -> bool:
    """Per-context checks; returns False if tables could not be read at all."""
    known = {m.id: m for m in s.measurements}
    lam_ids = s.lambda_space.ids
    usable = True
    seen = set()
    party_rank = {p: i for i, p in enumerate(s.parties)}
    if not s.contexts:
        report.add("contexts", "no contexts declared")
    for i, ctx in enumerate(s.contexts):
        path = f"contexts[{i}]"
        if ctx.id in seen:
            report.add(path, f"duplicate context id {ctx.id!r}")
        seen.add(ctx.id)
        if not ctx.measurement_ids:
            report.add(path, "context names no measurements")
            usable = False
            continue
        missing = [mid for mid in ctx.measurement_ids if mid not in known]
        if missing:
            report.add(path, f"undeclared measurements {missing}")
            usable = False
            continue
        parties = [known[mid].party for mid in ctx.measurement_ids]
        if len(set(parties)) != len(parties):
            report.add(path, f"measurements {list(ctx.measurement_ids)} are not from distinct parties")
            usable = False
            continue
        ranks = [party_rank.get(p, -1) for p in parties]
        if ranks != sorted(ranks):
            report.add(path, "measurements are not listed in party order")
        tuples = set(s.outcome_tuples(ctx))
        for lam in ctx.table:
            if lam not in lam_ids:
                report.add(f"{path}.table.{lam}", "unknown hidden-variable point")
        for lam in lam_ids:
            row = ctx.table.get(lam)
            tpath = f"{path}.table.{lam}"
            if row is None:
                report.add(tpath, "missing row")
                usable = False
                continue
            for key, p in row.items():
                if key not in tuples:
                    report.add(tpath, f"outcome tuple {','.join(key)!r} is not in the outcome space")
                if p < 0:
                    report.add(tpath, f"negative entry {p} at {','.join(key)!r}")
            total = sum(row.values(), Fraction(0))
            if total != 1:
                report.add(tpath, f"row sums to {total}, not 1")
    return usable


def _check_marginal_consistency(s: Scenario, report: ValidationReport) -> None:
    first_seen: dict[str, str] = {}
    for ctx in s.contexts:
        for mid in ctx.measurement_ids:
            ref = first_seen.setdefault(mid, ctx.id)
            if ref == ctx.id:
                continue
            for lam in s.lambda_space.ids:
                a = marginal(s, ref, mid, lam)
                b = marginal(s, ctx.id, mid, lam)
                if a != b:
                    diff = next(o for o in a if a[o] != b[o])
                    report.add(
                        f"contexts[{ctx.id}].table.{lam}",
                        f"inconsistent marginal of {mid!r} at {diff!r}: {b[diff]} here vs {a[diff]} in {ref!r}",
                    )
                    break


def marginal(scenario: Scenario, context: str | Context, measurement_id: str, lam: str) -> dict[str, Fraction]:
    """Per-point single-measurement marginal of a context's joint table."""
    ctx = scenario.context(context)
    if measurement_id not in ctx.measurement_ids:
        raise KeyError(f"measurement {measurement_id!r} is not in context {ctx.id!r}")
    pos = ctx.measurement_ids.index(measurement_id)
    out = {o: Fraction(0) for o in scenario.measurement(measurement_id).outcomes}
    for key, p in ctx.table[lam].items():
        if key[pos] in out:
            out[key[pos]] += p
    return out


def measurement_marginal(scenario: Scenario, measurement_id: str, lam: str) -> dict[str, Fraction]:
    """Marginal of a measurement from the first context that contains it."""
    for ctx in scenario.contexts:
        if measurement_id in ctx.measurement_ids:
            return marginal(scenario, ctx, measurement_id, lam)
    raise KeyError(f"measurement {measurement_id!r} appears in no context")


def product_table(scenario_measurements: Sequence[Measurement], marginals: Sequence[Mapping[str, Fraction]]) -> dict[Outcomes, Fraction]:
    """Joint table formed as the product of independent marginals."""
    out = {}
    for combo in itertools.product(*(m.outcomes for m in scenario_measurements)):
        p = Fraction(1)
        for label, dist in zip(combo, marginals):
            p *= dist.get(label, Fraction(0))
        out[combo] = p
    return out
