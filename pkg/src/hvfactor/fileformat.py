"""JSON file syntax for scenarios, noise models and analysis reports.

Probabilities, weights and breakpoints are always ``"p/q"`` strings.  Table
entries equal to zero are omitted on output and read back as zero.  The
writer fixes key order and enumerates outcome tuples canonically, so
``dumps(loads(dumps(x))) == dumps(x)`` byte for byte.
"""

from __future__ import annotations

import json
from fractions import Fraction
from pathlib import Path
from typing import Any, Union

from .analysis import AnalysisReport, DeterminismWitness, FactorabilityWitness
from .demos import build_demo
from .determinize import AugmentedScenario, NoisePartition, ResponseTable
from .factorize import FactorizedModel
from .rational import RationalParseError, approx, parse_rational, render
from .scenario import Context, LambdaPoint, LambdaSpace, Measurement, Scenario

Model = Union[Scenario, AugmentedScenario, FactorizedModel]

DEMO_PREFIX = "demo:"


class FormatError(ValueError):
    def __init__(self, path: str, message: str):
        super().__init__(f"{path}: {message}")
        self.path = path


def _key(outcomes) -> str:
    return ",".join(outcomes)


def _encode(doc: dict) -> str:
    return json.dumps(doc, indent=2, ensure_ascii=False) + "\n"


# --------------------------------------------------------------------------
# writing


def scenario_doc(s: Scenario) -> dict:
    measurements = []
    for m in s.measurements:
        d: dict[str, Any] = {"id": m.id, "party": m.party, "outcomes": list(m.outcomes)}
        if m.outcome_values is not None:
            d["outcome_values"] = [render(v) for v in m.outcome_values]
        measurements.append(d)
    known = {m.id for m in s.measurements}
    contexts = []
    for c in s.contexts:
        order = [lam for lam in s.lambda_space.ids if lam in c.table]
        order += [lam for lam in c.table if lam not in order]
        canonical = s.outcome_tuples(c) if known.issuperset(c.measurement_ids) else []
        table = {}
        for lam in order:
            row = c.table[lam]
            keys = canonical + [k for k in row if k not in canonical]
            table[lam] = {_key(k): render(row[k]) for k in keys if row.get(k, 0) != 0}
        contexts.append({"id": c.id, "measurements": list(c.measurement_ids), "table": table})
    return {
        "name": s.name,
        "lambda": [{"id": p.id, "weight": render(p.weight)} for p in s.lambda_space],
        "parties": list(s.parties),
        "measurements": measurements,
        "contexts": contexts,
    }


def _responses_doc(responses, lam_ids, encode) -> dict:
    return {
        key: {lam: [encode(o) for o in resp.rows[lam]] for lam in lam_ids if lam in resp.rows}
        for key, resp in responses.items()
    }


def model_doc(model: Model) -> dict:
    if isinstance(model, Scenario):
        return scenario_doc(model)
    doc = scenario_doc(model.base)
    lam_ids = model.base.lambda_space.ids
    if isinstance(model, AugmentedScenario):
        doc["noise"] = {"mu": [render(b) for b in model.mu.breakpoints], "shared": model.shared}
        doc["responses"] = _responses_doc(model.responses, lam_ids, _key)
    elif isinstance(model, FactorizedModel):
        doc["xi"] = {p: [render(b) for b in part.breakpoints] for p, part in model.xi.items()}
        doc["responses"] = _responses_doc(model.responses, lam_ids, str)
    else:
        raise TypeError(f"cannot serialize {type(model).__name__}")
    return doc


def dumps(model: Model) -> str:
    return _encode(model_doc(model))


def write(model: Model, path: str | Path) -> None:
    Path(path).write_text(dumps(model), encoding="utf-8")


# --------------------------------------------------------------------------
# reading


def _get(d: Any, key: str, path: str, kind: type = None):
    if not isinstance(d, dict):
        raise FormatError(path, "expected an object")
    if key not in d:
        raise FormatError(path, f"missing key {key!r}")
    v = d[key]
    if kind is not None and not isinstance(v, kind):
        raise FormatError(f"{path}.{key}", f"expected {kind.__name__}, got {type(v).__name__}")
    return v


def _rat(v: Any, path: str) -> Fraction:
    if not isinstance(v, str):
        raise FormatError(path, f"expected a 'p/q' string, got {json.dumps(v)}")
    try:
        return parse_rational(v)
    except RationalParseError as e:
        raise FormatError(path, str(e)) from None
    except ZeroDivisionError as e:
        raise FormatError(path, str(e)) from None


def _str_list(v: Any, path: str) -> list[str]:
    if not isinstance(v, list) or not all(isinstance(x, str) for x in v):
        raise FormatError(path, "expected a list of strings")
    return v


def scenario_from_doc(doc: Any) -> Scenario:
    name = _get(doc, "name", "$", str)
    lam = []
    for i, p in enumerate(_get(doc, "lambda", "$", list)):
        path = f"$.lambda[{i}]"
        lam.append(LambdaPoint(_get(p, "id", path, str), _rat(_get(p, "weight", path), f"{path}.weight")))
    parties = _str_list(_get(doc, "parties", "$"), "$.parties")
    measurements = []
    for i, m in enumerate(_get(doc, "measurements", "$", list)):
        path = f"$.measurements[{i}]"
        values = None
        if isinstance(m, dict) and "outcome_values" in m:
            raw = _get(m, "outcome_values", path, list)
            values = tuple(_rat(v, f"{path}.outcome_values[{j}]") for j, v in enumerate(raw))
        measurements.append(
            Measurement(
                _get(m, "id", path, str),
                _get(m, "party", path, str),
                tuple(_str_list(_get(m, "outcomes", path), f"{path}.outcomes")),
                values,
            )
        )
    contexts = []
    for i, c in enumerate(_get(doc, "contexts", "$", list)):
        path = f"$.contexts[{i}]"
        mids = _str_list(_get(c, "measurements", path), f"{path}.measurements")
        table = {}
        for lam_id, row in _get(c, "table", path, dict).items():
            if not isinstance(row, dict):
                raise FormatError(f"{path}.table.{lam_id}", "expected an object")
            table[lam_id] = {
                tuple(k.split(",")): _rat(v, f"{path}.table.{lam_id}[{k!r}]") for k, v in row.items()
            }
        contexts.append(Context(_get(c, "id", path, str), tuple(mids), table))
    return Scenario(name, LambdaSpace(tuple(lam)), tuple(parties), tuple(measurements), tuple(contexts))


def _partition(v: Any, path: str) -> NoisePartition:
    if not isinstance(v, list):
        raise FormatError(path, "expected a list of breakpoints")
    try:
        return NoisePartition(tuple(_rat(b, f"{path}[{i}]") for i, b in enumerate(v)))
    except ValueError as e:
        if isinstance(e, FormatError):
            raise
        raise FormatError(path, str(e)) from None


def _responses(doc: Any, path: str, base: Scenario, ncells, decode) -> dict[str, ResponseTable]:
    if not isinstance(doc, dict):
        raise FormatError(path, "expected an object")
    out = {}
    for key, rows in doc.items():
        if not isinstance(rows, dict):
            raise FormatError(f"{path}.{key}", "expected an object")
        n = ncells(key)
        for lam in base.lambda_space.ids:
            if lam not in rows:
                raise FormatError(f"{path}.{key}", f"missing row for {lam!r}")
        parsed = {}
        for lam, cells in rows.items():
            cells = _str_list(cells, f"{path}.{key}.{lam}")
            if len(cells) != n:
                raise FormatError(f"{path}.{key}.{lam}", f"{len(cells)} responses for {n} noise cells")
            parsed[lam] = tuple(decode(key, o, f"{path}.{key}.{lam}") for o in cells)
        out[key] = ResponseTable(parsed)
    return out


def model_from_doc(doc: Any) -> Model:
    base = scenario_from_doc(doc)
    if "noise" in doc:
        noise = _get(doc, "noise", "$", dict)
        mu = _partition(_get(noise, "mu", "$.noise"), "$.noise.mu")
        shared = _get(noise, "shared", "$.noise", bool)

        def decode(cid, text, path):
            try:
                ctx = base.context(cid)
            except KeyError:
                raise FormatError(path, f"unknown context {cid!r}") from None
            key = tuple(text.split(","))
            if key not in base.outcome_tuples(ctx):
                raise FormatError(path, f"outcome tuple {text!r} not in the outcome space")
            return key

        resp = _responses(_get(doc, "responses", "$"), "$.responses", base, lambda _: len(mu), decode)
        return AugmentedScenario(base, mu, resp, shared)
    if "xi" in doc:
        xi_doc = _get(doc, "xi", "$", dict)
        xi = {p: _partition(v, f"$.xi.{p}") for p, v in xi_doc.items()}

        def party_cells(mid):
            try:
                party = base.measurement(mid).party
            except KeyError:
                raise FormatError("$.responses", f"unknown measurement {mid!r}") from None
            if party not in xi:
                raise FormatError("$.xi", f"no noise partition for party {party!r}")
            return len(xi[party])

        def decode(mid, text, path):
            if text not in base.measurement(mid).outcomes:
                raise FormatError(path, f"{text!r} is not an outcome of {mid!r}")
            return text

        resp = _responses(_get(doc, "responses", "$"), "$.responses", base, party_cells, decode)
        return FactorizedModel(base, xi, resp)
    return base


def loads(text: str) -> Model:
    try:
        doc = json.loads(text)
    except json.JSONDecodeError as e:
        raise FormatError(f"line {e.lineno} column {e.colno}", f"malformed JSON: {e.msg}") from None
    return model_from_doc(doc)


def read(path: str | Path) -> Model:
    """Load a model file, or a built-in scenario given as ``demo:NAME``."""
    path = str(path)
    if path.startswith(DEMO_PREFIX):
        return build_demo(path[len(DEMO_PREFIX):])
    return loads(Path(path).read_text(encoding="utf-8"))


# --------------------------------------------------------------------------
# reports


def report_doc(report: AnalysisReport, name: str) -> dict:
    doc: dict[str, Any] = {"scenario": name}
    if report.deterministic is not None:
        doc["deterministic"] = report.deterministic
        w = report.determinism_witness
        doc["determinism_witness"] = None if w is None else {
            "context": w.context,
            "lambda": w.lam,
            "outcomes": list(w.outcomes),
            "p": render(w.p),
            "p_approx": approx(w.p),
        }
    if report.ch_factorizable is not None:
        doc["ch_factorizable"] = report.ch_factorizable
        w = report.ch_witness
        doc["ch_witness"] = None if w is None else {
            "context": w.context,
            "lambda": w.lam,
            "outcomes": list(w.outcomes),
            "lhs": render(w.lhs),
            "rhs": render(w.rhs),
            "lhs_approx": approx(w.lhs),
            "rhs_approx": approx(w.rhs),
        }
    return doc


def dump_report(report: AnalysisReport, name: str) -> str:
    return _encode(report_doc(report, name))


def load_report(text: str) -> tuple[str, AnalysisReport]:
    """Parse a machine-format report; the ``*_approx`` columns are ignored."""
    doc = json.loads(text)
    det_w = fac_w = None
    if w := doc.get("determinism_witness"):
        det_w = DeterminismWitness(w["context"], w["lambda"], tuple(w["outcomes"]), parse_rational(w["p"]))
    if w := doc.get("ch_witness"):
        fac_w = FactorabilityWitness(
            w["context"], w["lambda"], tuple(w["outcomes"]), parse_rational(w["lhs"]), parse_rational(w["rhs"])
        )
    report = AnalysisReport(doc.get("deterministic"), det_w, doc.get("ch_factorizable"), fac_w)
    return doc["scenario"], report
