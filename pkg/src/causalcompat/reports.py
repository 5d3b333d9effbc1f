"""Report documents for the CLI and the HTTP service.

Each builder returns a plain dict with a fixed key order and only JSON-safe
values (rationals rendered as 'p/q' strings), so repeated runs on the same
input serialize byte-identically.  render_text turns any of them into a
short human summary.
"""

from __future__ import annotations

import json
from fractions import Fraction

from .affects import AffectsVerdict, classify_arrows, enumerate_affects
from .compat import (
    affects_loop_certificate,
    certify_hidden_loop,
    check_compat,
)
from .dist import render_number
from .errors import ArgumentError, UnsupportedInterventionError
from .geometry import (
    FALSE,
    TRUE,
    apex_1p1,
    contain_two_in_one,
    minkowski_joint_future_contained,
    minkowski_precedes,
)
from .modelfile import ParsedModel
from .scenarios import all_scenarios, get_scenario, run_scenario
from .signalling import check_ns2, check_ns3, check_ns3_relaxed, is_jamming

REPORT_VERSION = 1


def _jsonable(value):
    if isinstance(value, Fraction):
        return render_number(value)
    if isinstance(value, dict):
        return {str(k): _jsonable(v) for k, v in value.items()}
    if isinstance(value, (list, tuple)):
        return [_jsonable(v) for v in value]
    if isinstance(value, (set, frozenset)):
        return sorted(_jsonable(v) for v in value)
    return value


def _base(kind: str) -> dict:
    return {"report_version": REPORT_VERSION, "kind": kind}


def _unconditional(verdicts: list[AffectsVerdict]) -> list[AffectsVerdict]:
    return [v for v in verdicts if not v.relation.given]


def _loop_cap(parsed: ParsedModel, max_nodes: int | None) -> int:
    observed = len(parsed.model.graph.observed)
    return max(6, observed, max_nodes or 0)


def _ns_checks(parsed: ParsedModel) -> dict:
    if parsed.roles is None:
        raise ArgumentError("no-signalling checks need a [roles] section")
    dist = parsed.model.observed_distribution()
    roles = parsed.roles
    roles.require_in_scope(dist)
    if roles.parties == 2:
        return {"bipartite": check_ns2(dist, roles).to_jsonable()}
    jam = is_jamming(dist, roles)
    return {
        "tripartite": check_ns3(dist, roles).to_jsonable(),
        "tripartite_relaxed": check_ns3_relaxed(dist, roles).to_jsonable(),
        "jamming": jam.to_jsonable(),
    }


def analysis_report(parsed: ParsedModel, *, include_conditional: bool = False,
                    max_nodes: int | None = None) -> dict:
    """The full pipeline on one model: every influence verdict, the arrow
    classification, and whichever of NS / compatibility / loop sections the
    file provides roles and an embedding for."""
    model = parsed.model
    kwargs = {"include_conditional": include_conditional, "decide_irreducible": True}
    if max_nodes is not None:
        kwargs["max_nodes"] = max_nodes
    try:
        verdicts = enumerate_affects(model, **kwargs)
    except UnsupportedInterventionError:
        verdicts = None  # bare table without interventional sections

    report = _base("analysis")
    report["model"] = {
        "kind": model.kind,
        "observed": sorted(model.graph.observed),
        "latent": sorted(set(model.graph.nodes) - set(model.graph.observed)),
        "acyclic": model.graph.is_acyclic(),
    }
    if verdicts is None:
        report["signatures_evaluated"] = None
        report["affects"] = None
        report["holding"] = []
        report["irreducible"] = []
        report["arrows"] = None
        report["no_signalling"] = _ns_checks(parsed) if parsed.roles else None
        report["compatibility"] = None
        report["loops"] = None
        return _jsonable(report)

    uncond = _unconditional(verdicts)
    report["signatures_evaluated"] = len(verdicts)
    report["affects"] = [_jsonable(v.to_jsonable()) for v in verdicts]
    report["holding"] = [v.relation.describe() for v in verdicts if v.holds]
    report["irreducible"] = [v.relation.describe() for v in verdicts
                             if v.holds and v.irreducible]
    try:
        arrows = classify_arrows(model)
        report["arrows"] = {f"{u}->{v}": kind
                            for (u, v), kind in sorted(arrows.items())}
    except UnsupportedInterventionError:
        report["arrows"] = None

    report["no_signalling"] = _ns_checks(parsed) if parsed.roles else None
    if parsed.embedding is not None:
        report["compatibility"] = check_compat(uncond, parsed.embedding).to_jsonable()
    else:
        report["compatibility"] = None
    cert = affects_loop_certificate(uncond, max_nodes=_loop_cap(parsed, max_nodes))
    report["loops"] = cert.to_jsonable()
    return _jsonable(report)


def ns_report(parsed: ParsedModel) -> dict:
    report = _base("no_signalling")
    report["parties"] = parsed.roles.parties if parsed.roles else None
    report["checks"] = _ns_checks(parsed)
    return _jsonable(report)


def compat_report(parsed: ParsedModel, *, max_nodes: int | None = None) -> dict:
    if parsed.embedding is None:
        raise ArgumentError("compatibility needs an [embedding] section")
    kwargs = {"decide_irreducible": True}
    if max_nodes is not None:
        kwargs["max_nodes"] = max_nodes
    verdicts = enumerate_affects(parsed.model, **kwargs)
    report = _base("compatibility")
    report.update(check_compat(verdicts, parsed.embedding).to_jsonable())
    return _jsonable(report)


def loops_report(parsed: ParsedModel, witness: ParsedModel | None = None, *,
                 max_nodes: int | None = None) -> dict:
    verdicts = enumerate_affects(parsed.model, decide_irreducible=True,
                                 **({"max_nodes": max_nodes} if max_nodes else {}))
    cert = affects_loop_certificate(_unconditional(verdicts),
                                    max_nodes=_loop_cap(parsed, max_nodes))
    report = _base("loops")
    report["graph_acyclic"] = parsed.model.graph.is_acyclic()
    report.update(cert.to_jsonable())
    if witness is not None:
        cap = max(_loop_cap(parsed, max_nodes), len(witness.model.graph.observed))
        report["hidden_loop_certified"] = certify_hidden_loop(
            parsed.model, witness.model, max_nodes=cap)
    else:
        report["hidden_loop_certified"] = None
    return _jsonable(report)


def scenario_report_doc(name: str) -> dict:
    report = _base("scenario")
    report.update(run_scenario(get_scenario(name)).to_jsonable())
    return _jsonable(report)


def scenario_suite_doc() -> dict:
    report = _base("scenario_suite")
    runs = [run_scenario(s) for s in all_scenarios().values()]
    report["passed"] = all(r.passed for r in runs)
    report["scenarios"] = [r.to_jsonable() for r in runs]
    return _jsonable(report)


def _event_coords(event) -> list[str]:
    return [render_number(x) for x in (*event.space, event.time)]


def geometry_precedes_report(a, b) -> dict:
    report = _base("geometry")
    report["op"] = "precedes"
    report["result"] = minkowski_precedes(a, b)
    return report


def geometry_apex_report(a, c) -> dict:
    apex = apex_1p1(a, c)
    report = _base("geometry")
    report["op"] = "apex"
    report["result"] = "(" + ",".join(_event_coords(apex)) + ")"
    report["coords"] = _event_coords(apex)
    return report


def geometry_containment_report(a, c, b) -> dict:
    report = _base("geometry")
    report["op"] = "pair_containment"
    report["result"] = TRUE if contain_two_in_one(a, c, b) else FALSE
    return report


def geometry_future_report(left, right) -> dict:
    report = _base("geometry")
    report["op"] = "future_containment"
    report["result"] = minkowski_joint_future_contained(left, right)
    return report


def to_json_text(report: dict) -> str:
    return json.dumps(report, indent=2, ensure_ascii=False) + "\n"


# -- text rendering ----------------------------------------------------------

def _yn(flag) -> str:
    if flag is None:
        return "undetermined"
    return "true" if flag else "false"


def _ns_lines(checks: dict, out: list[str]) -> None:
    for label, body in checks.items():
        if label == "jamming":
            out.append(f"jamming: {_yn(body['holds'])}")
            continue
        out.append(f"{label.replace('_', ' ')} no-signalling: {_yn(body['holds'])}")
        for clause in body["clauses"]:
            tag = " (derived)" if clause.get("derived") else ""
            out.append(f"  {clause['name']}: {_yn(clause['holds'])}{tag}")


def _loops_lines(body: dict, out: list[str]) -> None:
    out.append(f"causal loop certified: {_yn(body['forced_cyclic'])}")
    if body.get("witness_order"):
        pairs = ", ".join(f"{u} < {v}" for u, v in body["witness_order"])
        out.append(f"  acyclic witness order: {pairs}")
    if body.get("hidden_loop_certified") is not None:
        out.append(f"hidden loop certified: {_yn(body['hidden_loop_certified'])}")


def _compat_lines(body: dict, out: list[str]) -> None:
    out.append(f"embedding compatibility: {body['verdict']}"
               f" ({body['checked']} relations checked)")
    for item in body["violations"]:
        out.append(f"  violation: {item['relation']}")
    for item in body["undetermined"]:
        out.append(f"  undetermined: {item['relation']}")


def render_text(report: dict) -> str:
    kind = report.get("kind")
    out: list[str] = []
    if kind == "analysis":
        m = report["model"]
        out.append(f"{m['kind']} model, observed {' '.join(m['observed'])}"
                   + (f", latent {' '.join(m['latent'])}" if m["latent"] else "")
                   + f", graph {'acyclic' if m['acyclic'] else 'cyclic'}")
        if report["affects"] is None:
            out.append("influence analysis unavailable: the table lacks "
                       "interventional sections")
        else:
            out.append(f"signatures evaluated: {report['signatures_evaluated']}")
            for entry in report["affects"]:
                mark = ""
                if entry.get("irreducible"):
                    mark = " (irreducible)"
                out.append(f"{entry['text']}: {_yn(entry['holds'])}{mark}")
        if report["arrows"]:
            out.append("observed arrows:")
            for edge, style in report["arrows"].items():
                out.append(f"  {edge}: {style}")
        if report["no_signalling"] is not None:
            _ns_lines(report["no_signalling"], out)
        if report["compatibility"] is not None:
            _compat_lines(report["compatibility"], out)
        if report["loops"] is not None:
            _loops_lines(report["loops"], out)
    elif kind == "no_signalling":
        _ns_lines(report["checks"], out)
    elif kind == "compatibility":
        _compat_lines(report, out)
    elif kind == "loops":
        out.append(f"graph acyclic: {_yn(report['graph_acyclic'])}")
        _loops_lines(report, out)
    elif kind == "geometry":
        out.append(f"{report['op']}: {report['result']}")
    elif kind == "scenario":
        out.append(f"scenario {report['name']}: "
                   f"{'pass' if report['passed'] else 'FAIL'}")
        for r in report["results"]:
            status = "ok" if r["passed"] else "FAIL"
            out.append(f"  [{status}] {r['label']}: {r['details']}")
    elif kind == "scenario_suite":
        for s in report["scenarios"]:
            out.append(f"scenario {s['name']}: {'pass' if s['passed'] else 'FAIL'}")
            for r in s["results"]:
                if not r["passed"]:
                    out.append(f"  [FAIL] {r['label']}: {r['details']}")
        out.append(f"suite: {'pass' if report['passed'] else 'FAIL'}")
    else:
        raise ArgumentError(f"no text renderer for report kind {kind!r}")
    return "\n".join(out) + "\n"
