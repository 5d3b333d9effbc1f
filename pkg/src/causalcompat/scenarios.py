"""Ready-made fixtures: models, layouts and their expected behaviour.

Every scenario bundles a model (or a bare table), optional measurement roles
and embedding, and a machine-checkable list of expected assertions.
run_scenario evaluates each assertion through the public pipeline, so the
whole library doubles as an end-to-end regression suite.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass
from fractions import Fraction
from typing import Mapping, NamedTuple

from .affects import (
    classify_arrows,
    cond_affects,
    enumerate_affects,
    is_irreducible,
)
from .compat import (
    affects_loop_certificate,
    bipartite_compat_conditions,
    certify_hidden_loop,
    check_model_compat,
    tripartite_compat_conditions,
)
from .dist import Distribution, parse_number
from .errors import ArgumentError, ConfigurationError
from .geometry import (
    BEFORE,
    SPACELIKE,
    TRUE,
    Embedding,
    MinkowskiEvent,
    contain_two_in_one,
    minkowski_precedes,
)
from .graphs import CausalGraph
from .models import CausalModel, ExogenousLaw, Mechanism
from .quantum import quantum_jamming_distribution
from .signalling import BellRoles, check_ns2, check_ns3, check_ns3_relaxed, is_jamming

BIT = (0, 1)
HALF = {0: Fraction(1, 2), 1: Fraction(1, 2)}

ROLES2 = BellRoles(("A", "B"), ("X", "Y"))
ROLES3 = BellRoles(("A", "B", "C"), ("X", "Y", "Z"))


def _ev(*coords) -> MinkowskiEvent:
    return MinkowskiEvent(coords[:-1], coords[-1])


def _coin(name: str) -> ExogenousLaw:
    return ExogenousLaw(name, HALF)


def _xor_table() -> dict:
    return {(u, v): u ^ v for u, v in itertools.product(BIT, BIT)}


# --------------------------------------------------------------------------
# embeddings

STANDARD_BIPARTITE_EVENTS = {
    "A": _ev(-2, 0), "X": _ev(-2, 1),
    "B": _ev(2, 0), "Y": _ev(2, 1),
}

JAMMING_EVENTS_COVERING = {
    "A": _ev(-2, Fraction(-1, 2)), "X": _ev(-2, 0),
    "B": _ev(0, Fraction(-1, 2)), "Y": _ev(0, 0),
    "C": _ev(2, Fraction(-1, 2)), "Z": _ev(2, 0),
}

# the middle outcome sits off the outer axis, far enough up that the region
# jointly visible to the outer outcomes escapes its future
JAMMING_EVENTS_SEPARATE = {
    "A": _ev(-2, 0, Fraction(-1, 2)), "X": _ev(-2, 0, 0),
    "B": _ev(0, 0, Fraction(-1, 2)), "Y": _ev(0, 1, Fraction(5, 4)),
    "C": _ev(2, 0, Fraction(-1, 2)), "Z": _ev(2, 0, 0),
}


def _check_lab_layout(events: Mapping[str, MinkowskiEvent],
                      labs: tuple[tuple[str, str], ...]) -> None:
    for setting, outcome in labs:
        rel = minkowski_precedes(events[setting], events[outcome])
        if rel != BEFORE:
            raise ConfigurationError(
                f"setting {setting} must precede its outcome {outcome}, got {rel}")


def _check_cross_lab_spacelike(events: Mapping[str, MinkowskiEvent],
                               labs: tuple[tuple[str, str], ...],
                               skip: frozenset[frozenset[str]] = frozenset()) -> None:
    lab_of = {}
    for i, pair in enumerate(labs):
        for n in pair:
            lab_of[n] = i
    names = sorted(lab_of)
    for p, q in itertools.combinations(names, 2):
        if lab_of[p] == lab_of[q] or frozenset((p, q)) in skip:
            continue
        rel = minkowski_precedes(events[p], events[q])
        if rel != SPACELIKE:
            raise ConfigurationError(
                f"{p} and {q} belong to different labs and must be "
                f"spacelike separated, got {rel}")


def standard_bipartite_embedding(events: Mapping[str, MinkowskiEvent] | None = None, *,
                                 labs: tuple[tuple[str, str], ...] = (("A", "X"), ("B", "Y")),
                                 extra: Mapping[str, MinkowskiEvent] | None = None) -> Embedding:
    """Each lab's setting just before its outcome, labs mutually spacelike."""
    events = dict(STANDARD_BIPARTITE_EVENTS if events is None else events)
    _check_lab_layout(events, labs)
    _check_cross_lab_spacelike(events, labs)
    if extra:
        events.update(extra)
    return Embedding.minkowski(events)


class JammingLayout(NamedTuple):
    embedding: Embedding
    middle_outcome_covers: bool


def jamming_embedding(events: Mapping[str, MinkowskiEvent] | None = None, *,
                      variant: str = "covering",
                      labs: tuple[tuple[str, str], ...] = (("A", "X"), ("B", "Y"), ("C", "Z")),
                      extra: Mapping[str, MinkowskiEvent] | None = None) -> JammingLayout:
    """Three labs, outer outcomes' joint future visible to the middle setting.

    Reports whether the middle *outcome* also covers that joint future; both
    answers are realizable and select which compatibility conditions apply.
    """
    if events is None:
        if variant == "covering":
            events = JAMMING_EVENTS_COVERING
        elif variant == "separate":
            events = JAMMING_EVENTS_SEPARATE
        else:
            raise ArgumentError(f"unknown jamming layout variant {variant!r}")
    events = dict(events)
    (sa, ox), (sb, oy), (sc, oz) = labs
    _check_lab_layout(events, labs)
    _check_cross_lab_spacelike(events, labs)
    if not contain_two_in_one(events[ox], events[oz], events[sb]):
        raise ConfigurationError(
            f"the joint future of {ox} and {oz} must lie inside the future of {sb}")
    if extra:
        events.update(extra)
    emb = Embedding.minkowski(events)
    covers = emb.future_contained([ox, oz], [oy]) == TRUE
    return JammingLayout(emb, covers)


def latent_grid(n: int = 21, span: Fraction = Fraction(5)) -> list[MinkowskiEvent]:
    """n x n rational grid of candidate placements, centred on the origin."""
    if n < 2:
        raise ArgumentError("grid needs at least two points per axis")
    step = Fraction(2 * span, n - 1)
    coords = [-span + k * step for k in range(n)]
    return [_ev(x, t) for x in coords for t in coords]


# --------------------------------------------------------------------------
# scenario plumbing

@dataclass(frozen=True)
class Scenario:
    name: str
    summary: str
    expected: tuple[dict, ...]
    model: CausalModel | None = None
    table: Distribution | None = None
    roles: BellRoles | None = None
    embedding: Embedding | None = None
    hcl_witness: CausalModel | None = None

    def distribution(self) -> Distribution:
        if self.table is not None:
            return self.table
        if self.model is not None:
            return self.model.observed_distribution()
        raise ArgumentError(f"scenario {self.name} has no distribution")


class AssertionResult(NamedTuple):
    label: str
    passed: bool
    details: str

    def to_jsonable(self) -> dict:
        return {"label": self.label, "passed": self.passed, "details": self.details}


class ScenarioReport(NamedTuple):
    name: str
    passed: bool
    results: tuple[AssertionResult, ...]

    def to_jsonable(self) -> dict:
        return {"name": self.name, "passed": self.passed,
                "results": [r.to_jsonable() for r in self.results]}


def _need(scenario: Scenario, attr: str):
    value = getattr(scenario, attr)
    if value is None:
        raise ArgumentError(f"scenario {scenario.name} lacks {attr}")
    return value


def _check_ns(scenario: Scenario, spec: dict):
    roles = _need(scenario, "roles")
    dist = scenario.distribution()
    kind = spec["check"]
    if kind == "ns2":
        report = check_ns2(dist, roles)
    elif kind == "ns3":
        report = check_ns3(dist, roles)
    else:
        report = check_ns3_relaxed(dist, roles)
    ok = report.holds == spec["holds"]
    failed = [c.name for c in report.clauses if not c.holds]
    details = "holds" if report.holds else "failing: " + "; ".join(failed)
    if "failing_clauses" in spec and ok:
        ok = len(failed) == spec["failing_clauses"]
    return ok, details


def _check_jamming(scenario: Scenario, spec: dict):
    report = is_jamming(scenario.distribution(), _need(scenario, "roles"))
    return report.holds == spec["holds"], f"jamming={report.holds}"


def _check_xz_witness_settings(scenario: Scenario, spec: dict):
    roles = _need(scenario, "roles")
    report = is_jamming(scenario.distribution(), roles)
    a, _, c = roles.settings
    seen = sorted({(w["condition_values"][a], w["condition_values"][c])
                   for w in report.xz_clause.witnesses})
    want = sorted((str(p), str(q)) for p, q in spec["pairs"])
    return seen == want, f"witness settings {seen}"


def _check_affects(scenario: Scenario, spec: dict):
    model = _need(scenario, "model")
    verdict = cond_affects(model, spec["sources"], spec["targets"],
                           spec.get("do", ()), spec.get("given", ()))
    ok = verdict.holds == spec["holds"]
    details = verdict.relation.describe() + (" holds" if verdict.holds else " fails")
    if ok and "irreducible" in spec and verdict.holds:
        irr = is_irreducible(model, verdict.relation)
        ok = irr == spec["irreducible"]
        details += f", irreducible={irr}"
    return ok, details


def _check_compat(scenario: Scenario, spec: dict):
    report = check_model_compat(_need(scenario, "model"), _need(scenario, "embedding"))
    ok = report.verdict == spec["verdict"]
    if ok and "violation_mentions" in spec:
        joined = " | ".join(v["relation"] for v in report.violations)
        ok = all(term in joined for term in spec["violation_mentions"])
    details = report.verdict
    if report.violations:
        details += ": " + "; ".join(v["relation"] for v in report.violations)
    return ok, details


def _check_bipartite(scenario: Scenario, spec: dict):
    conds = bipartite_compat_conditions(_need(scenario, "model"), _need(scenario, "roles"))
    got = [conds.no_signalling, conds.no_outcome_sourced]
    return got == list(spec["value"]), f"{got} offending={list(conds.offending)}"


def _check_tripartite(scenario: Scenario, spec: dict):
    conds = tripartite_compat_conditions(_need(scenario, "model"),
                                         _need(scenario, "roles"),
                                         _need(scenario, "embedding"))
    got = [conds.no_signalling_relaxed, conds.no_outcome_sourced,
           conds.outcome_sourced_only_exempt, conds.middle_outcome_covers]
    return got == list(spec["value"]), f"{got} offending={list(conds.offending)}"


def _loop_certificate_for(model: CausalModel):
    verdicts = enumerate_affects(model, decide_irreducible=True)
    return affects_loop_certificate(verdicts,
                                    max_nodes=max(6, len(model.graph.observed)))


def _check_forced_cyclic(scenario: Scenario, spec: dict):
    cert = _loop_certificate_for(_need(scenario, "model"))
    return cert.forced_cyclic == spec["value"], f"forced_cyclic={cert.forced_cyclic}"


def _check_hidden_loop(scenario: Scenario, spec: dict):
    got = certify_hidden_loop(_need(scenario, "model"), _need(scenario, "hcl_witness"))
    return got == spec["value"], f"certified={got}"


def _check_acyclic(scenario: Scenario, spec: dict):
    got = _need(scenario, "model").graph.is_acyclic()
    return got == spec["value"], f"acyclic={got}"


def _check_prob(scenario: Scenario, spec: dict):
    dist = scenario.distribution()
    want = parse_number(spec["value"])
    given = spec.get("given")
    if given:
        scoped = dist.conditional(sorted(spec["event"]), dict(given))
        got = scoped.prob_of(spec["event"])
    else:
        got = dist.prob_of(spec["event"])
    ok = got == want if dist.is_exact else abs(got - want) <= dist.tol
    return ok, f"P = {got}"


def _check_do_prob(scenario: Scenario, spec: dict):
    model = _need(scenario, "model")
    post = model.intervene(dict(spec["do"])).observed_distribution()
    got = post.prob_of(spec["event"])
    want = parse_number(spec["value"])
    ok = got == want if post.is_exact else abs(got - want) <= post.tol
    return ok, f"P = {got}"


def _check_cond_indep(scenario: Scenario, spec: dict):
    dist = scenario.distribution()
    got = dist.cond_indep(spec["left"], spec["right"], spec.get("given", ()))
    return got == spec["value"], f"independent={got}"


def _check_parity_middle(scenario: Scenario, spec: dict):
    roles = _need(scenario, "roles")
    (_, b, _), (x, _, z) = roles.settings, roles.outcomes
    dist = scenario.distribution().marginal([b, x, z])
    hit = sum(p for key, p in dist.items()
              if dict(zip(dist.scope, key))[x] ^ dict(zip(dist.scope, key))[z]
              == dict(zip(dist.scope, key))[b])
    want = parse_number(spec.get("prob", "1"))
    ok = hit == want if dist.is_exact else abs(hit - want) <= dist.tol
    return ok, f"P(outer parity = middle setting) = {hit}"


def _check_pr_slice(scenario: Scenario, spec: dict):
    roles = _need(scenario, "roles")
    (a, b, c), (x, _, z) = roles.settings, roles.outcomes
    dist = scenario.distribution().conditional([a, c, x, z], {b: 0})
    hit = sum(p for key, p in dist.items()
              if (lambda v: v[x] ^ v[z] == v[a] * v[c])(dict(zip(dist.scope, key))))
    ok = hit == 1 if dist.is_exact else abs(hit - 1) <= dist.tol
    return ok, f"P(outer parity = product of outer settings | middle 0) = {hit}"


def _check_arrows(scenario: Scenario, spec: dict):
    got = {f"{u}->{v}": style
           for (u, v), style in classify_arrows(_need(scenario, "model")).items()}
    return got == dict(spec["expected"]), str(got)


CHECKS = {
    "ns2": _check_ns,
    "ns3": _check_ns,
    "ns3_relaxed": _check_ns,
    "jamming": _check_jamming,
    "xz_witness_settings": _check_xz_witness_settings,
    "affects": _check_affects,
    "compat": _check_compat,
    "bipartite_conditions": _check_bipartite,
    "tripartite_conditions": _check_tripartite,
    "forced_cyclic": _check_forced_cyclic,
    "hidden_loop": _check_hidden_loop,
    "acyclic_graph": _check_acyclic,
    "prob": _check_prob,
    "do_prob": _check_do_prob,
    "cond_indep": _check_cond_indep,
    "parity_matches_middle_setting": _check_parity_middle,
    "pr_box_slice": _check_pr_slice,
    "arrows": _check_arrows,
}


def _label(spec: dict) -> str:
    parts = [spec["check"]]
    for key in ("sources", "targets", "do", "given"):
        if spec.get(key):
            parts.append(f"{key}={','.join(spec[key])}")
    for key in ("holds", "verdict", "value", "prob"):
        if key in spec:
            parts.append(f"{key}={spec[key]}")
    return " ".join(parts)


def run_scenario(scenario: Scenario) -> ScenarioReport:
    results = []
    for spec in scenario.expected:
        kind = spec.get("check")
        if kind not in CHECKS:
            raise ArgumentError(f"unknown assertion kind {kind!r}")
        passed, details = CHECKS[kind](scenario, spec)
        results.append(AssertionResult(_label(spec), bool(passed), details))
    return ScenarioReport(scenario.name, all(r.passed for r in results), tuple(results))


# --------------------------------------------------------------------------
# the fixtures

def xor_outcome_scenario() -> Scenario:
    g = CausalGraph(["A", "B", "X", "Y"], [("A", "Y"), ("X", "Y")])
    model = CausalModel(g, {n: BIT for n in "ABXY"},
                        mechanisms={"Y": Mechanism("Y", ("A", "X"), _xor_table())},
                        laws={n: _coin(n) for n in "ABX"})
    expected = (
        {"check": "ns2", "holds": True},
        {"check": "affects", "sources": ["A"], "targets": ["Y"], "holds": False},
        {"check": "affects", "sources": ["X"], "targets": ["Y"], "holds": False},
        {"check": "affects", "sources": ["A", "X"], "targets": ["Y"],
         "holds": True, "irreducible": True},
        {"check": "affects", "sources": ["X"], "targets": ["Y"], "do": ["A"], "holds": True},
        {"check": "bipartite_conditions", "value": [True, False]},
        {"check": "compat", "verdict": "INCOMPATIBLE", "violation_mentions": ["A X affects Y"]},
        {"check": "forced_cyclic", "value": False},
        {"check": "acyclic_graph", "value": True},
    )
    return Scenario("xor-outcome",
                    "one outcome adds its own setting to the other lab's outcome; "
                    "no-signalling holds yet the pair signals jointly",
                    expected, model=model, roles=ROLES2,
                    embedding=standard_bipartite_embedding())


def trit_loop_scenario() -> Scenario:
    g = CausalGraph(["X", "Y"], [("X", "Y"), ("Y", "X")])
    trits = (0, 1, 2)
    model = CausalModel(g, {"X": trits, "Y": trits},
                        mechanisms={"X": Mechanism("X", ("Y",), {(y,): (2 * y) % 3 for y in trits}),
                                    "Y": Mechanism("Y", ("X",), {(x,): x for x in trits})})
    expected = (
        {"check": "prob", "event": {"X": 0, "Y": 0}, "value": "1"},
        {"check": "do_prob", "do": {"X": 1}, "event": {"Y": 1}, "value": "1"},
        {"check": "do_prob", "do": {"Y": 2}, "event": {"X": 1}, "value": "1"},
        {"check": "affects", "sources": ["X"], "targets": ["Y"], "holds": True},
        {"check": "affects", "sources": ["Y"], "targets": ["X"], "holds": True},
        {"check": "forced_cyclic", "value": True},
        {"check": "acyclic_graph", "value": False},
    )
    return Scenario("two-cycle-trit",
                    "deterministic three-valued loop with a unique fixed point; "
                    "mutual influence certifies the cycle",
                    expected, model=model)


def _hidden_loop_model(observe_latent: bool) -> CausalModel:
    g = CausalGraph(["L", "X", "Y"],
                    [("L", "X"), ("L", "Y"), ("X", "Y"), ("Y", "X")],
                    observed=["X", "Y"] + (["L"] if observe_latent else []))
    return CausalModel(g, {n: BIT for n in "LXY"},
                       mechanisms={"X": Mechanism("X", ("L", "Y"), _xor_table()),
                                   "Y": Mechanism("Y", ("L", "X"), _xor_table())},
                       laws={"L": _coin("L")},
                       mode="uniform")


def hidden_loop_scenario() -> Scenario:
    g = CausalGraph(["X", "Y"], [])
    witness = CausalModel(g, {"X": BIT, "Y": BIT},
                          laws={"X": _coin("X"), "Y": _coin("Y")})
    expected = (
        {"check": "prob", "event": {"X": 0, "Y": 0}, "value": "1/4"},
        {"check": "cond_indep", "left": ["X"], "right": ["Y"], "value": True},
        {"check": "affects", "sources": ["X"], "targets": ["Y"], "holds": False},
        {"check": "affects", "sources": ["Y"], "targets": ["X"], "holds": False},
        {"check": "hidden_loop", "value": True},
        {"check": "forced_cyclic", "value": False},
        {"check": "acyclic_graph", "value": False},
    )
    return Scenario("hidden-loop",
                    "two mechanisms locked in a cycle whose observed statistics are "
                    "two independent coins; an acyclic witness reproduces everything",
                    expected, model=_hidden_loop_model(False), hcl_witness=witness)


def hidden_loop_observed_scenario() -> Scenario:
    expected = (
        {"check": "affects", "sources": ["X"], "targets": ["Y"], "given": ["L"], "holds": True},
        {"check": "affects", "sources": ["X"], "targets": ["Y"], "holds": False},
        {"check": "affects", "sources": ["X"], "targets": ["L", "Y"], "holds": True},
        {"check": "forced_cyclic", "value": True},
    )
    return Scenario("hidden-loop-observed",
                    "same loop with the shared coin observed: conditioning on it "
                    "re-exposes the mutual influence and the cycle becomes certifiable",
                    expected, model=_hidden_loop_model(True))


def setting_copy_scenario() -> Scenario:
    g = CausalGraph(["A", "B", "X", "Y"], [("A", "Y")])
    model = CausalModel(g, {n: BIT for n in "ABXY"},
                        mechanisms={"Y": Mechanism("Y", ("A",), {(0,): 0, (1,): 1})},
                        laws={n: _coin(n) for n in "ABX"})
    expected = (
        {"check": "ns2", "holds": False, "failing_clauses": 1},
        {"check": "affects", "sources": ["A"], "targets": ["Y"], "holds": True,
         "irreducible": True},
        {"check": "bipartite_conditions", "value": [False, True]},
        {"check": "compat", "verdict": "INCOMPATIBLE"},
        {"check": "forced_cyclic", "value": False},
        {"check": "acyclic_graph", "value": True},
    )
    return Scenario("setting-copy",
                    "one outcome copies the remote setting: signalling without any loop",
                    expected, model=model, roles=ROLES2,
                    embedding=standard_bipartite_embedding())


def outcome_copy_scenario(timelike: bool = False) -> Scenario:
    g = CausalGraph(["A", "B", "X", "Y"], [("X", "Y")])
    model = CausalModel(g, {n: BIT for n in "ABXY"},
                        mechanisms={"Y": Mechanism("Y", ("X",), {(0,): 0, (1,): 1})},
                        laws={n: _coin(n) for n in "ABX"})
    if timelike:
        events = dict(STANDARD_BIPARTITE_EVENTS)
        events["Y"] = _ev(-2, 2)  # directly above X: the copy points along time
        embedding = Embedding.minkowski(events)
        expected = (
            {"check": "compat", "verdict": "COMPATIBLE"},
        )
        return Scenario("outcome-copy-timelike",
                        "outcome copy with the copying pair timelike arranged: compatible",
                        expected, model=model, roles=ROLES2, embedding=embedding)
    expected = (
        {"check": "ns2", "holds": True},
        {"check": "affects", "sources": ["X"], "targets": ["Y"], "holds": True,
         "irreducible": True},
        {"check": "bipartite_conditions", "value": [True, False]},
        {"check": "compat", "verdict": "INCOMPATIBLE"},
        {"check": "forced_cyclic", "value": False},
        {"check": "acyclic_graph", "value": True},
    )
    return Scenario("outcome-copy",
                    "one outcome copies the other: no-signalling equalities hold, "
                    "outcome-sourced influence still breaks spacelike layouts",
                    expected, model=model, roles=ROLES2,
                    embedding=standard_bipartite_embedding())


def classical_jamming_model(observe_latent: bool = False) -> Scenario:
    """Shared coin, outer outcome pair, middle setting flipping one side."""
    g = CausalGraph(["A", "B", "C", "L", "X", "Y", "Z"],
                    [("L", "X"), ("B", "X"), ("L", "Z")],
                    observed=["A", "B", "C", "X", "Y", "Z"] + (["L"] if observe_latent else []))
    alphabets = {n: BIT for n in "ABCLXYZ"}
    model = CausalModel(g, alphabets,
                        mechanisms={"X": Mechanism("X", ("B", "L"), _xor_table()),
                                    "Z": Mechanism("Z", ("L",), {(0,): 0, (1,): 1})},
                        laws={n: _coin(n) for n in "ABCLY"})
    layout = jamming_embedding(extra={"L": _ev(0, -3)} if observe_latent else None)
    if observe_latent:
        expected = (
            {"check": "ns3_relaxed", "holds": True},
            {"check": "jamming", "holds": True},
            {"check": "affects", "sources": ["B", "L"], "targets": ["X"],
             "holds": True, "irreducible": True},
            {"check": "affects", "sources": ["L"], "targets": ["Z"],
             "holds": True, "irreducible": True},
            {"check": "compat", "verdict": "INCOMPATIBLE",
             "violation_mentions": ["B L affects X"]},
            {"check": "arrows", "expected": {"B->X": "dashed", "L->X": "dashed",
                                             "L->Z": "solid"}},
        )
        name = "classical-jamming-observed-cause"
        summary = ("classical jamming with the shared coin observed: the pair "
                   "(middle setting, coin) irreducibly drives an outer outcome, "
                   "which no placement of the coin can accommodate")
    else:
        expected = (
            {"check": "ns3", "holds": False, "failing_clauses": 1},
            {"check": "ns3_relaxed", "holds": True},
            {"check": "jamming", "holds": True},
            {"check": "parity_matches_middle_setting", "prob": "1"},
            {"check": "prob", "event": {"X": 0}, "given": {"A": 0, "B": 1, "C": 0},
             "value": "1/2"},
            {"check": "affects", "sources": ["B"], "targets": ["X", "Z"],
             "holds": True, "irreducible": True},
            {"check": "affects", "sources": ["B"], "targets": ["X"], "holds": False},
            {"check": "affects", "sources": ["B"], "targets": ["Z"], "holds": False},
            {"check": "tripartite_conditions", "value": [True, True, True, True]},
            {"check": "compat", "verdict": "COMPATIBLE"},
            {"check": "forced_cyclic", "value": False},
            {"check": "acyclic_graph", "value": True},
            {"check": "arrows", "expected": {"B->X": "dashed"}},
        )
        name = "classical-jamming"
        summary = ("classical jamming: the middle setting steers the outer outcome "
                   "pair without touching either marginal; compatible with the "
                   "covering layout")
    return Scenario(name, summary, expected, model=model, roles=ROLES3,
                    embedding=layout.embedding)


def quantum_jamming_scenario(bases_first=None, bases_second=None) -> Scenario:
    dist = quantum_jamming_distribution(bases_first, bases_second)
    dist = dist.extend_constant("Y", 0)
    expected = (
        {"check": "ns3_relaxed", "holds": True},
        {"check": "jamming", "holds": True},
        {"check": "xz_witness_settings", "pairs": [[0, 0]]},
        {"check": "prob", "event": {"X": 0}, "given": {"A": 0, "B": 0, "C": 0},
         "value": "1/2"},
        {"check": "prob", "event": {"X": 0}, "given": {"A": 1, "B": 1, "C": 0},
         "value": "1/2"},
        {"check": "prob", "event": {"X": 0, "Z": 0}, "given": {"A": 0, "B": 1, "C": 0},
         "value": "0"},
    )
    if bases_first is not None or bases_second is not None:
        expected = expected[3:4]  # only the marginal flatness is basis independent
    return Scenario("quantum-jamming",
                    "entangled pair with a middle-controlled flip: outer marginals "
                    "flat, outer joint tracks the middle input at matching bases",
                    expected, table=dist, roles=ROLES3)


def pr_jamming_distribution() -> Distribution:
    """Outer parity equals the outer settings' product xor the middle setting."""
    alphabets = {n: BIT for n in "ABCXZ"}
    weights = {}
    for a, b, c, x in itertools.product(BIT, repeat=4):
        weights[(a, b, c, x, x ^ (a * c) ^ b)] = Fraction(1)
    return Distribution.from_weights(alphabets, weights)


def pr_jamming_scenario() -> Scenario:
    dist = pr_jamming_distribution().extend_constant("Y", 0)
    expected = (
        {"check": "ns3", "holds": False, "failing_clauses": 1},
        {"check": "ns3_relaxed", "holds": True},
        {"check": "jamming", "holds": True},
        {"check": "pr_box_slice"},
        {"check": "prob", "event": {"X": 0}, "given": {"A": 1, "B": 1, "C": 1},
         "value": "1/2"},
    )
    return Scenario("pr-jamming",
                    "nonlocal-box pair whose relabelling is selected by the middle "
                    "setting; maximal jamming correlations",
                    expected, table=dist, roles=ROLES3)


def counterexample_library() -> list[Scenario]:
    return [
        xor_outcome_scenario(),
        trit_loop_scenario(),
        hidden_loop_scenario(),
        setting_copy_scenario(),
        outcome_copy_scenario(),
    ]


def all_scenarios() -> dict[str, Scenario]:
    out = {}
    for s in counterexample_library() + [
        hidden_loop_observed_scenario(),
        outcome_copy_scenario(timelike=True),
        classical_jamming_model(False),
        classical_jamming_model(True),
        quantum_jamming_scenario(),
        pr_jamming_scenario(),
    ]:
        out[s.name] = s
    return out


def get_scenario(name: str) -> Scenario:
    table = all_scenarios()
    if name not in table:
        raise ArgumentError(f"unknown scenario {name!r}; known: {sorted(table)}")
    return table[name]


def scenario_model_text(scenario: Scenario) -> str:
    """Scenario as a model file.  Bare-table scenarios become table models
    over an edgeless graph (interventions on them stay unsupported)."""
    from .modelfile import render_model_file

    model = scenario.model
    if model is None:
        table = scenario.table
        graph = CausalGraph(table.scope, (), observed=table.scope)
        model = CausalModel(graph, table.alphabets, observed_table=table)
    return render_model_file(model, roles=scenario.roles,
                             embedding=scenario.embedding)


class LoopConditionEntry(NamedTuple):
    scenario: str
    claim: str
    passed: bool
    details: str

    def to_jsonable(self) -> dict:
        return {"scenario": self.scenario, "claim": self.claim,
                "passed": self.passed, "details": self.details}


class LoopConditionReport(NamedTuple):
    passed: bool
    entries: tuple[LoopConditionEntry, ...]

    def to_jsonable(self) -> dict:
        return {"passed": self.passed, "entries": [e.to_jsonable() for e in self.entries]}


def loop_condition_report() -> LoopConditionReport:
    """Cross-checks between the signalling conditions and loop classification.

    The outcome-sourced conditions are sufficient to rule out certified
    influence loops, but the converse fails in both directions: loops exist
    behind innocuous statistics, and loop-free models can still signal.
    """
    entries: list[LoopConditionEntry] = []

    def add(scenario: str, claim: str, passed: bool, details: str = "") -> None:
        entries.append(LoopConditionEntry(scenario, claim, bool(passed), details))

    scen = all_scenarios()

    # fixtures satisfying the outcome-sourced condition must be loop free
    for s in scen.values():
        if s.model is None or s.roles is None:
            continue
        if s.roles.parties == 2:
            conds = bipartite_compat_conditions(s.model, s.roles)
            clean = conds.no_outcome_sourced
        else:
            if s.embedding is None:
                continue
            conds = tripartite_compat_conditions(s.model, s.roles, s.embedding)
            clean = conds.outcome_sourced_only_exempt
        if clean:
            cert = _loop_certificate_for(s.model)
            add(s.name, "outcome-sourced condition met, so no certified loop",
                cert.forced_cyclic is False,
                f"forced_cyclic={cert.forced_cyclic}")

    loop = scen["two-cycle-trit"]
    cert = _loop_certificate_for(loop.model)
    add(loop.name, "mutual influence certifies a loop without any signalling",
        cert.forced_cyclic is True, f"forced_cyclic={cert.forced_cyclic}")

    hidden = scen["hidden-loop"]
    add(hidden.name, "cyclic mechanisms can hide behind independent statistics",
        certify_hidden_loop(hidden.model, hidden.hcl_witness),
        "acyclic witness reproduces table and relations")

    copy_setting = scen["setting-copy"]
    conds = bipartite_compat_conditions(copy_setting.model, copy_setting.roles)
    add(copy_setting.name, "signalling without any loop (acyclic graph)",
        (not conds.no_signalling) and copy_setting.model.graph.is_acyclic(),
        f"no_signalling={conds.no_signalling}")

    copy_outcome = scen["outcome-copy"]
    conds = bipartite_compat_conditions(copy_outcome.model, copy_outcome.roles)
    cert = _loop_certificate_for(copy_outcome.model)
    add(copy_outcome.name,
        "outcome-sourced condition fails yet no loop is certified",
        conds.no_signalling and (not conds.no_outcome_sourced)
        and cert.forced_cyclic is False,
        f"conditions={conds.no_signalling},{conds.no_outcome_sourced}")

    return LoopConditionReport(all(e.passed for e in entries), tuple(entries))
