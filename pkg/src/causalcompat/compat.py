"""Compatibility of influence relations with an embedding, and loop certification.

A model embeds without superluminal signalling when, for every holding
irreducible relation, the joint future of targets, do-set and conditioning
set lies inside the joint future of the sources.  Reducible relations get a
pass: some strict subset of their sources already carries the influence, and
that tighter relation is checked on its own.

Cyclicity certification works from the relations alone: each holding relation
forces directed reach from its sources, and if no strict partial order on the
involved nodes satisfies every reach constraint, only a cyclic arrangement of
mechanisms can produce those relations.
"""

from __future__ import annotations

from typing import Iterable, NamedTuple

from .affects import (
    AffectsVerdict,
    PathConstraint,
    causation_constraints,
    enumerate_affects,
)
from .errors import ArgumentError, ConfigurationError, ResourceError
from .geometry import FALSE, TRUE, UNDETERMINED, Embedding, PartialOrder, contain_two_in_one
from .models import CausalModel
from .signalling import BellRoles, check_ns2, check_ns3_relaxed

COMPATIBLE = "COMPATIBLE"
INCOMPATIBLE = "INCOMPATIBLE"
UNDETERMINED_VERDICT = "UNDETERMINED"

DEFAULT_LOOP_NODE_CAP = 6
DEFAULT_STEP_BUDGET = 200_000


class CompatibilityReport(NamedTuple):
    verdict: str
    violations: tuple[dict, ...]
    undetermined: tuple[dict, ...]
    checked: int

    def to_jsonable(self) -> dict:
        return {"verdict": self.verdict, "violations": list(self.violations),
                "undetermined": list(self.undetermined), "checked": self.checked}


def _containment_record(verdict: AffectsVerdict, left: tuple[str, ...],
                        right: tuple[str, ...]) -> dict:
    return {"relation": verdict.relation.describe(),
            "joint_future_of": list(left), "must_lie_inside_future_of": list(right)}


def check_compat(verdicts: Iterable[AffectsVerdict], embedding: Embedding) -> CompatibilityReport:
    """Every holding irreducible relation must point along the embedding:
    the region jointly reachable from targets+do+given cannot leave the
    region jointly reachable from the sources."""
    violations: list[dict] = []
    undetermined: list[dict] = []
    checked = 0
    # relations with different role splits often reduce to the same
    # containment query; one answer serves them all
    memo: dict[tuple[tuple[str, ...], tuple[str, ...]], str] = {}
    for v in verdicts:
        if not v.holds:
            continue
        if v.irreducible is None:
            raise ArgumentError(
                f"irreducibility undecided for {v.relation.describe()}; "
                "enumerate with irreducibility decisions enabled")
        if not v.irreducible:
            continue
        rel = v.relation
        left = tuple(sorted(set(rel.targets) | set(rel.do_set) | set(rel.given)))
        right = rel.sources
        checked += 1
        key = (left, right)
        outcome = memo.get(key)
        if outcome is None:
            outcome = memo[key] = embedding.future_contained(left, right)
        if outcome == FALSE:
            violations.append(_containment_record(v, left, right))
        elif outcome == UNDETERMINED:
            undetermined.append(_containment_record(v, left, right))
    if violations:
        return CompatibilityReport(INCOMPATIBLE, tuple(violations), tuple(undetermined), checked)
    if undetermined:
        return CompatibilityReport(UNDETERMINED_VERDICT, (), tuple(undetermined), checked)
    return CompatibilityReport(COMPATIBLE, (), (), checked)


def check_model_compat(model: CausalModel, embedding: Embedding, *,
                       max_nodes: int | None = None) -> CompatibilityReport:
    """Enumerate the model's relations and run check_compat.

    Unconditional relations suffice: a holding conditional relation implies
    the unconditional one with the conditioning set moved into the targets,
    and that relation's containment query already covers the conditional
    form's (the moved nodes land on the same side).
    """
    kwargs = {"decide_irreducible": True}
    if max_nodes is not None:
        kwargs["max_nodes"] = max_nodes
    return check_compat(enumerate_affects(model, **kwargs), embedding)


def _outcome_sourced(verdicts: Iterable[AffectsVerdict],
                     outcomes: frozenset[str]) -> list[AffectsVerdict]:
    return [v for v in verdicts
            if v.holds and set(v.relation.sources) <= outcomes]


class BipartiteConditions(NamedTuple):
    no_signalling: bool
    no_outcome_sourced: bool
    offending: tuple[str, ...]

    def to_jsonable(self) -> dict:
        return {"no_signalling": self.no_signalling,
                "no_outcome_sourced": self.no_outcome_sourced,
                "offending": list(self.offending)}


def bipartite_compat_conditions(model: CausalModel, roles: BellRoles) -> BipartiteConditions:
    """The two bipartite conditions: the no-signalling equalities, and the
    absence of holding relations sourced entirely inside the outcome pair.
    Together they decide compatibility with the standard spacelike layout."""
    roles.validate_on(model)
    if roles.parties != 2:
        raise ArgumentError("two-party roles required")
    ns = check_ns2(model.observed_distribution(), roles)
    outcomes = frozenset(roles.outcomes)
    verdicts = enumerate_affects(model, restrict_sources=outcomes)
    offending = _outcome_sourced(verdicts, outcomes)
    return BipartiteConditions(ns.holds, not offending,
                               tuple(v.relation.describe() for v in offending))


class TripartiteConditions(NamedTuple):
    no_signalling_relaxed: bool
    no_outcome_sourced: bool
    outcome_sourced_only_exempt: bool
    middle_outcome_covers: bool
    offending: tuple[str, ...]

    def to_jsonable(self) -> dict:
        return {"no_signalling_relaxed": self.no_signalling_relaxed,
                "no_outcome_sourced": self.no_outcome_sourced,
                "outcome_sourced_only_exempt": self.outcome_sourced_only_exempt,
                "middle_outcome_covers": self.middle_outcome_covers,
                "offending": list(self.offending)}


def tripartite_compat_conditions(model: CausalModel, roles: BellRoles,
                                 embedding: Embedding) -> TripartiteConditions:
    """Tripartite conditions under a jamming layout.

    Which pair decides compatibility depends on the embedding: when the
    region jointly visible to the outer outcomes lies inside the middle
    outcome's future, relations sourced at the middle outcome alone and
    targeting both outer outcomes are exempt (condition pair 1 and relaxed);
    otherwise the strict pair (1 and no-outcome-sourced) applies.
    """
    roles.validate_on(model)
    if roles.parties != 3:
        raise ArgumentError("three-party roles required")
    (a, b, c), (x, y, z) = roles.settings, roles.outcomes
    ex, ez, eb = embedding.event(x), embedding.event(z), embedding.event(b)
    if not contain_two_in_one(ex, ez, eb):
        raise ConfigurationError(
            "embedding is not a jamming layout: the middle setting must see "
            "the joint future of the outer outcomes")
    ns = check_ns3_relaxed(model.observed_distribution(), roles)
    outcomes = frozenset(roles.outcomes)
    verdicts = enumerate_affects(model, restrict_sources=outcomes)
    offending = _outcome_sourced(verdicts, outcomes)

    def exempt(v: AffectsVerdict) -> bool:
        return v.relation.sources == (y,) and {x, z} <= set(v.relation.targets)

    only_exempt = all(exempt(v) for v in offending)
    covers = embedding.future_contained([x, z], [y]) == TRUE
    return TripartiteConditions(ns.holds, not offending, only_exempt, covers,
                                tuple(v.relation.describe() for v in offending))


class LoopVerdict(NamedTuple):
    forced_cyclic: bool | None
    witness_order: PartialOrder | None
    constraints: tuple[PathConstraint, ...]
    steps: int

    def to_jsonable(self) -> dict:
        order = None
        if self.witness_order is not None:
            order = sorted(list(p) for p in self.witness_order.pairs)
        return {"forced_cyclic": self.forced_cyclic,
                "witness_order": order,
                "constraints": [{"kind": c.kind, "sources": list(c.sources),
                                 "targets": list(c.targets)} for c in self.constraints],
                "steps": self.steps}


def _choice_lists(constraints: Iterable[PathConstraint]) -> tuple[list[list[tuple[str, str]]], set[str]]:
    nodes: set[str] = set()
    seen: set[tuple[tuple[str, str], ...]] = set()
    lists: list[list[tuple[str, str]]] = []

    def push(options: list[tuple[str, str]]) -> None:
        key = tuple(sorted(options))
        if key not in seen:
            seen.add(key)
            lists.append(options)

    for c in constraints:
        nodes.update(c.sources)
        nodes.update(c.targets)
        if c.kind == "existential":
            push([(s, t) for s in c.sources for t in c.targets if s != t])
        elif c.kind == "universal_source":
            for s in c.sources:
                push([(s, t) for t in c.targets if t != s])
        else:
            raise ArgumentError(f"unknown constraint kind {c.kind!r}")
    return lists, nodes


def affects_loop_certificate(verdicts_or_constraints: Iterable, *,
                             max_nodes: int = DEFAULT_LOOP_NODE_CAP,
                             step_budget: int = DEFAULT_STEP_BUDGET) -> LoopVerdict:
    """Can any strict partial order satisfy every reach constraint?

    Satisfying orders correspond exactly to cycle-free selections of one
    forced arc per constraint, so the search backtracks over those
    selections.  No selection means the relations certify a cycle.
    An exhausted step budget leaves the question open (forced_cyclic None).
    """
    items = list(verdicts_or_constraints)
    if items and isinstance(items[0], AffectsVerdict):
        constraints = tuple(causation_constraints(items))
    else:
        constraints = tuple(items)
    lists, nodes = _choice_lists(constraints)
    if len(nodes) > max_nodes:
        raise ResourceError(
            f"{len(nodes)} nodes exceed the loop-search cap {max_nodes}")
    if any(not options for options in lists):
        return LoopVerdict(True, None, constraints, 0)
    lists.sort(key=len)

    arcs: set[tuple[str, str]] = set()
    counts: dict[tuple[str, str], int] = {}
    steps = 0

    def reaches(frm: str, to: str) -> bool:
        seen = {frm}
        stack = [frm]
        while stack:
            cur = stack.pop()
            if cur == to:
                return True
            for u, v in arcs:
                if u == cur and v not in seen:
                    seen.add(v)
                    stack.append(v)
        return False

    # Iterative backtracking over one forced arc per constraint.  A level
    # already satisfied by chosen arcs is skipped outright: arcs only grow
    # deeper in the branch, so the constraint stays satisfied and no
    # solution is lost.  Frames record the option index to resume from.
    frames: list[tuple[int, tuple[str, str]] | None] = []
    i = 0
    resume = 0
    out_of_budget = False
    satisfiable = None
    while True:
        if i == len(lists):
            satisfiable = True
            break
        chosen = None
        if resume == 0 and any(a in arcs for a in lists[i]):
            frames.append(None)
            i += 1
            continue
        for k in range(resume, len(lists[i])):
            arc = lists[i][k]
            steps += 1
            if steps > step_budget:
                out_of_budget = True
                break
            if arc not in arcs and reaches(arc[1], arc[0]):
                continue  # would close a directed cycle
            chosen = (k, arc)
            break
        if out_of_budget:
            break
        if chosen is None:
            while frames:
                top = frames.pop()
                i -= 1
                if top is None:
                    continue
                k, arc = top
                counts[arc] -= 1
                if counts[arc] == 0:
                    arcs.discard(arc)
                resume = k + 1
                break
            else:
                satisfiable = False
                break
            continue
        k, arc = chosen
        counts[arc] = counts.get(arc, 0) + 1
        arcs.add(arc)
        frames.append((k, arc))
        i += 1
        resume = 0

    if out_of_budget:
        return LoopVerdict(None, None, constraints, steps)
    if not satisfiable:
        return LoopVerdict(True, None, constraints, steps)
    order = PartialOrder(nodes, set(arcs))
    return LoopVerdict(False, order, constraints, steps)


def certify_hidden_loop(cyclic_model: CausalModel, acyclic_witness: CausalModel, *,
                        max_nodes: int = 7) -> bool:
    """Witness check: the acyclic model reproduces the cyclic one exactly,
    both in observed statistics and in every influence relation."""
    if cyclic_model.graph.is_acyclic():
        raise ArgumentError("first model must contain a directed cycle")
    if not acyclic_witness.graph.is_acyclic():
        raise ArgumentError("witness model must be acyclic")
    if cyclic_model.graph.observed != acyclic_witness.graph.observed:
        return False
    for n in sorted(cyclic_model.graph.observed):
        if tuple(cyclic_model.alphabets[n]) != tuple(acyclic_witness.alphabets[n]):
            return False
    if not cyclic_model.observed_distribution().same_table(
            acyclic_witness.observed_distribution()):
        return False
    a = enumerate_affects(cyclic_model, include_conditional=True, max_nodes=max_nodes)
    b = enumerate_affects(acyclic_witness, include_conditional=True, max_nodes=max_nodes)
    flat_a = {v.relation: v.holds for v in a}
    flat_b = {v.relation: v.holds for v in b}
    return flat_a == flat_b
