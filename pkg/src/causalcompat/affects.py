"""Interventionist influence relations.

"X affects Y given {do(Z), W}" holds when pinning X (on top of pinning Z)
changes the conditional target distribution given the post-selection W for
at least one value combination.  Unconditional and do-only forms are the
W = {} / Z = {} special cases.  Comparisons where either side conditions on
a zero-probability event are skipped and reported in the verdict
diagnostics instead of silently dropped.

Irreducibility: every proper non-empty source subset still affects the
target once the removed sources are absorbed into the do-set.  Reducible
relations shrink deterministically: scan candidate subsets in (size,
lexicographic) order and drop the first subset whose absorbed form fails;
the remaining sources keep the original do-set.

A mechanism-model fast path skips solving when the sources cannot reach the
targets in the intervened graph.  That is sound when fixed points are
unique, and in uniform mode when every cycle lies inside the targets'
ancestral closure (outside it, fixed-point multiplicities could otherwise
reweight the target marginal).
"""

from __future__ import annotations

import itertools
import weakref
from typing import Iterable, Mapping, NamedTuple

from .dist import Distribution
from .errors import ArgumentError, ResourceError
from .graphs import CausalGraph
from .models import MODE_UNIQUE, CausalModel

DEFAULT_ENUM_CAP = 7

ROLE_SOURCE = "x"
ROLE_TARGET = "y"
ROLE_DO = "z"
ROLE_GIVEN = "w"
ROLE_OUT = "-"


class AffectsRelation(NamedTuple):
    sources: tuple[str, ...]
    targets: tuple[str, ...]
    do_set: tuple[str, ...] = ()
    given: tuple[str, ...] = ()

    def describe(self) -> str:
        s = " ".join(self.sources)
        t = " ".join(self.targets)
        extras = []
        if self.do_set:
            extras.append("do(" + " ".join(self.do_set) + ")")
        if self.given:
            extras.append("given " + " ".join(self.given))
        tail = (" " + ", ".join(extras)) if extras else ""
        return f"{s} affects {t}{tail}"


class AffectsVerdict(NamedTuple):
    relation: AffectsRelation
    holds: bool
    witness: dict | None = None
    irreducible: bool | None = None
    skipped: tuple = ()

    def to_jsonable(self) -> dict:
        out = {
            "relation": {
                "sources": list(self.relation.sources),
                "targets": list(self.relation.targets),
                "do_set": list(self.relation.do_set),
                "given": list(self.relation.given),
            },
            "text": self.relation.describe(),
            "holds": self.holds,
        }
        if self.witness is not None:
            out["witness"] = self.witness
        if self.irreducible is not None:
            out["irreducible"] = self.irreducible
        if self.skipped:
            out["skipped_zero_probability"] = list(self.skipped)
        return out


class PathConstraint(NamedTuple):
    kind: str  # 'existential' or 'universal_source'
    sources: tuple[str, ...]
    targets: tuple[str, ...]


def make_relation(model_or_graph, sources: Iterable[str], targets: Iterable[str],
                  do_set: Iterable[str] = (), given: Iterable[str] = ()) -> AffectsRelation:
    graph = model_or_graph.graph if isinstance(model_or_graph, CausalModel) else model_or_graph
    x = tuple(sorted(set(sources)))
    y = tuple(sorted(set(targets)))
    z = tuple(sorted(set(do_set)))
    w = tuple(sorted(set(given)))
    if not x or not y:
        raise ArgumentError("sources and targets must be non-empty")
    groups = [x, y, z, w]
    for i, a in enumerate(groups):
        for b in groups[i + 1:]:
            if set(a) & set(b):
                raise ArgumentError(f"relation sets overlap: {set(a) & set(b)}")
    for n in itertools.chain(x, y, z, w):
        if n not in graph:
            raise ArgumentError(f"unknown node {n!r}")
        if n not in graph.observed:
            raise ArgumentError(f"relation uses unobserved node {n!r}")
    return AffectsRelation(x, y, z, w)


class AffectsEngine:
    """Per-model evaluation cache: intervened joints and their conditionals."""

    def __init__(self, model: CausalModel):
        self.model = model
        self._joint: dict[tuple, Distribution] = {}
        self._cond: dict[tuple, Distribution | None] = {}
        self._dograph: dict[frozenset, CausalGraph] = {}

    # -- cached primitives -------------------------------------------------

    def joint(self, assignment: Mapping[str, object]) -> Distribution:
        key = tuple(sorted(assignment.items()))
        if key not in self._joint:
            self._joint[key] = self.model.intervene(dict(assignment)).observed_distribution()
        return self._joint[key]

    def target_dist(self, assignment: Mapping[str, object], targets: tuple[str, ...],
                    given: Mapping[str, object]) -> Distribution | None:
        """Conditional target marginal in the intervened model; None when the
        post-selection event has probability zero."""
        akey = tuple(sorted(assignment.items()))
        gkey = tuple(sorted(given.items()))
        ckey = (akey, targets, gkey)
        if ckey not in self._cond:
            joint = self.joint(assignment)
            if not given:
                self._cond[ckey] = joint.marginal(targets)
            else:
                ev = joint.prob_of(dict(given))
                if (joint.is_exact and ev == 0) or (not joint.is_exact and abs(ev) <= joint.tol):
                    self._cond[ckey] = None
                else:
                    self._cond[ckey] = joint.conditional(targets, dict(given))
        return self._cond[ckey]

    def _intervened_graph(self, pinned: frozenset) -> CausalGraph:
        if pinned not in self._dograph:
            self._dograph[pinned] = self.model.graph.do(pinned)
        return self._dograph[pinned]

    def _cannot_reach(self, relation: AffectsRelation) -> bool:
        """Structural fast path; see module docstring for the soundness rule."""
        if self.model.kind != "mechanism":
            return False
        pinned = frozenset(relation.sources) | frozenset(relation.do_set)
        graph = self._intervened_graph(pinned)
        targets = set(relation.targets) | set(relation.given)
        closure = graph.ancestral_closure(targets)
        if set(relation.sources) & closure:
            return False
        if self.model.mode != MODE_UNIQUE:
            for comp in graph.topological_sccs():
                if len(comp) > 1 and not set(comp) <= closure:
                    return False
        return True

    # -- the relation itself -----------------------------------------------

    def evaluate(self, relation: AffectsRelation) -> AffectsVerdict:
        x, y, z, w = relation
        if self._cannot_reach(relation):
            return AffectsVerdict(relation, False)
        alphabets = self.model.alphabets
        skipped: list[dict] = []
        for zv in itertools.product(*(alphabets[n] for n in z)):
            base_assignment = dict(zip(z, zv))
            for xv in itertools.product(*(alphabets[n] for n in x)):
                with_assignment = dict(base_assignment)
                with_assignment.update(zip(x, xv))
                for wv in itertools.product(*(alphabets[n] for n in w)):
                    given = dict(zip(w, wv))
                    lhs = self.target_dist(with_assignment, y, given)
                    rhs = self.target_dist(base_assignment, y, given)
                    if lhs is None or rhs is None:
                        side = []
                        if lhs is None:
                            side.append("with_intervention")
                        if rhs is None:
                            side.append("without_intervention")
                        skipped.append({
                            "source_values": {n: str(v) for n, v in zip(x, xv)},
                            "do_values": {n: str(v) for n, v in zip(z, zv)},
                            "given_values": {n: str(v) for n, v in zip(w, wv)},
                            "zero_probability_side": side,
                        })
                        continue
                    if not lhs.same_table(rhs):
                        witness = {
                            "source_values": {n: str(v) for n, v in zip(x, xv)},
                            "do_values": {n: str(v) for n, v in zip(z, zv)},
                            "given_values": {n: str(v) for n, v in zip(w, wv)},
                            "with_intervention": lhs.to_jsonable(),
                            "without_intervention": rhs.to_jsonable(),
                        }
                        return AffectsVerdict(relation, True, witness, None, tuple(skipped))
        return AffectsVerdict(relation, False, None, None, tuple(skipped))


_engines: "weakref.WeakKeyDictionary[CausalModel, AffectsEngine]" = weakref.WeakKeyDictionary()


def engine_for(model: CausalModel) -> AffectsEngine:
    eng = _engines.get(model)
    if eng is None:
        eng = AffectsEngine(model)
        _engines[model] = eng
    return eng


# -- public operations ------------------------------------------------------

def cond_affects(model: CausalModel, sources, targets, do_set=(), given=()) -> AffectsVerdict:
    relation = make_relation(model, sources, targets, do_set, given)
    return engine_for(model).evaluate(relation)


def ho_affects(model: CausalModel, sources, targets, do_set=()) -> AffectsVerdict:
    return cond_affects(model, sources, targets, do_set, ())


def affects(model: CausalModel, sources, targets) -> AffectsVerdict:
    return cond_affects(model, sources, targets, (), ())


def _proper_subsets(xs: tuple[str, ...]):
    """Non-empty proper subsets in (size, lexicographic) order."""
    for size in range(1, len(xs)):
        yield from itertools.combinations(xs, size)


def is_irreducible(model: CausalModel, relation: AffectsRelation) -> bool:
    verdict = engine_for(model).evaluate(relation)
    if not verdict.holds:
        raise ArgumentError(f"relation does not hold: {relation.describe()}")
    x, y, z, w = relation
    for sub in _proper_subsets(x):
        absorbed = tuple(sorted(set(z) | (set(x) - set(sub))))
        part = AffectsRelation(sub, y, absorbed, w)
        if not engine_for(model).evaluate(part).holds:
            return False
    return True


def reduce_relation(model: CausalModel, relation: AffectsRelation) -> AffectsRelation:
    """Shrink a reducible holding relation to an irreducible one (same
    targets, do-set and post-selection)."""
    verdict = engine_for(model).evaluate(relation)
    if not verdict.holds:
        raise ArgumentError(f"relation does not hold: {relation.describe()}")
    if is_irreducible(model, relation):
        raise ArgumentError(f"relation is already irreducible: {relation.describe()}")
    x, y, z, w = relation
    current = relation
    shrunk = True
    while shrunk and len(current.sources) > 1:
        shrunk = False
        x = current.sources
        for sub in _proper_subsets(x):
            absorbed = tuple(sorted(set(current.do_set) | (set(x) - set(sub))))
            if not engine_for(model).evaluate(AffectsRelation(sub, y, absorbed, w)).holds:
                candidate = AffectsRelation(tuple(sorted(set(x) - set(sub))), y, current.do_set, w)
                if engine_for(model).evaluate(candidate).holds:
                    current = candidate
                    shrunk = True
                    break
    return current


def enumerate_affects(model: CausalModel, *, include_conditional: bool = False,
                      max_nodes: int = DEFAULT_ENUM_CAP,
                      decide_irreducible: bool = False,
                      restrict_sources: Iterable[str] | None = None) -> list[AffectsVerdict]:
    """Every relation signature over the observed nodes, evaluated.

    Signature counts follow inclusion-exclusion over role assignments
    (both endpoint sets non-empty); the conditional flag adds the W role.
    """
    observed = tuple(sorted(model.graph.observed))
    if len(observed) > max_nodes:
        raise ResourceError(
            f"{len(observed)} observed nodes exceeds the cap {max_nodes}; pass max_nodes explicitly")
    allowed_sources = set(observed) if restrict_sources is None else set(restrict_sources)
    roles = (ROLE_SOURCE, ROLE_TARGET, ROLE_DO, ROLE_GIVEN, ROLE_OUT) if include_conditional \
        else (ROLE_SOURCE, ROLE_TARGET, ROLE_DO, ROLE_OUT)
    eng = engine_for(model)
    out: list[AffectsVerdict] = []
    for combo in itertools.product(roles, repeat=len(observed)):
        x = tuple(n for n, r in zip(observed, combo) if r == ROLE_SOURCE)
        y = tuple(n for n, r in zip(observed, combo) if r == ROLE_TARGET)
        z = tuple(n for n, r in zip(observed, combo) if r == ROLE_DO)
        w = tuple(n for n, r in zip(observed, combo) if r == ROLE_GIVEN)
        if not x or not y or not set(x) <= allowed_sources:
            continue
        verdict = eng.evaluate(AffectsRelation(x, y, z, w))
        if decide_irreducible and verdict.holds:
            verdict = verdict._replace(irreducible=is_irreducible(model, verdict.relation))
        out.append(verdict)
    return out


def causation_constraints(verdicts: Iterable[AffectsVerdict]) -> list[PathConstraint]:
    """Directed-path requirements forced by holding relations.

    A holding relation forces a path from some source into the combined
    target/post-selection set; an irreducible one forces a path from every
    source.  Only holding verdicts contribute.
    """
    out: list[PathConstraint] = []
    for v in verdicts:
        if not v.holds:
            continue
        targets = tuple(sorted(set(v.relation.targets) | set(v.relation.given)))
        out.append(PathConstraint("existential", v.relation.sources, targets))
        if v.irreducible:
            out.append(PathConstraint("universal_source", v.relation.sources, targets))
    return out


def classify_arrows(model: CausalModel) -> dict[tuple[str, str], str]:
    """observed->observed edges: solid when the tail affects the head."""
    out: dict[tuple[str, str], str] = {}
    for u, v in sorted(model.graph.edges):
        if u in model.graph.observed and v in model.graph.observed:
            out[(u, v)] = "solid" if affects(model, (u,), (v,)).holds else "dashed"
    return out
