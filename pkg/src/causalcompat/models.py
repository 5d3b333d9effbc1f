"""Causal models over finite alphabets.

Two kinds:

* mechanism models: every parentless node carries an exogenous law, every
  other node a total lookup-table mechanism.  Cyclic graphs are solved by
  per-exogenous-assignment fixed-point enumeration, SCC by SCC.  Two modes
  for non-unique fixed points: 'unique' (error unless exactly one) and
  'uniform' (uniform weight over the fixed points; error when none).
* table models: an observed joint plus user-supplied interventional tables.
  Nothing is invented: intervening on a set without a table is an error.

Interventions replace the target's incoming edges and pin its value; on
mechanism models the pinned node simply becomes exogenous with a point law.
"""

from __future__ import annotations

import itertools
from fractions import Fraction
from typing import Mapping, NamedTuple, Sequence

from .dist import Distribution, DsepPropertyReport, dsep_property_holds
from .errors import (ArgumentError, SolveError, UnsupportedInterventionError)
from .graphs import CausalGraph

MODE_UNIQUE = "unique"
MODE_UNIFORM = "uniform"


class Mechanism:
    """Total lookup table: parent assignment (in declared parent order) -> value."""

    def __init__(self, node: str, parents: Sequence[str], table: Mapping[tuple, object]):
        self.node = node
        self.parents = tuple(parents)
        if len(set(self.parents)) != len(self.parents):
            raise ArgumentError(f"mechanism for {node}: repeated parent")
        self.table = dict(table)

    def value(self, assignment: Mapping[str, object]):
        return self.table[tuple(assignment[p] for p in self.parents)]


class ExogenousLaw:
    def __init__(self, node: str, probs: Mapping[object, Fraction]):
        self.node = node
        self.probs = {v: Fraction(p) for v, p in probs.items()}
        if any(p < 0 for p in self.probs.values()):
            raise ArgumentError(f"law for {node}: negative probability")
        if sum(self.probs.values()) != 1:
            raise ArgumentError(f"law for {node}: probabilities must sum to 1")

    def support(self):
        return [v for v, p in self.probs.items() if p > 0]


class CausalModel:
    def __init__(self, graph: CausalGraph, alphabets: Mapping[str, Sequence[object]], *,
                 mechanisms: Mapping[str, Mechanism] | None = None,
                 laws: Mapping[str, ExogenousLaw] | None = None,
                 mode: str = MODE_UNIQUE,
                 observed_table: Distribution | None = None,
                 interventional: Mapping[frozenset, Mapping[tuple, Distribution]] | None = None):
        self.graph = graph
        self.alphabets = {n: tuple(alphabets[n]) for n in graph.nodes}
        if set(alphabets) != set(graph.nodes):
            raise ArgumentError("alphabets must cover exactly the graph nodes")
        for n, alpha in self.alphabets.items():
            if not alpha or len(set(alpha)) != len(alpha):
                raise ArgumentError(f"alphabet of {n} must be non-empty without repeats")
        if mode not in (MODE_UNIQUE, MODE_UNIFORM):
            raise ArgumentError(f"unknown solution mode {mode!r}")
        self.mode = mode
        self._joint_cache: Distribution | None = None

        if observed_table is None:
            self.kind = "mechanism"
            self.mechanisms = dict(mechanisms or {})
            self.laws = dict(laws or {})
            self.observed_table = None
            self.interventional = {}
            self._check_mechanism_closure()
        else:
            self.kind = "table"
            self.mechanisms = {}
            self.laws = {}
            if set(observed_table.scope) != set(graph.observed):
                raise ArgumentError("observed table scope must equal the observed nodes")
            for v in observed_table.scope:
                if tuple(observed_table.alphabets[v]) != self.alphabets[v]:
                    raise ArgumentError(f"observed table alphabet mismatch on {v}")
            self.observed_table = observed_table
            self.interventional = {frozenset(k): dict(v) for k, v in (interventional or {}).items()}
            self._check_tables()

    # -- validation of the pieces ----------------------------------------

    def _check_mechanism_closure(self) -> None:
        for n in self.graph.nodes:
            ps = self.graph.parents(n)
            if not ps:
                if n not in self.laws:
                    raise ArgumentError(f"parentless node {n} needs an exogenous law")
                if n in self.mechanisms:
                    raise ArgumentError(f"parentless node {n} cannot carry a mechanism")
                bad = set(self.laws[n].probs) - set(self.alphabets[n])
                if bad:
                    raise ArgumentError(f"law for {n} uses values outside its alphabet: {sorted(map(repr, bad))}")
            else:
                if n not in self.mechanisms:
                    raise ArgumentError(f"node {n} with parents needs a mechanism")
                if n in self.laws:
                    raise ArgumentError(f"node {n} with parents cannot carry a law")
                mech = self.mechanisms[n]
                if set(mech.parents) != set(ps):
                    raise ArgumentError(
                        f"mechanism for {n} declares parents {sorted(mech.parents)}, graph has {sorted(ps)}")
                expected = set(itertools.product(*(self.alphabets[p] for p in mech.parents)))
                got = set(mech.table)
                if got != expected:
                    raise ArgumentError(f"mechanism table for {n} is not total over the parent alphabets")
                for key, val in mech.table.items():
                    if val not in self.alphabets[n]:
                        raise ArgumentError(f"mechanism for {n} emits {val!r} outside its alphabet at {key}")
        extra = set(self.mechanisms) - set(self.graph.nodes)
        extra |= set(self.laws) - set(self.graph.nodes)
        if extra:
            raise ArgumentError(f"mechanism/law for unknown node: {sorted(extra)}")

    def _check_tables(self) -> None:
        rest_alpha = dict(self.alphabets)
        for targets, per_value in self.interventional.items():
            tsorted = tuple(sorted(targets))
            if not set(targets) <= set(self.graph.observed):
                raise ArgumentError(f"interventional table targets unobserved nodes: {tsorted}")
            expected = set(itertools.product(*(self.alphabets[t] for t in tsorted)))
            if set(per_value) != expected:
                raise ArgumentError(f"interventional table for {tsorted} must cover every value combination")
            rest = sorted(set(self.graph.observed) - targets)
            for v, d in per_value.items():
                if list(d.scope) != rest:
                    raise ArgumentError(f"table for do({tsorted}={v}) must range over {rest}")

    # -- semantics ---------------------------------------------------------

    def exogenous_nodes(self) -> tuple[str, ...]:
        return tuple(n for n in self.graph.nodes if not self.graph.parents(n))

    def solve_joint(self) -> Distribution:
        """Joint over every node (mechanism models only)."""
        if self.kind != "mechanism":
            raise ArgumentError("solve_joint applies to mechanism models")
        if self._joint_cache is not None:
            return self._joint_cache
        exo = self.exogenous_nodes()
        sccs = [c for c in self.graph.topological_sccs() if c[0] not in exo]
        scope = tuple(sorted(self.graph.nodes))
        weights: dict[tuple, Fraction] = {}
        for combo in itertools.product(*(self.laws[n].support() for n in exo)):
            w = Fraction(1)
            for n, v in zip(exo, combo):
                w *= self.laws[n].probs[v]
            base = dict(zip(exo, combo))
            points = self._fixed_points(base, sccs)
            if self.mode == MODE_UNIQUE:
                if len(points) != 1:
                    raise SolveError(
                        f"expected a unique fixed point for exogenous assignment "
                        f"{dict(sorted(base.items()))}, found {len(points)}")
            elif not points:
                raise SolveError(
                    f"no fixed point for exogenous assignment {dict(sorted(base.items()))}")
            share = w / len(points)
            for full in points:
                key = tuple(full[v] for v in scope)
                weights[key] = weights.get(key, Fraction(0)) + share
        self._joint_cache = Distribution({n: self.alphabets[n] for n in scope}, weights, check=False)
        return self._joint_cache

    def _fixed_points(self, base: dict, sccs: list[tuple[str, ...]]) -> list[dict]:
        partials = [dict(base)]
        for comp in sccs:
            nxt: list[dict] = []
            if len(comp) == 1:
                n = comp[0]
                mech = self.mechanisms[n]
                for partial in partials:
                    partial[n] = mech.value(partial)
                    nxt.append(partial)
            else:
                for partial in partials:
                    for combo in itertools.product(*(self.alphabets[n] for n in comp)):
                        trial = dict(partial)
                        trial.update(zip(comp, combo))
                        if all(self.mechanisms[n].value(trial) == trial[n] for n in comp):
                            nxt.append(trial)
            partials = nxt
            if not partials:
                break
        return partials

    def observed_distribution(self) -> Distribution:
        if self.kind == "table":
            return self.observed_table
        return self.solve_joint().marginal(self.graph.observed)

    def intervene(self, assignment: Mapping[str, object]) -> "CausalModel":
        """do(assignment): cut incoming edges and pin values."""
        if not assignment:
            return self
        for n, v in assignment.items():
            if n not in self.graph:
                raise ArgumentError(f"unknown node {n!r}")
            if v not in self.alphabets[n]:
                raise ArgumentError(f"value {v!r} outside the alphabet of {n}")
        new_graph = self.graph.do(assignment.keys())
        if self.kind == "mechanism":
            mechs = {n: m for n, m in self.mechanisms.items() if n not in assignment}
            laws = {n: l for n, l in self.laws.items() if n not in assignment}
            for n, v in assignment.items():
                laws[n] = ExogenousLaw(n, {v: Fraction(1)})
            return CausalModel(new_graph, self.alphabets, mechanisms=mechs, laws=laws, mode=self.mode)
        targets = frozenset(assignment)
        if targets not in self.interventional:
            raise UnsupportedInterventionError(
                f"no interventional table for do({sorted(targets)})")
        key = tuple(assignment[t] for t in sorted(targets))
        rest = self.interventional[targets][key]
        pinned = rest
        for t in sorted(targets):
            pinned = pinned.extend_constant(t, assignment[t], self.alphabets[t])
        return CausalModel(new_graph, self.alphabets, observed_table=pinned, interventional={})


class ValidationReport(NamedTuple):
    holds: bool
    dsep: DsepPropertyReport
    consistency_witnesses: list
    consistency_checked: int


def validate(model: CausalModel, *, max_exhaustive: int = 5, sample: int = 60,
             seed: int = 11) -> ValidationReport:
    """Causal-model validity: (i) d-separations among observed sets imply
    conditional independence; (ii) intervening on a set that is already
    parentless (after other interventions) matches conditioning on it.

    Witnesses are returned, not summarized away.
    """
    import random

    obs_dist = model.observed_distribution()
    dsep = dsep_property_holds(model.graph, obs_dist, max_exhaustive=max_exhaustive)

    observed = tuple(sorted(model.graph.observed))
    pairs: list[tuple[tuple, tuple]] = []
    for combo in itertools.product(("x", "y", "-"), repeat=len(observed)):
        x = tuple(n for n, r in zip(observed, combo) if r == "x")
        y = tuple(n for n, r in zip(observed, combo) if r == "y")
        if x:
            pairs.append((x, y))
    if len(observed) > max_exhaustive:
        rng = random.Random(seed)
        pairs = rng.sample(pairs, min(sample, len(pairs)))

    witnesses = []
    checked = 0
    for x, y in pairs:
        try:
            do_y_graph = model.graph.do(y)
        except ArgumentError:
            continue
        if any(do_y_graph.parents(n) for n in x):
            continue  # clause applies only when x is parentless after do(y)
        rest = tuple(n for n in observed if n not in x and n not in y)
        for yv in itertools.product(*(model.alphabets[n] for n in y)):
            try:
                after_y = model.intervene(dict(zip(y, yv)))
            except UnsupportedInterventionError:
                continue
            dist_y = after_y.observed_distribution()
            for xv in itertools.product(*(model.alphabets[n] for n in x)):
                evt = dict(zip(x, xv))
                if dist_y.prob_of(evt) == 0:
                    continue
                checked += 1
                try:
                    both = model.intervene(dict(zip(y, yv)) | evt)
                except UnsupportedInterventionError:
                    continue
                lhs = both.observed_distribution()
                if rest:
                    lhs_rest = lhs.marginal(rest)
                    rhs_rest = dist_y.conditional(rest, evt)
                    if not lhs_rest.same_table(rhs_rest):
                        witnesses.append({"pin_set": list(x), "do_set": list(y),
                                          "pin_values": list(xv), "do_values": list(yv)})
    ok = dsep.holds and not witnesses
    return ValidationReport(ok, dsep, witnesses, checked)
