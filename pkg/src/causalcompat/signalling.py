"""No-signalling conditions on measurement-scenario correlations.

Checks run on plain distributions so externally produced tables (quantum,
nonlocal-box) work without mechanisms.  Every clause compares a conditional
target table against the same table with part of the conditioning dropped;
witnesses record the value combination and both probabilities.

For models whose settings are parentless with full support, each clause is
equivalent to the failure of one influence relation whose sources and do-set
are settings; verify_ns_affects_equivalence evaluates both sides and reports
clause-by-clause agreement.
"""

from __future__ import annotations

import itertools
from typing import NamedTuple, Sequence

from .affects import ho_affects
from .dist import Distribution, numbers_close, render_number
from .errors import ArgumentError
from .models import CausalModel

NS2 = "ns2"
NS3 = "ns3"
NS3_RELAXED = "ns3_relaxed"


class BellRoles(NamedTuple):
    settings: tuple[str, ...]
    outcomes: tuple[str, ...]
    common_cause: str | None = None

    @property
    def parties(self) -> int:
        return len(self.settings)

    def validate_shape(self) -> None:
        if len(self.settings) != len(self.outcomes):
            raise ArgumentError("one setting per outcome required")
        if self.parties not in (2, 3):
            raise ArgumentError(f"two or three parties supported, got {self.parties}")
        names = list(self.settings) + list(self.outcomes)
        if self.common_cause is not None:
            names.append(self.common_cause)
        if len(set(names)) != len(names):
            raise ArgumentError("role variables must be distinct")

    def validate_on(self, model: CausalModel) -> None:
        """Scenario shape on a model: settings parentless with full support,
        roles observed, common cause parentless and feeding an outcome."""
        self.validate_shape()
        g = model.graph
        for n in itertools.chain(self.settings, self.outcomes):
            if n not in g:
                raise ArgumentError(f"role variable {n!r} is not a model node")
            if n not in g.observed:
                raise ArgumentError(f"role variable {n!r} must be observed")
        for s in self.settings:
            if g.parents(s):
                raise ArgumentError(f"setting {s!r} must be parentless (freely chosen)")
            if model.kind == "mechanism" and set(model.laws[s].support()) != set(model.alphabets[s]):
                raise ArgumentError(f"setting {s!r} needs full support")
        lam = self.common_cause
        if lam is not None:
            if lam not in g:
                raise ArgumentError(f"common cause {lam!r} is not a model node")
            if g.parents(lam):
                raise ArgumentError(f"common cause {lam!r} must be parentless")
            if not set(g.descendants(lam)) & set(self.outcomes):
                raise ArgumentError(f"common cause {lam!r} feeds no outcome")

    def require_in_scope(self, dist: Distribution) -> None:
        missing = [n for n in itertools.chain(self.settings, self.outcomes)
                   if n not in dist.alphabets]
        if missing:
            raise ArgumentError(f"distribution lacks role variables: {missing}")


class ClauseReport(NamedTuple):
    name: str
    targets: tuple[str, ...]
    condition: tuple[str, ...]
    reduced_condition: tuple[str, ...]
    holds: bool
    witnesses: tuple[dict, ...]
    derived: bool = False

    def to_jsonable(self) -> dict:
        return {
            "name": self.name,
            "targets": list(self.targets),
            "condition": list(self.condition),
            "reduced_condition": list(self.reduced_condition),
            "holds": self.holds,
            "witnesses": list(self.witnesses),
            "derived": self.derived,
        }


class NSReport(NamedTuple):
    kind: str
    holds: bool
    clauses: tuple[ClauseReport, ...]

    def to_jsonable(self) -> dict:
        return {"kind": self.kind, "holds": self.holds,
                "clauses": [c.to_jsonable() for c in self.clauses]}


def _clause(dist: Distribution, targets: Sequence[str], condition: Sequence[str],
            reduced: Sequence[str], *, derived: bool = False) -> ClauseReport:
    targets = tuple(sorted(targets))
    condition = tuple(sorted(condition))
    reduced = tuple(sorted(reduced))
    name = "P({} | {}) = P({} | {})".format(
        " ".join(targets), " ".join(condition), " ".join(targets), " ".join(reduced))
    tol = dist.tol
    witnesses: list[dict] = []
    for cv in itertools.product(*(dist.alphabets[v] for v in condition)):
        given_full = dict(zip(condition, cv))
        given_red = {v: given_full[v] for v in reduced}
        lhs = dist.conditional(targets, given_full)
        rhs = dist.conditional(targets, given_red)
        for key in itertools.product(*(dist.alphabets[v] for v in targets)):
            if not numbers_close(lhs.p(key), rhs.p(key), tol):
                witnesses.append({
                    "target_values": {v: str(x) for v, x in zip(targets, key)},
                    "condition_values": {v: str(x) for v, x in given_full.items()},
                    "reduced_values": {v: str(x) for v, x in given_red.items()},
                    "conditioned": render_number(lhs.p(key)),
                    "reduced": render_number(rhs.p(key)),
                })
    return ClauseReport(name, targets, condition, reduced,
                        not witnesses, tuple(witnesses), derived)


def check_ns2(dist: Distribution, roles: BellRoles) -> NSReport:
    roles.validate_shape()
    if roles.parties != 2:
        raise ArgumentError("two-party roles required")
    roles.require_in_scope(dist)
    (a, b), (x, y) = roles.settings, roles.outcomes
    clauses = (
        _clause(dist, (x,), (a, b), (a,)),
        _clause(dist, (y,), (a, b), (b,)),
    )
    return NSReport(NS2, all(c.holds for c in clauses), clauses)


def check_ns3(dist: Distribution, roles: BellRoles) -> NSReport:
    roles.validate_shape()
    if roles.parties != 3:
        raise ArgumentError("three-party roles required")
    roles.require_in_scope(dist)
    (a, b, c), (x, y, z) = roles.settings, roles.outcomes
    clauses = (
        _clause(dist, (x, y), (a, b, c), (a, b)),
        _clause(dist, (y, z), (a, b, c), (b, c)),
        _clause(dist, (x, z), (a, b, c), (a, c)),
    )
    return NSReport(NS3, all(c.holds for c in clauses), clauses)


def check_ns3_relaxed(dist: Distribution, roles: BellRoles) -> NSReport:
    """The relaxed tripartite conditions: the two pair clauses that keep the
    middle lab honest plus single-party clauses for the outer labs, with the
    implied middle-outcome independence reported as a derived clause."""
    roles.validate_shape()
    if roles.parties != 3:
        raise ArgumentError("three-party roles required")
    roles.require_in_scope(dist)
    (a, b, c), (x, y, z) = roles.settings, roles.outcomes
    main = (
        _clause(dist, (x, y), (a, b, c), (a, b)),
        _clause(dist, (y, z), (a, b, c), (b, c)),
        _clause(dist, (x,), (a, b, c), (a,)),
        _clause(dist, (z,), (a, b, c), (c,)),
    )
    derived = _clause(dist, (y,), (a, b, c), (b,), derived=True)
    return NSReport(NS3_RELAXED, all(c.holds for c in main), main + (derived,))


class JammingReport(NamedTuple):
    holds: bool
    relaxed: NSReport
    xz_clause: ClauseReport

    def to_jsonable(self) -> dict:
        return {"holds": self.holds, "relaxed": self.relaxed.to_jsonable(),
                "xz_clause": self.xz_clause.to_jsonable()}


def is_jamming(dist: Distribution, roles: BellRoles) -> JammingReport:
    """Relaxed conditions hold while the outer-pair clause fails: the middle
    setting steers the joint outer outcomes without touching either margin."""
    relaxed = check_ns3_relaxed(dist, roles)
    (a, b, c), (x, y, z) = roles.settings, roles.outcomes
    xz = _clause(dist, (x, z), (a, b, c), (a, c))
    return JammingReport(relaxed.holds and not xz.holds, relaxed, xz)


class EquivalenceEntry(NamedTuple):
    clause: ClauseReport
    sources: tuple[str, ...]
    targets: tuple[str, ...]
    do_set: tuple[str, ...]
    affects_holds: bool
    agree: bool

    def to_jsonable(self) -> dict:
        return {
            "clause": self.clause.to_jsonable(),
            "relation": {"sources": list(self.sources), "targets": list(self.targets),
                         "do_set": list(self.do_set)},
            "affects_holds": self.affects_holds,
            "agree": self.agree,
        }


class EquivalenceReport(NamedTuple):
    holds: bool
    entries: tuple[EquivalenceEntry, ...]

    def to_jsonable(self) -> dict:
        return {"holds": self.holds, "entries": [e.to_jsonable() for e in self.entries]}


def verify_ns_affects_equivalence(model: CausalModel, roles: BellRoles) -> EquivalenceReport:
    """Each no-signalling clause should hold exactly when the matching
    influence relation (sources and do-set drawn from the settings) fails."""
    roles.validate_on(model)
    dist = model.observed_distribution()
    if roles.parties == 2:
        (a, b), (x, y) = roles.settings, roles.outcomes
        report = check_ns2(dist, roles)
        pairs = [
            (report.clauses[0], (b,), (x,), (a,)),
            (report.clauses[1], (a,), (y,), (b,)),
        ]
    else:
        (a, b, c), (x, y, z) = roles.settings, roles.outcomes
        report = check_ns3_relaxed(dist, roles)
        xz = _clause(dist, (x, z), (a, b, c), (a, c))
        pairs = [
            (report.clauses[0], (c,), (x, y), (a, b)),
            (report.clauses[1], (a,), (y, z), (b, c)),
            (report.clauses[2], (b, c), (x,), (a,)),
            (report.clauses[3], (a, b), (z,), (c,)),
            (report.clauses[4], (a, c), (y,), (b,)),  # derived clause
            (xz, (b,), (x, z), (a, c)),
        ]
    entries = []
    for clause, sources, targets, do_set in pairs:
        verdict = ho_affects(model, sources, targets, do_set)
        entries.append(EquivalenceEntry(clause, tuple(sorted(sources)),
                                        tuple(sorted(targets)), tuple(sorted(do_set)),
                                        verdict.holds, clause.holds == (not verdict.holds)))
    return EquivalenceReport(all(e.agree for e in entries), tuple(entries))
