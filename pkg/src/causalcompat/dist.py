"""Exact finite joint distributions.

Probabilities are Fractions whenever the input is rational; generators that
produce floats (the statevector route) get tolerance-based comparisons with
tol = 1e-9.  Tables are support-sparse: assignments absent from the table
have probability zero.  Scope order is always sorted node names, so equal
distributions serialize identically.
"""

from __future__ import annotations

import itertools
import random
from fractions import Fraction
from typing import Iterable, Mapping, NamedTuple, Sequence

from .errors import ArgumentError, ConditioningError

FLOAT_TOL = 1e-9

Value = object  # alphabet entries are small hashables (ints, occasionally strings)


def parse_number(text: str) -> Fraction:
    """'p/q' or decimal-free integer string -> Fraction."""
    try:
        return Fraction(text)
    except (ValueError, ZeroDivisionError) as exc:
        raise ArgumentError(f"bad rational {text!r}") from exc


def render_number(x) -> str:
    if isinstance(x, Fraction):
        return f"{x.numerator}/{x.denominator}" if x.denominator != 1 else str(x.numerator)
    if isinstance(x, int):
        return str(x)
    return repr(float(x))


def numbers_close(a, b, tol: float) -> bool:
    if tol == 0:
        return a == b
    return abs(a - b) <= tol


class Distribution:
    def __init__(self, alphabets: Mapping[str, Sequence[Value]],
                 probs: Mapping[tuple, object], *, check: bool = True):
        self.scope: tuple[str, ...] = tuple(sorted(alphabets))
        if len(self.scope) != len(alphabets):
            raise ArgumentError("duplicate variables in scope")
        self.alphabets: dict[str, tuple] = {v: tuple(alphabets[v]) for v in self.scope}
        for v, alpha in self.alphabets.items():
            if len(set(alpha)) != len(alpha) or not alpha:
                raise ArgumentError(f"alphabet of {v} must be non-empty without repeats")
        table: dict[tuple, object] = {}
        for key in sorted(probs, key=repr):
            p = probs[key]
            if isinstance(p, float) and p == 0.0:
                continue
            if p == 0:
                continue
            if len(key) != len(self.scope):
                raise ArgumentError(f"assignment {key} does not match scope {self.scope}")
            for v, val in zip(self.scope, key):
                if val not in self.alphabets[v]:
                    raise ArgumentError(f"value {val!r} outside alphabet of {v}")
            if (isinstance(p, Fraction) and p < 0) or (isinstance(p, float) and p < -FLOAT_TOL):
                raise ArgumentError(f"negative probability at {key}")
            table[key] = p
        self._p = table
        self.is_exact = all(isinstance(p, (Fraction, int)) for p in table.values())
        if check:
            total = sum(table.values())
            if self.is_exact:
                if total != 1:
                    raise ArgumentError(f"probabilities sum to {total}, not 1")
            elif abs(total - 1) > 1e-7:
                raise ArgumentError(f"probabilities sum to {total!r}, not 1")

    # -- plumbing ---------------------------------------------------------

    @property
    def tol(self) -> float:
        return 0.0 if self.is_exact else FLOAT_TOL

    def p(self, key: tuple) -> object:
        return self._p.get(key, Fraction(0) if self.is_exact else 0.0)

    def items(self):
        return iter(self._p.items())

    def support(self):
        return iter(self._p.keys())

    def prob_of(self, assignment: Mapping[str, Value]) -> object:
        """Probability of a partial assignment (marginal event)."""
        for v in assignment:
            if v not in self.alphabets:
                raise ArgumentError(f"{v} not in scope")
        total = Fraction(0) if self.is_exact else 0.0
        idx = {v: i for i, v in enumerate(self.scope)}
        for key, p in self._p.items():
            if all(key[idx[v]] == val for v, val in assignment.items()):
                total += p
        return total

    def assignments(self):
        """Every full assignment over the scope, zero entries included."""
        for combo in itertools.product(*(self.alphabets[v] for v in self.scope)):
            yield combo

    def __repr__(self) -> str:
        inner = ", ".join(f"{k}: {render_number(p)}" for k, p in sorted(self._p.items(), key=lambda kv: repr(kv[0])))
        return f"Distribution({self.scope}; {inner})"

    # -- algebra ----------------------------------------------------------

    def marginal(self, variables: Iterable[str]) -> "Distribution":
        vs = tuple(sorted(set(variables)))
        for v in vs:
            if v not in self.alphabets:
                raise ArgumentError(f"{v} not in scope")
        idxs = [self.scope.index(v) for v in vs]
        out: dict[tuple, object] = {}
        for key, p in self._p.items():
            sub = tuple(key[i] for i in idxs)
            out[sub] = out.get(sub, Fraction(0) if self.is_exact else 0.0) + p
        return Distribution({v: self.alphabets[v] for v in vs}, out, check=False)

    def conditional(self, targets: Iterable[str], given: Mapping[str, Value]) -> "Distribution":
        """P(targets | given).  Zero-probability evidence raises."""
        tset = tuple(sorted(set(targets)))
        if set(tset) & set(given):
            raise ArgumentError("targets overlap the evidence")
        norm = self.prob_of(given)
        if (self.is_exact and norm == 0) or (not self.is_exact and abs(norm) <= FLOAT_TOL):
            raise ConditioningError(f"conditioning event has probability zero: {dict(sorted(given.items()))}")
        idx = {v: i for i, v in enumerate(self.scope)}
        tidx = [idx[v] for v in tset]
        out: dict[tuple, object] = {}
        for key, p in self._p.items():
            if all(key[idx[v]] == val for v, val in given.items()):
                sub = tuple(key[i] for i in tidx)
                out[sub] = out.get(sub, Fraction(0) if self.is_exact else 0.0) + p
        return Distribution({v: self.alphabets[v] for v in tset},
                            {k: p / norm for k, p in out.items()}, check=False)

    def same_table(self, other: "Distribution", tol: float | None = None) -> bool:
        if self.scope != other.scope:
            raise ArgumentError(f"scope mismatch: {self.scope} vs {other.scope}")
        if tol is None:
            tol = max(self.tol, other.tol)
        keys = set(self._p) | set(other._p)
        return all(numbers_close(self.p(k), other.p(k), tol) for k in keys)

    def cond_indep(self, xs: Iterable[str], ys: Iterable[str], zs: Iterable[str] = ()) -> bool:
        """X independent of Y given Z, checked on every positive-probability
        z-assignment."""
        x, y, z = sorted(set(xs)), sorted(set(ys)), sorted(set(zs))
        if not x or not y:
            raise ArgumentError("independence needs non-empty X and Y")
        if set(x) & set(y) or set(x) & set(z) or set(y) & set(z):
            raise ArgumentError("independence sets must be pairwise disjoint")
        tol = self.tol
        z_support = [()] if not z else sorted(set(self.marginal(z).support()), key=repr)
        for zkey in z_support:
            given = dict(zip(z, zkey))
            joint = self.conditional(x + y, given)
            mx = joint.marginal(x)
            my = joint.marginal(y)
            for xk in mx.support():
                for yk in my.support():
                    full = dict(zip(x, xk))
                    full.update(zip(y, yk))
                    jkey = tuple(full[v] for v in joint.scope)
                    if not numbers_close(joint.p(jkey), mx.p(xk) * my.p(yk), tol):
                        return False
        return True

    # -- constructors -----------------------------------------------------

    @staticmethod
    def from_weights(alphabets: Mapping[str, Sequence[Value]],
                     weights: Mapping[tuple, object]) -> "Distribution":
        total = sum(weights.values())
        if total == 0:
            raise ArgumentError("all weights zero")
        return Distribution(alphabets, {k: Fraction(w, 1) / total if not isinstance(w, float) else w / total
                                        for k, w in weights.items()}, check=False)

    @staticmethod
    def uniform(alphabets: Mapping[str, Sequence[Value]]) -> "Distribution":
        keys = list(itertools.product(*(tuple(alphabets[v]) for v in sorted(alphabets))))
        p = Fraction(1, len(keys))
        return Distribution(alphabets, {k: p for k in keys}, check=False)

    @staticmethod
    def point_mass(alphabets: Mapping[str, Sequence[Value]],
                   assignment: Mapping[str, Value]) -> "Distribution":
        scope = tuple(sorted(alphabets))
        if set(assignment) != set(scope):
            raise ArgumentError("point mass needs a value for every variable")
        key = tuple(assignment[v] for v in scope)
        return Distribution(alphabets, {key: Fraction(1)}, check=False)

    def product(self, other: "Distribution") -> "Distribution":
        if set(self.scope) & set(other.scope):
            raise ArgumentError("product requires disjoint scopes")
        alphabets = dict(self.alphabets)
        alphabets.update(other.alphabets)
        scope = tuple(sorted(alphabets))
        out: dict[tuple, object] = {}
        for k1, p1 in self._p.items():
            vals = dict(zip(self.scope, k1))
            for k2, p2 in other._p.items():
                vals.update(zip(other.scope, k2))
                out[tuple(vals[v] for v in scope)] = p1 * p2
        return Distribution(alphabets, out, check=False)

    def extend_constant(self, var: str, value: Value,
                        alphabet: Sequence[Value] | None = None) -> "Distribution":
        if var in self.alphabets:
            raise ArgumentError(f"{var} already in scope")
        alpha = tuple(alphabet) if alphabet is not None else (value,)
        return self.product(Distribution.point_mass({var: alpha}, {var: value}))

    def snap_to_rational(self, max_denominator: int = 10 ** 6) -> "Distribution":
        """Optional cleanup pass for float tables with known-rational entries."""
        snapped = {k: Fraction(p).limit_denominator(max_denominator) if isinstance(p, float) else p
                   for k, p in self._p.items()}
        total = sum(snapped.values())
        if total == 0:
            raise ArgumentError("snap produced an empty table")
        return Distribution(self.alphabets, {k: p / total for k, p in snapped.items()}, check=False)

    def to_jsonable(self) -> dict:
        return {
            "scope": list(self.scope),
            "alphabets": {v: [str(a) for a in alpha] for v, alpha in self.alphabets.items()},
            "probs": [[[str(x) for x in key], render_number(p)]
                      for key, p in sorted(self._p.items(), key=lambda kv: repr(kv[0]))],
        }


class DsepPropertyReport(NamedTuple):
    holds: bool
    violations: list[tuple[tuple[str, ...], tuple[str, ...], tuple[str, ...]]]
    checked: int


def dsep_property_holds(graph, dist: Distribution, *, max_exhaustive: int = 5,
                        sample: int = 400, seed: int = 7) -> DsepPropertyReport:
    """Every d-separation among observed sets must show up as conditional
    independence.  Exhaustive for small scopes, deterministic sample above.
    """
    nodes = dist.scope
    if not set(nodes) <= set(graph.observed):
        raise ArgumentError("distribution scope must consist of observed nodes")
    triples: list[tuple[tuple, tuple, tuple]] = []
    roles = ("x", "y", "z", "-")
    for combo in itertools.product(roles, repeat=len(nodes)):
        x = tuple(n for n, r in zip(nodes, combo) if r == "x")
        y = tuple(n for n, r in zip(nodes, combo) if r == "y")
        z = tuple(n for n, r in zip(nodes, combo) if r == "z")
        if x and y and x < y:  # d-separation is symmetric; skip mirrored triples
            triples.append((x, y, z))
    if len(nodes) > max_exhaustive:
        rng = random.Random(seed)
        triples = rng.sample(triples, min(sample, len(triples)))
    violations = []
    for x, y, z in triples:
        if graph.d_separated(x, y, z) and not dist.cond_indep(x, y, z):
            violations.append((x, y, z))
    return DsepPropertyReport(not violations, violations, len(triples))
