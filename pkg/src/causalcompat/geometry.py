"""Event geometry: flat spacetime with closed light cones, plus a finite
poset backend.

Rational inputs are decided exactly.  The two-cone containment test works in
any dimension without boosting: the canonical-frame conditions reduce to
signs of Lorentz invariants, so no square roots appear.  Float inputs use a
1e-9 tolerance, counted toward the inclusive side.

Containment queries with three or more independent cones on the left have
no closed form in dimension >= 2; those run a numeric falsifier and report
UNDETERMINED when it finds nothing (sampling can refute, not prove).  The
poset backend is always exact.
"""

from __future__ import annotations

import itertools
from fractions import Fraction
from typing import Iterable, Mapping

from .dist import FLOAT_TOL
from .errors import ArgumentError

BEFORE = "BEFORE"
AFTER = "AFTER"
SPACELIKE = "SPACELIKE"
EQUAL = "EQUAL"

TRUE = "TRUE"
FALSE = "FALSE"
UNDETERMINED = "UNDETERMINED"

# slack for comparisons whose intermediate math runs in doubles even when the
# inputs are exact (ball-lens maxima); generous against 1e-16-scale rounding
LENS_SLACK = 1e-12

BACKEND_MINKOWSKI = "minkowski"
BACKEND_POSET = "poset"


def _coerce(v):
    if isinstance(v, bool) or not isinstance(v, (int, Fraction, float)):
        raise ArgumentError(f"coordinate {v!r} is not a number")
    return Fraction(v) if isinstance(v, int) else v


class MinkowskiEvent:
    """Spatial coordinates plus a time coordinate, c = 1."""

    __slots__ = ("space", "time")

    def __init__(self, space: Iterable, time):
        self.space = tuple(_coerce(x) for x in space)
        if not self.space:
            raise ArgumentError("need at least one spatial coordinate")
        self.time = _coerce(time)

    @property
    def dim(self) -> int:
        return len(self.space)

    @property
    def is_exact(self) -> bool:
        return all(isinstance(x, Fraction) for x in self.space) and \
            isinstance(self.time, Fraction)

    def __eq__(self, other):
        return isinstance(other, MinkowskiEvent) and \
            self.space == other.space and self.time == other.time

    def __hash__(self):
        return hash((self.space, self.time))

    def __repr__(self):
        coords = ", ".join(str(x) for x in self.space)
        return f"MinkowskiEvent(({coords}), t={self.time})"


def _require_same_dim(events) -> int:
    dims = {e.dim for e in events}
    if len(dims) != 1:
        raise ArgumentError(f"mixed spatial dimensions: {sorted(dims)}")
    return dims.pop()


def _tol(*events) -> float:
    return 0 if all(e.is_exact for e in events) else FLOAT_TOL


def interval_squared(a: MinkowskiEvent, b: MinkowskiEvent):
    """|dx|^2 - dt^2; positive for spacelike separation."""
    _require_same_dim((a, b))
    dx2 = sum((p - q) ** 2 for p, q in zip(a.space, b.space))
    return dx2 - (a.time - b.time) ** 2


def minkowski_precedes(p: MinkowskiEvent, q: MinkowskiEvent) -> str:
    _require_same_dim((p, q))
    tol = _tol(p, q)
    dt = q.time - p.time
    dx2 = sum((a - b) ** 2 for a, b in zip(p.space, q.space))
    if abs(dt) <= tol and dx2 <= tol * tol:
        return EQUAL
    if dx2 <= dt * dt + tol:
        return BEFORE if dt > 0 else AFTER
    return SPACELIKE


def _leq(p: MinkowskiEvent, q: MinkowskiEvent) -> bool:
    """p in the closed past of q (p == q counts)."""
    return minkowski_precedes(p, q) in (BEFORE, EQUAL)


def apex_1p1(a: MinkowskiEvent, c: MinkowskiEvent) -> MinkowskiEvent:
    """The earliest event whose future cone is F(a) ∩ F(c); 1+1D only.

    Comparable inputs return the later event."""
    if _require_same_dim((a, c)) != 1:
        raise ArgumentError("apex construction applies to one spatial dimension")
    rel = minkowski_precedes(a, c)
    if rel == BEFORE or rel == EQUAL:
        return c
    if rel == AFTER:
        return a
    lo, hi = (a, c) if a.space[0] <= c.space[0] else (c, a)
    x = (hi.space[0] + lo.space[0] + hi.time - lo.time) / 2
    t = (hi.space[0] - lo.space[0] + hi.time + lo.time) / 2
    return MinkowskiEvent((x,), t)


def contain_two_in_one(a: MinkowskiEvent, c: MinkowskiEvent, b: MinkowskiEvent,
                       dim: int | None = None) -> bool:
    """Is F(a) ∩ F(c) a subset of F(b)?

    Comparable a, c collapse to the later cone.  Spacelike pairs split on the
    invariant |s_ab - s_cb| <= s_ac (b's canonical x between the endpoints):
    inside, containment is two invariant sign conditions (canonical t_b <= 0
    and t_b^2 >= y_b^2); outside, it is cone membership of a or c in F(b).
    """
    d = _require_same_dim((a, c, b))
    if dim is not None and dim != d:
        raise ArgumentError(f"events have dimension {d}, not {dim}")
    rel = minkowski_precedes(a, c)
    if rel != SPACELIKE:
        later = c if rel in (BEFORE, EQUAL) else a
        return _leq(b, later)
    if d == 1:
        return _leq(b, apex_1p1(a, c))
    tol = _tol(a, c, b)
    s_ab = interval_squared(a, b)
    s_cb = interval_squared(c, b)
    s_ac = interval_squared(a, c)
    if abs(s_ab - s_cb) <= s_ac + tol:
        q = (s_ab + s_cb) / 2 - (s_ab - s_cb) ** 2 / (4 * s_ac) - s_ac / 4
        dx = tuple(cc - aa for aa, cc in zip(a.space, c.space))
        dt = c.time - a.time
        dx2 = sum(x * x for x in dx)
        mid_space = tuple((aa + cc) / 2 for aa, cc in zip(a.space, c.space))
        mid_time = (a.time + c.time) / 2
        s = dx2 * (b.time - mid_time) - dt * sum(x * (bb - mm) for x, bb, mm
                                                 in zip(dx, b.space, mid_space))
        return s <= tol and q <= tol
    return _leq(b, a) or _leq(b, c)


def slice_contained(a: MinkowskiEvent, c: MinkowskiEvent, b: MinkowskiEvent, t) -> bool:
    """At fixed time t, is the intersection of a's and c's cone slices inside
    b's?  Exact intervals in 1+1D; closed-form ball-lens maxima above."""
    d = _require_same_dim((a, c, b))
    t = _coerce(t)
    if any(t < e.time for e in (a, c, b)):
        raise ArgumentError("slice time must not precede any of the events")
    ra, rc, rb = t - a.time, t - c.time, t - b.time
    tol = _tol(a, c, b)
    if d == 1:
        lo = max(a.space[0] - ra, c.space[0] - rc)
        hi = min(a.space[0] + ra, c.space[0] + rc)
        if lo > hi:
            return True
        return b.space[0] - rb <= lo + tol and hi <= b.space[0] + rb + tol

    import math

    ca = tuple(map(float, a.space))
    cc = tuple(map(float, c.space))
    cb = tuple(map(float, b.space))
    fra, frc, frb = float(ra), float(rc), float(rb)
    # the lens maxima run in floats even for exact inputs; floor the slack at
    # the double-rounding noise of that math, well below the input tolerance
    tol = max(tol, LENS_SLACK)
    d0 = math.dist(ca, cc)
    if d0 > fra + frc + tol:
        return True  # empty lens
    if d0 <= abs(fra - frc):
        # one ball inside the other: the lens is the smaller ball
        cs, rs = (ca, fra) if fra <= frc else (cc, frc)
        return math.dist(cs, cb) + rs <= frb + tol
    best = 0.0
    for (ci, ri, cj, rj) in ((ca, fra, cc, frc), (cc, frc, ca, fra)):
        # cap candidate: point of sphere i antipodal to b
        gap = math.dist(ci, cb)
        if gap <= tol:
            p = tuple(x + (ri if k == 0 else 0.0) for k, x in enumerate(ci))
        else:
            p = tuple(x + ri * (x - y) / gap for x, y in zip(ci, cb))
        if math.dist(p, cj) <= rj + tol:
            best = max(best, math.dist(p, cb))
    # rim candidate: farthest point of the sphere-sphere intersection shell
    if d0 > tol:
        h = (d0 * d0 + fra * fra - frc * frc) / (2 * d0)
        rho2 = fra * fra - h * h
        if rho2 > 0:
            u = tuple((y - x) / d0 for x, y in zip(ca, cc))
            m = tuple(x + h * ux for x, ux in zip(ca, u))
            rel = tuple(x - y for x, y in zip(cb, m))
            axial = sum(x * ux for x, ux in zip(rel, u))
            perp2 = max(sum(x * x for x in rel) - axial * axial, 0.0)
            rim = math.sqrt(axial * axial + (math.sqrt(perp2) + math.sqrt(rho2)) ** 2)
            best = max(best, rim)
    return best <= frb + tol


def _absorb_nested(events: list[MinkowskiEvent]) -> list[MinkowskiEvent]:
    """Drop cones that contain another cone of the list (keep the later of
    any comparable pair); the intersection is unchanged."""
    kept: list[MinkowskiEvent] = []
    for e in events:
        if any(_leq(e, other) and other != e for other in events):
            continue  # e is earlier than another left event; F(e) is a superset
        if e not in kept:
            kept.append(e)
    return kept


def _sample_violation(lefts: list[MinkowskiEvent], right: MinkowskiEvent,
                      *, slices: int = 12, rounds: int = 2) -> bool:
    """Look for a point in every left cone but outside the right cone."""
    import numpy as np

    dim = right.dim
    grid = {1: 256, 2: 96}.get(dim, 24)
    ls = [(np.array([float(x) for x in e.space]), float(e.time)) for e in lefts]
    rsp = np.array([float(x) for x in right.space])
    rt = float(right.time)
    t0 = max([t for _, t in ls] + [rt])
    scale = max(1.0, max(abs(float(v)) for e in lefts + [right]
                         for v in list(e.space) + [e.time]))
    for ti in range(slices):
        t = t0 + scale * (0.25 + 8.0 * ti / max(1, slices - 1))
        center = [float(sum(sp[i] for sp, _ in ls)) / len(ls) for i in range(dim)]
        half = [max(t - tc + abs(float(sp[i]) - center[i]) for sp, tc in ls)
                for i in range(dim)]
        for _ in range(rounds):
            axes = [np.linspace(c - h, c + h, grid) for c, h in zip(center, half)]
            mesh = np.meshgrid(*axes, indexing="ij")
            pts = np.stack([m.ravel() for m in mesh], axis=1)
            score = None
            for sp, tc in ls:
                slack = (t - tc) - np.sqrt(((pts - sp) ** 2).sum(axis=1))
                score = slack if score is None else np.minimum(score, slack)
            excess = np.sqrt(((pts - rsp) ** 2).sum(axis=1)) - (t - rt)
            score = np.minimum(score, excess)
            k = int(np.argmax(score))
            if score[k] > 1e-7:
                return True
            center = [float(v) for v in pts[k]]
            half = [max(h * 4.0 / grid, 1e-7) for h in half]
    return False


def minkowski_joint_future_contained(left: Iterable[MinkowskiEvent],
                                     right: Iterable[MinkowskiEvent]) -> str:
    """Is ∩_{l} F(l) a subset of ∩_{r} F(r)?  TRUE / FALSE / UNDETERMINED."""
    lefts = list(left)
    rights = list(right)
    if not lefts:
        raise ArgumentError("containment query needs a non-empty left side")
    if not rights:
        return TRUE
    _require_same_dim(lefts + rights)
    lefts = _absorb_nested(lefts)
    undetermined = False
    for r in rights:
        if any(_leq(r, l) for l in lefts):
            continue  # one left cone is nested inside F(r)
        if any(contain_two_in_one(li, lj, r)
               for li, lj in itertools.combinations(lefts, 2)):
            continue
        if len(lefts) <= 2:
            return FALSE  # the certificate tests above are exact here
        if r.dim == 1:
            fold = lefts[0]
            for l in lefts[1:]:
                fold = apex_1p1(fold, l)
            if _leq(r, fold):
                continue
            return FALSE
        if _sample_violation(lefts, r):
            return FALSE
        undetermined = True
    return UNDETERMINED if undetermined else TRUE


class PartialOrder:
    """Finite strict partial order, stored as its full less-than relation."""

    def __init__(self, elements: Iterable[str], less: Iterable[tuple[str, str]]):
        self.elements = tuple(sorted(set(elements)))
        eset = set(self.elements)
        rel = set()
        for u, v in less:
            if u not in eset or v not in eset:
                raise ArgumentError(f"relation pair ({u}, {v}) uses unknown elements")
            rel.add((u, v))
        # transitive closure
        changed = True
        while changed:
            changed = False
            for (u, v), (x, y) in itertools.product(list(rel), list(rel)):
                if v == x and (u, y) not in rel:
                    rel.add((u, y))
                    changed = True
        for e in self.elements:
            if (e, e) in rel:
                raise ArgumentError(f"order relation has a cycle through {e}")
        self._less = frozenset(rel)

    @classmethod
    def from_hasse(cls, elements: Iterable[str],
                   covers: Iterable[tuple[str, str]]) -> "PartialOrder":
        return cls(elements, covers)

    def __contains__(self, element) -> bool:
        return element in self.elements

    @property
    def pairs(self) -> tuple[tuple[str, str], ...]:
        return tuple(sorted(self._less))

    def less(self, u, v) -> bool:
        return (u, v) in self._less

    def leq(self, u, v) -> bool:
        self._require(u)
        self._require(v)
        return u == v or (u, v) in self._less

    def _require(self, e) -> None:
        if e not in self.elements:
            raise ArgumentError(f"unknown poset element {e!r}")

    def compare(self, p, q) -> str:
        self._require(p)
        self._require(q)
        if p == q:
            return EQUAL
        if (p, q) in self._less:
            return BEFORE
        if (q, p) in self._less:
            return AFTER
        return SPACELIKE


class Embedding:
    """Locations for the observed nodes, over one of the two backends."""

    def __init__(self, backend: str, events: Mapping[str, object], *,
                 order: PartialOrder | None = None):
        if backend not in (BACKEND_MINKOWSKI, BACKEND_POSET):
            raise ArgumentError(f"unknown backend {backend!r}")
        self.backend = backend
        self.events = dict(events)
        self.order = order
        if backend == BACKEND_MINKOWSKI:
            if order is not None:
                raise ArgumentError("a flat-space embedding takes no poset")
            for n, e in self.events.items():
                if not isinstance(e, MinkowskiEvent):
                    raise ArgumentError(f"location of {n} is not an event")
            self.dim = _require_same_dim(list(self.events.values())) if self.events else None
        else:
            if order is None:
                raise ArgumentError("poset backend needs the order")
            self.dim = None
            for n, e in self.events.items():
                if e not in order:
                    raise ArgumentError(f"location of {n} is not a poset element")

    @classmethod
    def minkowski(cls, events: Mapping[str, MinkowskiEvent]) -> "Embedding":
        return cls(BACKEND_MINKOWSKI, events)

    @classmethod
    def poset(cls, order: PartialOrder, events: Mapping[str, object]) -> "Embedding":
        return cls(BACKEND_POSET, events, order=order)

    def event(self, node: str):
        if node not in self.events:
            raise ArgumentError(f"embedding has no location for node {node!r}")
        return self.events[node]

    @property
    def nodes(self) -> tuple[str, ...]:
        return tuple(sorted(self.events))

    def precedes(self, p, q) -> str:
        if self.backend == BACKEND_MINKOWSKI:
            if not isinstance(p, MinkowskiEvent) or not isinstance(q, MinkowskiEvent):
                raise ArgumentError("this embedding compares flat-space events")
            return minkowski_precedes(p, q)
        return self.order.compare(p, q)

    def future_contained(self, left_nodes: Iterable[str],
                         right_nodes: Iterable[str]) -> str:
        left = [self.event(n) for n in left_nodes]
        right = [self.event(n) for n in right_nodes]
        if not left:
            raise ArgumentError("containment query needs a non-empty left side")
        if self.backend == BACKEND_MINKOWSKI:
            return minkowski_joint_future_contained(left, right)
        for e in self.order.elements:
            if all(self.order.leq(l, e) for l in left) and \
                    not all(self.order.leq(r, e) for r in right):
                return FALSE
        return TRUE

    def nontrivial_violations(self, verdicts) -> list[tuple[str, str]]:
        """Pairs (source, target) of a holding one-to-one influence that sit
        at the same location; a usable embedding has none."""
        out = []
        for v in verdicts:
            rel = v.relation
            if not v.holds or rel.do_set or rel.given:
                continue
            if len(rel.sources) != 1 or len(rel.targets) != 1:
                continue
            x, y = rel.sources[0], rel.targets[0]
            if x in self.events and y in self.events and \
                    self.event(x) == self.event(y) and (x, y) not in out:
                out.append((x, y))
        return out
