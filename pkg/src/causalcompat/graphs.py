"""Finite directed graphs with observed/unobserved nodes.

Cycles are allowed, self-loops are not.  d-separation is decided by
enumerating node-simple trails (paths with remembered edge orientations,
needed because a 2-cycle makes plain node sequences ambiguous) and applying
the usual chain/fork/collider blocking rules; collider descendants use
directed reachability, which is well defined on cyclic graphs.
"""

from __future__ import annotations

import itertools
from typing import Iterable, NamedTuple

from .errors import ArgumentError, ResourceError

# path enumeration is exponential; keep a configurable guard rail
DEFAULT_NODE_CAP = 12

FORWARD = ">"
BACKWARD = "<"


class Trail(NamedTuple):
    """A node-simple path with edge orientations.

    dirs[i] == '>' means nodes[i] -> nodes[i+1] is the traversed edge,
    '<' means nodes[i+1] -> nodes[i].
    """

    nodes: tuple[str, ...]
    dirs: tuple[str, ...]


class CausalGraph:
    """Immutable digraph; add_node/add_edge return new graphs."""

    def __init__(self, nodes: Iterable[str] = (), edges: Iterable[tuple[str, str]] = (),
                 observed: Iterable[str] | None = None):
        node_list = list(nodes)
        if len(set(node_list)) != len(node_list):
            raise ArgumentError("duplicate node names")
        self._nodes = tuple(sorted(node_list))
        node_set = set(self._nodes)
        if observed is None:
            self._observed = frozenset(node_set)
        else:
            self._observed = frozenset(observed)
            extra = self._observed - node_set
            if extra:
                raise ArgumentError(f"observed set names unknown nodes: {sorted(extra)}")
        edge_set = set()
        for u, v in edges:
            if u not in node_set or v not in node_set:
                raise ArgumentError(f"edge ({u}, {v}) references unknown node")
            if u == v:
                raise ArgumentError(f"self-loop on {u} rejected")
            edge_set.add((u, v))
        self._edges = frozenset(edge_set)
        self._parents: dict[str, frozenset[str]] = {}
        self._children: dict[str, frozenset[str]] = {}
        for n in self._nodes:
            self._parents[n] = frozenset(u for (u, v) in edge_set if v == n)
            self._children[n] = frozenset(v for (u, v) in edge_set if u == n)

    # -- basic accessors -------------------------------------------------

    @property
    def nodes(self) -> tuple[str, ...]:
        return self._nodes

    @property
    def edges(self) -> frozenset[tuple[str, str]]:
        return self._edges

    @property
    def observed(self) -> frozenset[str]:
        return self._observed

    @property
    def unobserved(self) -> frozenset[str]:
        return frozenset(self._nodes) - self._observed

    def is_observed(self, name: str) -> bool:
        self._require(name)
        return name in self._observed

    def parents(self, name: str) -> frozenset[str]:
        self._require(name)
        return self._parents[name]

    def children(self, name: str) -> frozenset[str]:
        self._require(name)
        return self._children[name]

    def _require(self, name: str) -> None:
        if name not in self._parents:
            raise ArgumentError(f"unknown node {name!r}")

    def __contains__(self, name: str) -> bool:
        return name in self._parents

    def __repr__(self) -> str:
        return f"CausalGraph(nodes={list(self._nodes)}, edges={sorted(self._edges)})"

    # -- construction ----------------------------------------------------

    def add_node(self, name: str, observed: bool = True) -> "CausalGraph":
        if name in self._parents:
            raise ArgumentError(f"node {name!r} already present")
        obs = set(self._observed) | ({name} if observed else set())
        return CausalGraph(self._nodes + (name,), self._edges, obs)

    def add_edge(self, u: str, v: str) -> "CausalGraph":
        self._require(u)
        self._require(v)
        return CausalGraph(self._nodes, self._edges | {(u, v)}, self._observed)

    # -- reachability ----------------------------------------------------

    def ancestors(self, name: str) -> frozenset[str]:
        """Strict reachability backwards; a node on a cycle through itself
        is its own ancestor."""
        return self._reach(name, self._parents)

    def descendants(self, name: str) -> frozenset[str]:
        return self._reach(name, self._children)

    def _reach(self, start: str, step: dict[str, frozenset[str]]) -> frozenset[str]:
        self._require(start)
        seen: set[str] = set()
        frontier = list(step[start])
        while frontier:
            n = frontier.pop()
            if n in seen:
                continue
            seen.add(n)
            frontier.extend(step[n] - seen)
        return frozenset(seen)

    def ancestral_closure(self, names: Iterable[str]) -> frozenset[str]:
        out = set(names)
        for n in list(out):
            out |= self.ancestors(n)
        return frozenset(out)

    def is_acyclic(self) -> bool:
        return all(n not in self.descendants(n) for n in self._nodes)

    def topological_sccs(self) -> list[tuple[str, ...]]:
        """Strongly connected components in topological order (Tarjan)."""
        index: dict[str, int] = {}
        low: dict[str, int] = {}
        on_stack: set[str] = set()
        stack: list[str] = []
        out: list[tuple[str, ...]] = []
        counter = itertools.count()

        def visit(v: str) -> None:
            index[v] = low[v] = next(counter)
            stack.append(v)
            on_stack.add(v)
            for w in sorted(self._children[v]):
                if w not in index:
                    visit(w)
                    low[v] = min(low[v], low[w])
                elif w in on_stack:
                    low[v] = min(low[v], index[w])
            if low[v] == index[v]:
                comp = []
                while True:
                    w = stack.pop()
                    on_stack.discard(w)
                    comp.append(w)
                    if w == v:
                        break
                out.append(tuple(sorted(comp)))

        for v in self._nodes:
            if v not in index:
                visit(v)
        # Tarjan emits components in reverse topological order
        out.reverse()
        return out

    # -- interventions on the graph level --------------------------------

    def do(self, targets: Iterable[str]) -> "CausalGraph":
        """Remove all edges into the targets.  Targets must be observed."""
        tset = set(targets)
        for t in tset:
            self._require(t)
            if t not in self._observed:
                raise ArgumentError(f"cannot intervene on unobserved node {t!r}")
        kept = [(u, v) for (u, v) in self._edges if v not in tset]
        return CausalGraph(self._nodes, kept, self._observed)

    # -- trails and d-separation -----------------------------------------

    def simple_trails(self, sources: Iterable[str], targets: Iterable[str]) -> list[Trail]:
        """All node-simple trails from a source to a target, endpoints
        excluded from each other's set."""
        src = sorted(set(sources))
        tgt = set(targets)
        for n in itertools.chain(src, tgt):
            self._require(n)
        if set(src) & tgt:
            raise ArgumentError("source and target sets overlap")
        found: list[Trail] = []

        def extend(nodes: list[str], dirs: list[str]) -> None:
            here = nodes[-1]
            if here in tgt:
                found.append(Trail(tuple(nodes), tuple(dirs)))
                return
            seen = set(nodes)
            for nxt in sorted(self._children[here] | self._parents[here]):
                if nxt in seen:
                    continue
                if nxt in self._children[here]:
                    extend(nodes + [nxt], dirs + [FORWARD])
                if nxt in self._parents[here]:
                    extend(nodes + [nxt], dirs + [BACKWARD])

        for s in src:
            extend([s], [])
        return found

    def is_blocked(self, trail: Trail, conditioned: Iterable[str]) -> bool:
        """Blocking status of one trail given a conditioning set.

        The conditioning set must not touch the trail's endpoints.
        """
        z = set(conditioned)
        for n in z:
            self._require(n)
        nodes, dirs = trail.nodes, trail.dirs
        if len(nodes) != len(dirs) + 1 or len(nodes) < 2:
            raise ArgumentError("malformed trail")
        for a, b, d in zip(nodes, nodes[1:], dirs):
            edge = (a, b) if d == FORWARD else (b, a)
            if edge not in self._edges:
                raise ArgumentError(f"trail uses missing edge {edge}")
        if nodes[0] in z or nodes[-1] in z:
            raise ArgumentError("conditioning set contains a trail endpoint")
        for i in range(1, len(nodes) - 1):
            mid = nodes[i]
            into_mid = dirs[i - 1] == FORWARD
            out_of_mid = dirs[i] == FORWARD
            if into_mid and not out_of_mid:
                # collider: open only when mid or a descendant is conditioned
                if mid not in z and not (self.descendants(mid) & z):
                    return True
            else:
                # chain or fork
                if mid in z:
                    return True
        return False

    def d_separated(self, xs: Iterable[str], ys: Iterable[str], zs: Iterable[str] = (),
                    max_nodes: int = DEFAULT_NODE_CAP) -> bool:
        x, y, z = set(xs), set(ys), set(zs)
        if not x or not y:
            raise ArgumentError("d-separation needs non-empty endpoint sets")
        if x & y or x & z or y & z:
            raise ArgumentError("d-separation sets must be pairwise disjoint")
        if len(self._nodes) > max_nodes:
            raise ResourceError(
                f"graph has {len(self._nodes)} nodes; raise max_nodes (default {DEFAULT_NODE_CAP})")
        for trail in self.simple_trails(sorted(x), sorted(y)):
            if not self.is_blocked(trail, z):
                return False
        return True


def moralized_d_separated(graph: CausalGraph, xs: Iterable[str], ys: Iterable[str],
                          zs: Iterable[str] = ()) -> bool:
    """Moralization-based d-separation; acyclic graphs only.

    Kept in the library (not just tests) so both routes stay available for
    cross-checking.
    """
    if not graph.is_acyclic():
        raise ArgumentError("moralization route requires an acyclic graph")
    x, y, z = set(xs), set(ys), set(zs)
    if not x or not y or x & y or x & z or y & z:
        raise ArgumentError("need disjoint non-empty endpoint sets")
    keep = graph.ancestral_closure(x | y | z)
    und: dict[str, set[str]] = {n: set() for n in keep}
    for n in keep:
        ps = [p for p in graph.parents(n) if p in keep]
        for p in ps:
            und[n].add(p)
            und[p].add(n)
        for a, b in itertools.combinations(sorted(ps), 2):
            und[a].add(b)
            und[b].add(a)
    frontier = sorted(x)
    seen = set(frontier)
    while frontier:
        n = frontier.pop()
        if n in y:
            return False
        for m in und[n]:
            if m not in seen and m not in z:
                seen.add(m)
                frontier.append(m)
    return True
