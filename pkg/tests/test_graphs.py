import random

import pytest

from causalcompat.errors import ArgumentError, ResourceError
from causalcompat.graphs import CausalGraph, Trail, moralized_d_separated

from oracles import bayes_ball_d_separated


def chain():
    return CausalGraph(["A", "B", "C"], [("A", "B"), ("B", "C")])


def collider():
    # A -> C <- B, plus D below the collider
    return CausalGraph(["A", "B", "C", "D"], [("A", "C"), ("B", "C"), ("C", "D")])


def two_cycle():
    return CausalGraph(["X", "Y"], [("X", "Y"), ("Y", "X")])


class TestConstruction:
    def test_duplicate_nodes_rejected(self):
        with pytest.raises(ArgumentError):
            CausalGraph(["A", "A"])

    def test_self_loop_rejected(self):
        with pytest.raises(ArgumentError):
            CausalGraph(["A"], [("A", "A")])

    def test_edge_to_unknown_node_rejected(self):
        with pytest.raises(ArgumentError):
            CausalGraph(["A"], [("A", "B")])

    def test_unknown_observed_rejected(self):
        with pytest.raises(ArgumentError):
            CausalGraph(["A"], observed=["B"])

    def test_everything_observed_by_default(self):
        g = chain()
        assert g.observed == frozenset("ABC")
        assert g.unobserved == frozenset()

    def test_observed_split(self):
        g = CausalGraph(["A", "L"], [("L", "A")], observed=["A"])
        assert g.is_observed("A") and not g.is_observed("L")

    def test_add_node_add_edge_immutable(self):
        g = chain()
        g2 = g.add_node("D", observed=False).add_edge("C", "D")
        assert "D" not in g
        assert ("C", "D") in g2.edges and "D" in g2.unobserved

    def test_add_existing_node_rejected(self):
        with pytest.raises(ArgumentError):
            chain().add_node("A")


class TestReachability:
    def test_parents_children(self):
        g = collider()
        assert g.parents("C") == {"A", "B"}
        assert g.children("C") == {"D"}
        assert g.parents("A") == frozenset()
        with pytest.raises(ArgumentError):
            g.parents("Q")

    def test_chain_reachability_is_strict(self):
        g = chain()
        assert g.ancestors("C") == {"A", "B"}
        assert g.descendants("A") == {"B", "C"}
        assert "A" not in g.ancestors("A")

    def test_cycle_member_is_its_own_descendant(self):
        g = two_cycle()
        assert g.descendants("X") == {"X", "Y"}
        assert g.ancestors("X") == {"X", "Y"}
        assert not g.is_acyclic()

    def test_closure_contains_the_seeds(self):
        assert chain().ancestral_closure(["B"]) == {"A", "B"}

    def test_sccs_in_topological_order(self):
        g = CausalGraph(["A", "B", "X", "Y"],
                        [("A", "X"), ("X", "Y"), ("Y", "X"), ("Y", "B")])
        assert g.topological_sccs() == [("A",), ("X", "Y"), ("B",)]

    def test_acyclic_sccs_are_singletons(self):
        assert chain().topological_sccs() == [("A",), ("B",), ("C",)]


class TestDo:
    def test_do_removes_incoming_edges(self):
        g = chain().do(["B"])
        assert g.edges == {("B", "C")}

    def test_do_on_unobserved_rejected(self):
        g = CausalGraph(["A", "L"], [("L", "A")], observed=["A"])
        with pytest.raises(ArgumentError):
            g.do(["L"])

    def test_do_composes(self):
        g = collider()
        assert g.do(["C"]).do(["D"]).edges == g.do(["C", "D"]).edges


class TestTrails:
    def test_chain_single_trail(self):
        trails = chain().simple_trails(["A"], ["C"])
        assert trails == [Trail(("A", "B", "C"), (">", ">"))]

    def test_collider_trail_orientation(self):
        trails = collider().simple_trails(["A"], ["B"])
        assert trails == [Trail(("A", "C", "B"), (">", "<"))]

    def test_two_cycle_yields_both_orientations(self):
        trails = two_cycle().simple_trails(["X"], ["Y"])
        assert set(trails) == {Trail(("X", "Y"), (">",)), Trail(("X", "Y"), ("<",))}

    def test_overlapping_endpoints_rejected(self):
        with pytest.raises(ArgumentError):
            chain().simple_trails(["A"], ["A", "C"])


class TestBlocking:
    def test_chain_blocked_by_middle(self):
        g = chain()
        t = Trail(("A", "B", "C"), (">", ">"))
        assert not g.is_blocked(t, set())
        assert g.is_blocked(t, {"B"})

    def test_collider_blocked_unless_conditioned(self):
        g = collider()
        t = Trail(("A", "C", "B"), (">", "<"))
        assert g.is_blocked(t, set())
        assert not g.is_blocked(t, {"C"})
        # conditioning below the collider opens it too
        assert not g.is_blocked(t, {"D"})

    def test_fork_blocked_by_conditioning(self):
        g = CausalGraph(["A", "B", "C"], [("B", "A"), ("B", "C")])
        t = Trail(("A", "B", "C"), ("<", ">"))
        assert not g.is_blocked(t, set())
        assert g.is_blocked(t, {"B"})

    def test_endpoint_in_conditioning_set_rejected(self):
        g = chain()
        with pytest.raises(ArgumentError):
            g.is_blocked(Trail(("A", "B", "C"), (">", ">")), {"A"})

    def test_malformed_trail_rejected(self):
        g = chain()
        with pytest.raises(ArgumentError):
            g.is_blocked(Trail(("A", "B", "C"), (">",)), set())
        with pytest.raises(ArgumentError):
            g.is_blocked(Trail(("A", "C"), (">",)), set())


class TestDSeparation:
    def test_chain(self):
        g = chain()
        assert not g.d_separated(["A"], ["C"])
        assert g.d_separated(["A"], ["C"], ["B"])

    def test_collider(self):
        g = collider()
        assert g.d_separated(["A"], ["B"])
        assert not g.d_separated(["A"], ["B"], ["C"])
        assert not g.d_separated(["A"], ["B"], ["D"])

    def test_set_validation(self):
        g = chain()
        with pytest.raises(ArgumentError):
            g.d_separated([], ["C"])
        with pytest.raises(ArgumentError):
            g.d_separated(["A"], ["A"])
        with pytest.raises(ArgumentError):
            g.d_separated(["A"], ["C"], ["A"])

    def test_node_cap(self):
        names = [f"N{i}" for i in range(13)]
        g = CausalGraph(names)
        with pytest.raises(ResourceError):
            g.d_separated(["N0"], ["N1"])
        assert g.d_separated(["N0"], ["N1"], max_nodes=13)

    def test_two_cycle_connected(self):
        assert not two_cycle().d_separated(["X"], ["Y"])

    def test_cycle_collider_cases(self):
        g = CausalGraph(["A", "B", "X", "Y"],
                        [("A", "X"), ("X", "Y"), ("Y", "X"), ("B", "Y")])
        assert g.d_separated(["A"], ["B"])
        # conditioning inside the cycle opens a collider
        assert not g.d_separated(["A"], ["B"], ["X"])
        assert not g.d_separated(["A"], ["B"], ["Y"])

    def test_moralized_route_requires_acyclic(self):
        with pytest.raises(ArgumentError):
            moralized_d_separated(two_cycle(), ["X"], ["Y"])


def random_dag(rng, n):
    names = [f"N{i}" for i in range(n)]
    edges = [(names[i], names[j]) for i in range(n) for j in range(i + 1, n)
             if rng.random() < 0.35]
    return CausalGraph(names, edges)


def random_digraph(rng, n):
    names = [f"N{i}" for i in range(n)]
    edges = [(a, b) for a in names for b in names if a != b and rng.random() < 0.3]
    return CausalGraph(names, edges)


def random_disjoint_triple(rng, names):
    pool = list(names)
    rng.shuffle(pool)
    kx = rng.randint(1, min(2, len(pool) - 1))
    ky = rng.randint(1, min(2, len(pool) - kx))
    kz = rng.randint(0, len(pool) - kx - ky)
    return pool[:kx], pool[kx:kx + ky], pool[kx + ky:kx + ky + kz]


class TestAgainstIndependentRoutes:
    def test_agrees_with_moralization_and_bayes_ball_on_dags(self):
        rng = random.Random(20240811)
        for _ in range(250):
            g = random_dag(rng, rng.randint(3, 6))
            x, y, z = random_disjoint_triple(rng, g.nodes)
            got = g.d_separated(x, y, z)
            assert got == moralized_d_separated(g, x, y, z)
            assert got == bayes_ball_d_separated(g, x, y, z)

    def test_symmetric_in_endpoints_even_on_cycles(self):
        rng = random.Random(77)
        for _ in range(150):
            g = random_digraph(rng, rng.randint(3, 5))
            x, y, z = random_disjoint_triple(rng, g.nodes)
            assert g.d_separated(x, y, z) == g.d_separated(y, x, z)
