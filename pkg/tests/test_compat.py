import itertools
from fractions import Fraction

import pytest

from causalcompat.affects import (
    AffectsRelation,
    AffectsVerdict,
    PathConstraint,
    enumerate_affects,
)
from causalcompat.compat import (
    COMPATIBLE,
    INCOMPATIBLE,
    BipartiteConditions,
    affects_loop_certificate,
    bipartite_compat_conditions,
    certify_hidden_loop,
    check_compat,
    check_model_compat,
    tripartite_compat_conditions,
)
from causalcompat.errors import ArgumentError, ConfigurationError, ResourceError, SolveError
from causalcompat.geometry import Embedding, MinkowskiEvent, PartialOrder
from causalcompat.graphs import CausalGraph
from causalcompat.models import CausalModel, ExogenousLaw, Mechanism
from causalcompat.signalling import BellRoles

from test_affects import xor_model

BIT = (0, 1)
HALF = {0: Fraction(1, 2), 1: Fraction(1, 2)}


def ev(*coords):
    return MinkowskiEvent(coords[:-1], coords[-1])


def standard_embedding():
    return Embedding.minkowski({"A": ev(-2, 0), "X": ev(-2, 1),
                                "B": ev(2, 0), "Y": ev(2, 1)})


def copy_setting_model():
    # Y copies the remote setting outright: signalling, but acyclic
    g = CausalGraph(["A", "B", "X", "Y"], [("A", "Y")])
    return CausalModel(g, {n: BIT for n in "ABXY"},
                       mechanisms={"Y": Mechanism("Y", ("A",), {(0,): 0, (1,): 1})},
                       laws={n: ExogenousLaw(n, HALF) for n in "ABX"})


def common_cause_model():
    # both outcomes read one hidden coin; no signalling, no outcome sources
    g = CausalGraph(["A", "B", "L", "X", "Y"],
                    [("A", "X"), ("L", "X"), ("B", "Y"), ("L", "Y")],
                    observed=["A", "B", "X", "Y"])
    xor = {(u, v): u ^ v for u, v in itertools.product(BIT, BIT)}
    return CausalModel(g, {n: BIT for n in "ABLXY"},
                       mechanisms={"X": Mechanism("X", ("A", "L"), xor),
                                   "Y": Mechanism("Y", ("B", "L"), xor)},
                       laws={n: ExogenousLaw(n, HALF) for n in "ABL"})


def jamming_model(observe_latent=False):
    # outer outcomes share a coin, the middle setting flips one of them
    g = CausalGraph(["A", "B", "C", "L", "X", "Y", "Z"],
                    [("L", "X"), ("B", "X"), ("L", "Z")],
                    observed=["A", "B", "C", "X", "Y", "Z"] + (["L"] if observe_latent else []))
    alphabets = {"A": (0,), "C": (0,), "Y": (0,), "B": BIT, "L": BIT, "X": BIT, "Z": BIT}
    xor = {(u, v): u ^ v for u, v in itertools.product(BIT, BIT)}
    return CausalModel(g, alphabets,
                       mechanisms={"X": Mechanism("X", ("B", "L"), xor),
                                   "Z": Mechanism("Z", ("L",), {(0,): 0, (1,): 1})},
                       laws={"A": ExogenousLaw("A", {0: Fraction(1)}),
                             "C": ExogenousLaw("C", {0: Fraction(1)}),
                             "Y": ExogenousLaw("Y", {0: Fraction(1)}),
                             "B": ExogenousLaw("B", HALF),
                             "L": ExogenousLaw("L", HALF)})


def jamming_embedding_events(lam=None):
    events = {"A": ev(-2, Fraction(-1, 2)), "X": ev(-2, 0),
              "B": ev(0, Fraction(-1, 2)), "Y": ev(0, 0),
              "C": ev(2, Fraction(-1, 2)), "Z": ev(2, 0)}
    if lam is not None:
        events["L"] = lam
    return Embedding.minkowski(events)


ROLES2 = BellRoles(("A", "B"), ("X", "Y"))
ROLES3 = BellRoles(("A", "B", "C"), ("X", "Y", "Z"))


class TestCheckCompat:
    def test_xor_outcome_model_cannot_embed_spacelike(self):
        report = check_model_compat(xor_model(), standard_embedding())
        assert report.verdict == INCOMPATIBLE
        assert report.checked >= 1
        offenders = {v["relation"] for v in report.violations}
        assert any("A X" in r or ("A" in r and "X" in r) for r in offenders)

    def test_common_cause_model_embeds(self):
        report = check_model_compat(common_cause_model(), standard_embedding())
        assert report.verdict == COMPATIBLE
        assert not report.violations and not report.undetermined

    def test_reducible_relations_are_not_checked(self):
        emb = standard_embedding()
        reducible = AffectsVerdict(AffectsRelation(("A", "B"), ("X",)), True,
                                   irreducible=False)
        assert check_compat([reducible], emb).verdict == COMPATIBLE
        irreducible = AffectsVerdict(AffectsRelation(("B",), ("X",)), True,
                                     irreducible=True)
        assert check_compat([irreducible], emb).verdict == INCOMPATIBLE

    def test_undecided_irreducibility_rejected(self):
        pending = AffectsVerdict(AffectsRelation(("A",), ("X",)), True)
        with pytest.raises(ArgumentError):
            check_compat([pending], standard_embedding())

    def test_missing_node_rejected(self):
        emb = Embedding.minkowski({"A": ev(0, 0)})
        bad = AffectsVerdict(AffectsRelation(("A",), ("Q",)), True, irreducible=True)
        with pytest.raises(ArgumentError):
            check_compat([bad], emb)

    def test_poset_backend(self):
        chain = PartialOrder(("a", "b"), [("a", "b")])
        rel = AffectsVerdict(AffectsRelation(("X",), ("Y",)), True, irreducible=True)
        good = Embedding.poset(chain, {"X": "a", "Y": "b"})
        bad = Embedding.poset(PartialOrder(("a", "b"), []), {"X": "a", "Y": "b"})
        assert check_compat([rel], good).verdict == COMPATIBLE
        assert check_compat([rel], bad).verdict == INCOMPATIBLE


class TestBipartiteConditions:
    def test_xor_outcome_model(self):
        conds = bipartite_compat_conditions(xor_model(), ROLES2)
        assert conds == BipartiteConditions(True, False, conds.offending)
        assert any("X" in r for r in conds.offending)

    def test_copy_setting_model(self):
        conds = bipartite_compat_conditions(copy_setting_model(), ROLES2)
        assert (conds.no_signalling, conds.no_outcome_sourced) == (False, True)
        assert conds.offending == ()

    def test_common_cause_model(self):
        conds = bipartite_compat_conditions(common_cause_model(), ROLES2)
        assert (conds.no_signalling, conds.no_outcome_sourced) == (True, True)

    def test_conditions_match_compat_verdict(self):
        emb = standard_embedding()
        for model in (xor_model(), copy_setting_model(), common_cause_model()):
            conds = bipartite_compat_conditions(model, ROLES2)
            report = check_model_compat(model, emb)
            both = conds.no_signalling and conds.no_outcome_sourced
            assert both == (report.verdict == COMPATIBLE)


class TestTripartiteConditions:
    def test_jamming_model_passes_all(self):
        model = jamming_model()
        conds = tripartite_compat_conditions(model, ROLES3, jamming_embedding_events())
        assert conds.no_signalling_relaxed
        assert conds.no_outcome_sourced
        assert conds.outcome_sourced_only_exempt
        assert conds.middle_outcome_covers
        assert check_model_compat(model, jamming_embedding_events()).verdict == COMPATIBLE

    def test_latent_observed_variant_incompatible_everywhere(self):
        model = jamming_model(observe_latent=True)
        for lam in (ev(0, -5), ev(-2, Fraction(-1, 2)), ev(3, 1)):
            emb = jamming_embedding_events(lam)
            report = check_model_compat(model, emb)
            assert report.verdict == INCOMPATIBLE
            offenders = {v["relation"] for v in report.violations}
            assert any("B L" in r for r in offenders)

    def test_non_jamming_layout_rejected(self):
        flat = Embedding.minkowski({"A": ev(-2, 0), "X": ev(-2, 1), "B": ev(10, 0),
                                    "Y": ev(0, 1), "C": ev(2, 0), "Z": ev(2, 1)})
        with pytest.raises(ConfigurationError):
            tripartite_compat_conditions(jamming_model(), ROLES3, flat)


class TestLoopCertificate:
    def test_mutual_single_pair_is_forced_cyclic(self):
        verdicts = [
            AffectsVerdict(AffectsRelation(("X",), ("Y",)), True),
            AffectsVerdict(AffectsRelation(("Y",), ("X",)), True),
        ]
        cert = affects_loop_certificate(verdicts)
        assert cert.forced_cyclic is True
        assert cert.witness_order is None

    def test_irreducible_pair_loop_forced_cyclic(self):
        constraints = [
            PathConstraint("existential", ("A", "C"), ("B",)),
            PathConstraint("universal_source", ("A", "C"), ("B",)),
            PathConstraint("existential", ("B",), ("A", "C")),
            PathConstraint("universal_source", ("B",), ("A", "C")),
        ]
        assert affects_loop_certificate(constraints).forced_cyclic is True

    def test_reducible_pair_loop_admits_order(self):
        constraints = [
            PathConstraint("existential", ("A", "C"), ("B",)),
            PathConstraint("existential", ("B",), ("A",)),
        ]
        cert = affects_loop_certificate(constraints)
        assert cert.forced_cyclic is False
        order = cert.witness_order
        assert order.less("C", "B") and order.less("B", "A")

    def test_single_relation_gives_chain_witness(self):
        verdicts = [AffectsVerdict(AffectsRelation(("A",), ("Y",)), True)]
        cert = affects_loop_certificate(verdicts)
        assert cert.forced_cyclic is False
        assert cert.witness_order.less("A", "Y")

    def test_empty_input_is_trivially_orderable(self):
        cert = affects_loop_certificate([])
        assert cert.forced_cyclic is False

    def test_node_cap(self):
        constraints = [PathConstraint("existential", (f"n{i}",), (f"n{i+1}",))
                       for i in range(7)]
        with pytest.raises(ResourceError):
            affects_loop_certificate(constraints)
        assert affects_loop_certificate(constraints, max_nodes=8).forced_cyclic is False

    def test_step_budget_leaves_question_open(self):
        verdicts = [
            AffectsVerdict(AffectsRelation(("X",), ("Y",)), True),
            AffectsVerdict(AffectsRelation(("Y",), ("X",)), True),
        ]
        cert = affects_loop_certificate(verdicts, step_budget=1)
        assert cert.forced_cyclic is None

    def test_trit_cycle_model_end_to_end(self):
        g = CausalGraph(["X", "Y"], [("X", "Y"), ("Y", "X")])
        trits = (0, 1, 2)
        model = CausalModel(g, {"X": trits, "Y": trits},
                            mechanisms={"X": Mechanism("X", ("Y",), {(y,): (2 * y) % 3 for y in trits}),
                                        "Y": Mechanism("Y", ("X",), {(x,): x for x in trits})})
        verdicts = enumerate_affects(model, decide_irreducible=True)
        cert = affects_loop_certificate(verdicts)
        assert cert.forced_cyclic is True


def hidden_loop_model():
    xor = {(u, v): u ^ v for u, v in itertools.product(BIT, BIT)}
    g = CausalGraph(["L", "X", "Y"],
                    [("L", "X"), ("L", "Y"), ("X", "Y"), ("Y", "X")],
                    observed=["X", "Y"])
    return CausalModel(g, {n: BIT for n in "LXY"},
                       mechanisms={"X": Mechanism("X", ("L", "Y"), xor),
                                   "Y": Mechanism("Y", ("L", "X"), xor)},
                       laws={"L": ExogenousLaw("L", HALF)},
                       mode="uniform")


def disconnected_coins():
    g = CausalGraph(["X", "Y"], [])
    return CausalModel(g, {"X": BIT, "Y": BIT},
                       laws={"X": ExogenousLaw("X", HALF), "Y": ExogenousLaw("Y", HALF)})


class TestHiddenLoop:
    def test_hidden_loop_certified_by_disconnected_witness(self):
        assert certify_hidden_loop(hidden_loop_model(), disconnected_coins()) is True

    def test_correlated_witness_rejected(self):
        g = CausalGraph(["X", "Y"], [("X", "Y")])
        witness = CausalModel(g, {"X": BIT, "Y": BIT},
                              mechanisms={"Y": Mechanism("Y", ("X",), {(0,): 0, (1,): 1})},
                              laws={"X": ExogenousLaw("X", HALF)})
        assert certify_hidden_loop(hidden_loop_model(), witness) is False

    def test_acyclic_first_model_rejected(self):
        with pytest.raises(ArgumentError):
            certify_hidden_loop(disconnected_coins(), disconnected_coins())

    def test_cyclic_witness_rejected(self):
        with pytest.raises(ArgumentError):
            certify_hidden_loop(hidden_loop_model(), hidden_loop_model())

    def test_true_affects_loop_has_no_witness(self):
        g = CausalGraph(["X", "Y"], [("X", "Y"), ("Y", "X")])
        trits = (0, 1, 2)
        loop = CausalModel(g, {"X": trits, "Y": trits},
                           mechanisms={"X": Mechanism("X", ("Y",), {(y,): (2 * y) % 3 for y in trits}),
                                       "Y": Mechanism("Y", ("X",), {(x,): x for x in trits})})
        g2 = CausalGraph(["X", "Y"], [])
        witness = CausalModel(g2, {"X": trits, "Y": trits},
                              laws={"X": ExogenousLaw("X", {0: Fraction(1)}),
                                    "Y": ExogenousLaw("Y", {0: Fraction(1)})})
        assert certify_hidden_loop(loop, witness) is False
