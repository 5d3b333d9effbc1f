from fractions import Fraction

import pytest

from causalcompat.errors import ArgumentError, ConfigurationError
from causalcompat.geometry import MinkowskiEvent
from causalcompat.compat import check_compat
from causalcompat.affects import enumerate_affects
from causalcompat.scenarios import (
    JAMMING_EVENTS_SEPARATE,
    STANDARD_BIPARTITE_EVENTS,
    Scenario,
    all_scenarios,
    classical_jamming_model,
    counterexample_library,
    get_scenario,
    jamming_embedding,
    latent_grid,
    loop_condition_report,
    pr_jamming_distribution,
    run_scenario,
    standard_bipartite_embedding,
)


def ev(*coords):
    return MinkowskiEvent(coords[:-1], coords[-1])


class TestEmbeddingConstructors:
    def test_default_bipartite_layout_valid(self):
        emb = standard_bipartite_embedding()
        assert set(emb.nodes) == {"A", "B", "X", "Y"}

    def test_bipartite_rejects_timelike_cross_pair(self):
        events = dict(STANDARD_BIPARTITE_EVENTS)
        events["Y"] = ev(-2, 3)  # now above A and X
        with pytest.raises(ConfigurationError):
            standard_bipartite_embedding(events)

    def test_bipartite_rejects_outcome_before_setting(self):
        events = dict(STANDARD_BIPARTITE_EVENTS)
        events["X"] = ev(-2, -1)
        with pytest.raises(ConfigurationError):
            standard_bipartite_embedding(events)

    def test_bipartite_higher_dimension(self):
        events = {"A": ev(-2, 0, 0), "X": ev(-2, 0, 1),
                  "B": ev(2, 0, 0), "Y": ev(2, 0, 1)}
        emb = standard_bipartite_embedding(events)
        assert emb.event("A").dim == 2

    def test_default_jamming_layout_covers(self):
        layout = jamming_embedding()
        assert layout.middle_outcome_covers is True

    def test_separate_jamming_layout_does_not_cover(self):
        layout = jamming_embedding(variant="separate")
        assert layout.middle_outcome_covers is False
        assert layout.embedding.event("Y").dim == 2

    def test_off_axis_late_middle_setting_rejected(self):
        events = dict(JAMMING_EVENTS_SEPARATE)
        events["B"] = ev(0, 1, 0)  # off the outer axis and too late
        with pytest.raises(ConfigurationError):
            jamming_embedding(events)

    def test_unknown_variant(self):
        with pytest.raises(ArgumentError):
            jamming_embedding(variant="diagonal")

    def test_latent_grid(self):
        grid = latent_grid()
        assert len(grid) == 441
        assert ev(-5, -5) in grid
        assert ev(5, 5) in grid
        assert ev(0, 0) in grid
        assert all(e.is_exact for e in grid)
        with pytest.raises(ArgumentError):
            latent_grid(1)


class TestLibrary:
    def test_counterexample_names(self):
        names = [s.name for s in counterexample_library()]
        assert names == ["xor-outcome", "two-cycle-trit", "hidden-loop",
                         "setting-copy", "outcome-copy"]

    def test_every_scenario_passes(self):
        for name, scenario in all_scenarios().items():
            report = run_scenario(scenario)
            failed = [r for r in report.results if not r.passed]
            assert report.passed, (name, [(r.label, r.details) for r in failed])

    def test_get_scenario(self):
        assert get_scenario("pr-jamming").name == "pr-jamming"
        with pytest.raises(ArgumentError):
            get_scenario("nonesuch")

    def test_unknown_assertion_kind_rejected(self):
        bad = Scenario("bad", "", ({"check": "mystery"},))
        with pytest.raises(ArgumentError):
            run_scenario(bad)

    def test_scenario_without_distribution(self):
        empty = Scenario("empty", "", ({"check": "ns2", "holds": True},))
        with pytest.raises(ArgumentError):
            run_scenario(empty)

    def test_report_serializes(self):
        report = run_scenario(get_scenario("two-cycle-trit"))
        blob = report.to_jsonable()
        assert blob["name"] == "two-cycle-trit"
        assert all(set(r) == {"label", "passed", "details"} for r in blob["results"])


class TestPrDistribution:
    def test_outer_marginal_flat(self):
        dist = pr_jamming_distribution()
        for b in (0, 1):
            got = dist.conditional(["X"], {"B": b}).prob_of({"X": 0})
            assert got == Fraction(1, 2)

    def test_parity_tracks_program(self):
        dist = pr_jamming_distribution()
        for key, p in dist.items():
            v = dict(zip(dist.scope, key))
            assert v["X"] ^ v["Z"] == (v["A"] * v["C"]) ^ v["B"]
            assert p == Fraction(1, 16)


class TestJammingGridSample:
    def test_observed_cause_incompatible_on_sampled_placements(self):
        scenario = classical_jamming_model(observe_latent=True)
        verdicts = enumerate_affects(scenario.model, decide_irreducible=True)
        for lam in (ev(-5, -5), ev(0, 0), ev(5, -5), ev(Fraction(1, 2), -3)):
            layout = jamming_embedding(extra={"L": lam})
            report = check_compat(verdicts, layout.embedding)
            assert report.verdict == "INCOMPATIBLE", lam


def test_loop_condition_report():
    report = loop_condition_report()
    assert report.passed
    names = {e.scenario for e in report.entries}
    assert {"two-cycle-trit", "hidden-loop", "setting-copy", "outcome-copy"} <= names
    assert any(e.scenario == "classical-jamming" for e in report.entries)
    blob = report.to_jsonable()
    assert blob["passed"] is True
