"""Report documents: content, text rendering and byte-level determinism."""

import pytest

from causalcompat.errors import ArgumentError
from causalcompat.modelfile import parse_model_text, render_model_file
from causalcompat.reports import (
    REPORT_VERSION,
    analysis_report,
    compat_report,
    loops_report,
    ns_report,
    render_text,
    scenario_report_doc,
    scenario_suite_doc,
    to_json_text,
)
from causalcompat.scenarios import get_scenario, scenario_model_text


def file_for(name: str) -> str:
    return scenario_model_text(get_scenario(name))


class TestAnalysis:
    def test_jamming_model_lines(self):
        parsed = parse_model_text(file_for("classical-jamming"))
        report = analysis_report(parsed)
        text = render_text(report)
        assert "B affects X Z: true" in text
        assert "B affects X: false" in text
        assert "B affects X Z do(A C)" in report["irreducible"]
        assert report["report_version"] == REPORT_VERSION
        assert report["no_signalling"]["jamming"]["holds"] is True
        assert report["compatibility"]["verdict"] == "COMPATIBLE"
        assert report["loops"]["forced_cyclic"] is False
        assert report["arrows"]["B->X"] == "dashed"

    def test_conditional_signature_count(self):
        parsed = parse_model_text(file_for("xor-outcome"))
        report = analysis_report(parsed, include_conditional=True)
        assert report["signatures_evaluated"] == 194
        plain = analysis_report(parsed)
        assert plain["signatures_evaluated"] == 110

    def test_incompatible_model(self):
        parsed = parse_model_text(file_for("xor-outcome"))
        report = analysis_report(parsed)
        assert report["compatibility"]["verdict"] == "INCOMPATIBLE"
        text = render_text(report)
        assert "violation: A X affects Y" in text
        assert "A X affects Y: true (irreducible)" in text

    def test_max_nodes_cap_respected(self):
        parsed = parse_model_text(file_for("xor-outcome"))
        from causalcompat.errors import ResourceError
        with pytest.raises(ResourceError):
            analysis_report(parsed, max_nodes=3)


class TestDeterminism:
    @pytest.mark.parametrize("name", ["xor-outcome", "two-cycle-trit", "pr-jamming"])
    def test_byte_identical_runs(self, name):
        text = file_for(name)
        first = to_json_text(analysis_report(parse_model_text(text)))
        second = to_json_text(analysis_report(parse_model_text(text)))
        assert first == second
        assert first.endswith("\n")

    def test_render_text_stable(self):
        text = file_for("xor-outcome")
        a = render_text(analysis_report(parse_model_text(text)))
        b = render_text(analysis_report(parse_model_text(text)))
        assert a == b


class TestDelegates:
    def test_ns_report_bipartite(self):
        report = ns_report(parse_model_text(file_for("setting-copy")))
        assert report["parties"] == 2
        assert report["checks"]["bipartite"]["holds"] is False
        text = render_text(report)
        assert "bipartite no-signalling: false" in text

    def test_ns_report_needs_roles(self):
        parsed = parse_model_text(file_for("two-cycle-trit"))
        assert parsed.roles is None
        with pytest.raises(ArgumentError):
            ns_report(parsed)

    def test_compat_report(self):
        report = compat_report(parse_model_text(file_for("outcome-copy")))
        assert report["kind"] == "compatibility"
        assert report["verdict"] == "INCOMPATIBLE"
        assert any("X affects Y" in v["relation"] for v in report["violations"])

    def test_compat_needs_embedding(self):
        with pytest.raises(ArgumentError):
            compat_report(parse_model_text(file_for("two-cycle-trit")))

    def test_loops_report_cyclic(self):
        report = loops_report(parse_model_text(file_for("two-cycle-trit")))
        assert report["graph_acyclic"] is False
        assert report["forced_cyclic"] is True
        assert "causal loop certified: true" in render_text(report)

    def test_loops_with_witness(self):
        scenario = get_scenario("hidden-loop")
        parsed = parse_model_text(scenario_model_text(scenario))
        witness = parse_model_text(render_model_file(scenario.hcl_witness))
        report = loops_report(parsed, witness)
        assert report["hidden_loop_certified"] is True
        assert "hidden loop certified: true" in render_text(report)

    def test_loops_witness_order_rendered(self):
        report = loops_report(parse_model_text(file_for("setting-copy")))
        assert report["forced_cyclic"] is False
        text = render_text(report)
        assert "causal loop certified: false" in text


class TestScenarioDocs:
    def test_single(self):
        report = scenario_report_doc("xor-outcome")
        assert report["passed"] is True
        text = render_text(report)
        assert text.startswith("scenario xor-outcome: pass")

    def test_unknown_name(self):
        with pytest.raises(ArgumentError):
            scenario_report_doc("does-not-exist")

    def test_suite(self):
        report = scenario_suite_doc()
        assert report["passed"] is True
        assert len(report["scenarios"]) == 11
        assert render_text(report).rstrip().endswith("suite: pass")

    def test_unknown_kind_rejected(self):
        with pytest.raises(ArgumentError):
            render_text({"kind": "mystery"})
