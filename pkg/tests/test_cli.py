"""Command-line behavior: output, exit codes, and server passthrough."""

import json

import pytest
from click.testing import CliRunner

from causalcompat.cli import main
from causalcompat.scenarios import get_scenario, scenario_model_text

runner = CliRunner()


@pytest.fixture(scope="module")
def files(tmp_path_factory):
    root = tmp_path_factory.mktemp("models")
    out = {}
    for name in ("classical-jamming", "xor-outcome", "two-cycle-trit",
                 "hidden-loop", "setting-copy"):
        path = root / f"{name}.model"
        path.write_text(scenario_model_text(get_scenario(name)))
        out[name] = str(path)
    witness = root / "witness.model"
    from causalcompat.modelfile import render_model_file
    witness.write_text(render_model_file(get_scenario("hidden-loop").hcl_witness))
    out["witness"] = str(witness)
    broken = root / "broken.model"
    broken.write_text("[nodes]\nA observed 0,1\n[distribution]\nscope = A\n0 = 1/3")
    out["broken"] = str(broken)
    return out


class TestAnalyze:
    def test_jamming_lines(self, files):
        r = runner.invoke(main, ["analyze", files["classical-jamming"]])
        assert r.exit_code == 0, r.output
        assert "B affects X Z: true" in r.stdout
        assert "B affects X: false" in r.stdout
        assert "jamming: true" in r.stdout

    def test_json_format(self, files):
        r = runner.invoke(main, ["analyze", files["xor-outcome"], "--format", "json"])
        assert r.exit_code == 0
        body = json.loads(r.stdout)
        assert body["report_version"] == 1
        assert body["compatibility"]["verdict"] == "INCOMPATIBLE"

    def test_conditional_count(self, files):
        r = runner.invoke(main, ["analyze", files["xor-outcome"],
                                 "--conditional", "--format", "json"])
        assert json.loads(r.stdout)["signatures_evaluated"] == 194

    def test_broken_file_exit_2(self, files):
        r = runner.invoke(main, ["analyze", files["broken"]])
        assert r.exit_code == 2
        assert "[distribution]" in r.stderr

    def test_missing_file_exit_2(self):
        r = runner.invoke(main, ["analyze", "/no/such/file.model"])
        assert r.exit_code == 2

    def test_max_nodes_cap(self, files):
        r = runner.invoke(main, ["analyze", files["xor-outcome"], "--max-nodes", "3"])
        assert r.exit_code == 2
        assert "cap" in r.stderr


class TestDelegates:
    def test_ns(self, files):
        r = runner.invoke(main, ["ns", files["setting-copy"]])
        assert r.exit_code == 0
        assert "bipartite no-signalling: false" in r.stdout

    def test_ns_needs_roles(self, files):
        r = runner.invoke(main, ["ns", files["two-cycle-trit"]])
        assert r.exit_code == 2
        assert "roles" in r.stderr

    def test_compat(self, files):
        r = runner.invoke(main, ["compat", files["xor-outcome"]])
        assert r.exit_code == 0
        assert "INCOMPATIBLE" in r.stdout
        assert "violation: A X affects Y" in r.stdout

    def test_compat_needs_embedding(self, files):
        r = runner.invoke(main, ["compat", files["two-cycle-trit"]])
        assert r.exit_code == 2
        assert "embedding" in r.stderr

    def test_loops_cyclic(self, files):
        r = runner.invoke(main, ["loops", files["two-cycle-trit"]])
        assert r.exit_code == 0
        assert "causal loop certified: true" in r.stdout

    def test_loops_with_witness(self, files):
        r = runner.invoke(main, ["loops", files["hidden-loop"],
                                 "--witness", files["witness"]])
        assert r.exit_code == 0
        assert "hidden loop certified: true" in r.stdout


class TestGeometry:
    def test_apex_example(self):
        r = runner.invoke(main, ["geometry", "apex", "-1", "0", "1", "0"])
        assert r.exit_code == 0
        assert r.stdout.strip() == "apex: (0,1)"

    def test_precedes(self):
        r = runner.invoke(main, ["geometry", "precedes", "0", "0", "0", "3"])
        assert r.stdout.strip() == "precedes: BEFORE"
        r = runner.invoke(main, ["geometry", "precedes", "0", "0", "5", "3"])
        assert r.stdout.strip() == "precedes: SPACELIKE"

    def test_contain(self):
        r = runner.invoke(main, ["geometry", "contain", "-1", "0", "1", "0", "0", "1"])
        assert r.exit_code == 0
        assert r.stdout.strip() == "pair_containment: TRUE"
        r = runner.invoke(main, ["geometry", "contain", "-1", "0", "1", "0", "0", "2"])
        assert r.stdout.strip() == "pair_containment: FALSE"

    def test_contained_undetermined_exit_3(self):
        r = runner.invoke(main, ["geometry", "contained",
                                 "--left", "-1,0,0", "--left", "1,0,0",
                                 "--left", "0,1,0", "--right", "0,1/2,0"])
        assert r.exit_code == 3
        assert "future_containment: UNDETERMINED" in r.stdout

    def test_contained_true(self):
        r = runner.invoke(main, ["geometry", "contained",
                                 "--left", "-1,0", "--left", "1,0",
                                 "--right", "0,1"])
        assert r.exit_code == 0
        assert "TRUE" in r.stdout

    def test_bad_token_exit_2(self):
        r = runner.invoke(main, ["geometry", "apex", "-1", "zero", "1", "0"])
        assert r.exit_code == 2

    def test_uneven_coords_exit_2(self):
        r = runner.invoke(main, ["geometry", "apex", "-1", "0", "1"])
        assert r.exit_code == 2


class TestScenarios:
    def test_single_pass(self):
        r = runner.invoke(main, ["scenario", "xor-outcome"])
        assert r.exit_code == 0
        assert "scenario xor-outcome: pass" in r.stdout

    def test_all(self):
        r = runner.invoke(main, ["scenario", "--all"])
        assert r.exit_code == 0, r.output
        assert "suite: pass" in r.stdout
        assert r.stdout.count("scenario ") == 11

    def test_unknown_exit_2(self):
        r = runner.invoke(main, ["scenario", "nope"])
        assert r.exit_code == 2

    def test_name_and_all_usage_error(self):
        r = runner.invoke(main, ["scenario", "xor-outcome", "--all"])
        assert r.exit_code == 2

    def test_neither_usage_error(self):
        r = runner.invoke(main, ["scenario"])
        assert r.exit_code == 2


class TestExport:
    def test_export_then_analyze(self, tmp_path):
        path = tmp_path / "exported.model"
        r = runner.invoke(main, ["export", "setting-copy", "-o", str(path)])
        assert r.exit_code == 0
        r = runner.invoke(main, ["analyze", str(path), "--format", "json"])
        assert r.exit_code == 0
        assert json.loads(r.stdout)["compatibility"]["verdict"] == "INCOMPATIBLE"

    def test_export_stdout(self):
        r = runner.invoke(main, ["export", "two-cycle-trit"])
        assert r.exit_code == 0
        assert "[mechanism X]" in r.stdout

    def test_export_unknown(self):
        r = runner.invoke(main, ["export", "nope"])
        assert r.exit_code == 2


class TestServerMode:
    @pytest.fixture(autouse=True)
    def patched_httpx(self, monkeypatch):
        from fastapi.testclient import TestClient

        from causalcompat.service import app

        client = TestClient(app)

        def strip(url: str) -> str:
            assert url.startswith("http://svc")
            return url[len("http://svc"):]

        import httpx
        monkeypatch.setattr(httpx, "post",
                            lambda url, json=None, timeout=None:
                            client.post(strip(url), json=json))
        monkeypatch.setattr(httpx, "get",
                            lambda url, timeout=None: client.get(strip(url)))

    def test_analyze_matches_local(self, files):
        local = runner.invoke(main, ["analyze", files["xor-outcome"],
                                     "--format", "json"])
        remote = runner.invoke(main, ["--server", "http://svc", "analyze",
                                      files["xor-outcome"], "--format", "json"])
        assert remote.exit_code == 0
        assert json.loads(remote.stdout) == json.loads(local.stdout)

    def test_remote_input_error(self, files):
        r = runner.invoke(main, ["--server", "http://svc", "analyze",
                                 files["broken"]])
        assert r.exit_code == 2
        assert "[distribution]" in r.stderr

    def test_remote_geometry(self):
        r = runner.invoke(main, ["--server", "http://svc", "geometry",
                                 "apex", "-1", "0", "1", "0"])
        assert r.exit_code == 0
        assert r.stdout.strip() == "apex: (0,1)"

    def test_remote_scenario(self):
        r = runner.invoke(main, ["--server", "http://svc", "scenario",
                                 "two-cycle-trit"])
        assert r.exit_code == 0
        assert "pass" in r.stdout

    def test_unreachable_server(self, files, monkeypatch):
        import httpx

        def boom(url, json=None, timeout=None):
            raise httpx.ConnectError("refused")

        monkeypatch.setattr(httpx, "post", boom)
        r = runner.invoke(main, ["--server", "http://svc", "analyze",
                                 files["xor-outcome"]])
        assert r.exit_code == 2
        assert "unreachable" in r.stderr
