import json
import subprocess
import sys

import pytest

from netstab.cli import main
from netstab.sim import read_trajectory_csv

from oracles import ALPHA_C_STABLE, ALPHA_C_UNSTABLE


def run(capsys, *argv):
    code = main(list(argv))
    out, err = capsys.readouterr()
    return code, out, err


def test_analyze_stable_regime(capsys):
    code, out, _ = run(capsys, "analyze", "--graph", "fig3", "--node", "sprott(mu=0.55)", "--variant", "minus",
                       "--alpha", "0.0115")
    doc = json.loads(out)
    assert code == 0
    assert doc["alpha_c"] == pytest.approx(ALPHA_C_STABLE, abs=1e-12)
    assert doc["verdict"] == "Stable"
    assert doc["beta"] == -0.0115


def test_analyze_unstable_regime(capsys):
    code, out, _ = run(capsys, "analyze", "--graph", "fig3", "--node", "sprott(mu=0)", "--variant", "plus")
    doc = json.loads(out)
    assert doc["alpha_c"] == pytest.approx(ALPHA_C_UNSTABLE, abs=1e-12)
    assert doc["lambda_min"] == pytest.approx(0.763932, abs=1e-6)
    assert doc["verdict"] == "Unstable"


def test_analyze_bipartite_not_stabilizable(capsys):
    code, out, _ = run(capsys, "analyze", "--graph", "cycle4", "--node", "sprott(mu=0)", "--variant", "plus")
    doc = json.loads(out)
    assert code == 0
    assert doc["alpha_c"] is None
    assert any("not stabilizable" in n for n in doc["notes"])


def test_analyze_writes_file(capsys, tmp_path):
    out = tmp_path / "r.json"
    code, stdout, _ = run(capsys, "analyze", "--graph", "path3", "--node", "cubic", "--alpha", "-1", "--beta", "1",
                          "--out", str(out))
    assert code == 0 and stdout == ""
    assert json.loads(out.read_text())["variant"] is None


def test_graph_info_text(capsys):
    code, out, _ = run(capsys, "graph", "info", "fig3")
    assert code == 0
    assert out.strip() == "connected, non-bipartite, degrees 3 2 3 2, balanced"


def test_graph_gen_balanced_round_trips(capsys, tmp_path):
    f = tmp_path / "g.txt"
    assert run(capsys, "graph", "gen", "--balanced", "--n", "4", "--cycles", "3", "--count", "5",
               "--out", str(f))[0] == 0
    assert f.read_text().count("directed 4") == 5
    code, out, _ = run(capsys, "graph", "info", str(f), "--format", "json")
    infos = json.loads(out)
    assert len(infos) == 5 and all(i["non_positive_divergence"] for i in infos)


def test_graph_gen_family(capsys):
    code, out, _ = run(capsys, "graph", "gen", "--family", "cycle", "--n", "3")
    assert out == "undirected 3\n1 2\n1 3\n2 3\n"


def test_check_fig7(capsys):
    code, out, _ = run(capsys, "check", "--graphs", "fig7", "--alpha", "1", "--beta", "-1")
    doc = json.loads(out)
    assert code == 0
    assert not doc["non_positive_divergence"]["passed"]
    code, out, _ = run(capsys, "check", "--graphs", "fig7", "--alpha", "-1", "--beta", "-1")
    assert json.loads(out)["non_positive_divergence"]["passed"]


def test_check_named_list(capsys):
    code, out, _ = run(capsys, "check", "--graphs", "cycle4,fig3", "--alpha", "-1", "--beta", "0.5")
    doc = json.loads(out)
    assert doc["common_quadratic"]["passed"] and doc["gershgorin"]["passed"]


def test_simulate_csv(capsys):
    code, out, _ = run(capsys, "simulate", "--graph", "path2", "--node", "cubic", "--alpha", "-1", "--beta", "1",
                       "--t-end", "1", "--dt", "0.1", "--x0", "0.5,-0.5")
    tr = read_trajectory_csv(out)
    assert code == 0 and len(tr.times) == 11 and not tr.diverged


def test_simulate_switched_json(capsys):
    code, out, _ = run(capsys, "simulate", "--graph", "fig7", "--node", "cubic", "--alpha", "-1", "--beta", "-1",
                       "--t-end", "10", "--switches", "3", "--record-every", "10", "--format", "json")
    doc = json.loads(out)
    assert len(doc["signal"]["switch_times"]) == 3
    assert doc["final_norm"] < 0.5


def test_simulate_dp54(capsys):
    code, out, _ = run(capsys, "simulate", "--graph", "fig3", "--node", "sprott(mu=0.55)", "--variant", "minus",
                       "--alpha", "0.01", "--method", "dp54", "--t-end", "5", "--format", "json")
    assert code == 0 and json.loads(out)["times"][-1] == pytest.approx(5.0)


def test_simulate_config(capsys, tmp_path):
    cfg = tmp_path / "c.json"
    cfg.write_text(json.dumps({"node": "cubic", "graphs": ["cycle3"], "alpha": -1.0, "beta": 1.0,
                               "integrator": {"t_end": 2.0, "dt": 0.1}}))
    code, out, _ = run(capsys, "simulate", "--config", str(cfg))
    assert code == 0 and read_trajectory_csv(out).times[-1] == pytest.approx(2.0)


def test_reproduce_writes_artifacts(capsys, tmp_path):
    code, out, _ = run(capsys, "reproduce", "--figure", "fig6", "--out", str(tmp_path))
    assert code == 0
    assert out.startswith("fig6: alpha=-1 beta=-1 sufficient_conditions=met")
    names = {p.name for p in tmp_path.iterdir()}
    assert {"trajectory.csv", "channel_1.svg", "signal.json", "graphs.txt", "verdict.json"} <= names
    verdict = json.loads((tmp_path / "verdict.json").read_text())
    assert verdict["conditions"]["lyapunov_decrease"]["passed"]
    assert (tmp_path / "channel_1.svg").read_text().startswith("<svg")


def test_reproduce_sprott_short_horizon(capsys, tmp_path):
    code, out, _ = run(capsys, "reproduce", "--figure", "fig1", "--t-end", "50", "--out", str(tmp_path))
    assert code == 0 and "predicted=Stable" in out
    assert (tmp_path / "projection.svg").exists()


@pytest.mark.parametrize("argv", [
    ["analyze", "--graph", "fig3"],
    ["analyze", "--graph", "nosuch", "--node", "cubic", "--variant", "plus"],
    ["analyze", "--graph", "fig3", "--node", "lorenz", "--variant", "plus"],
    ["simulate", "--graph", "fig3", "--node", "cubic", "--alpha", "1", "--beta", "1", "--dt", "-1"],
    ["graph", "gen", "--n", "4"],
    ["bogus"],
])
def test_usage_errors_exit_2(capsys, argv):
    assert run(capsys, *argv)[0] == 2


def test_parse_error_exit_2(capsys, tmp_path):
    f = tmp_path / "bad.txt"
    f.write_text("undirected 2\n1 1\n")
    code, _, err = run(capsys, "graph", "info", str(f))
    assert code == 2 and "line 2" in err


def test_marginal_node_reported_not_fatal(capsys):
    # the verdict is still defined; only the critical coupling is not
    code, out, _ = run(capsys, "analyze", "--graph", "fig3", "--node", "sprott(mu=0.5)", "--variant", "minus")
    doc = json.loads(out)
    assert code == 0
    assert doc["alpha_c"] is None and any("marginal" in n for n in doc["notes"])


def test_numerical_failure_exit_3(capsys):
    code, _, err = run(capsys, "simulate", "--graph", "path2", "--node", "linear([[0, 0], [0, 0]])",
                       "--alpha", "1", "--beta", "1", "--x0", "1,1,1,1", "--method", "dp54", "--t-end", "1",
                       "--rtol", "1e-300", "--atol", "1e-300")
    assert code == 3 and "numerical failure" in err


def test_exhausted_generator_exit_3(capsys):
    assert run(capsys, "graph", "gen", "--balanced", "--n", "3", "--cycles", "4")[0] == 3


def test_console_entry_point():
    proc = subprocess.run([sys.executable, "-m", "netstab.cli", "graph", "info", "cycle5"],
                          capture_output=True, text=True, check=False)
    assert proc.returncode == 0
    assert proc.stdout.strip() == "connected, non-bipartite, degrees 2 2 2 2 2, balanced"
