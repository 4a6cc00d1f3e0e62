import filecmp

import pytest

from meshsched import cli
from meshsched.config import apply_overrides, parse_config, preset
from meshsched.model import ConfigError
from meshsched.weights import POLICIES


def test_default_preset():
    plan = preset("default")
    assert [r.policy for r in plan.runs] == list(POLICIES)
    r = plan.runs[0]
    assert (r.nodes, r.area, r.slots, r.gateway_mode, r.flow_mode, r.flow_count) == \
        (10, 350.0, 10_000, "max-distance", "first", 8)
    assert (r.v, r.max_rate) == (30.0, 10.0)
    assert r.phy.noise_mw == pytest.approx(1e-9) and r.phy.max_power_mw == pytest.approx(100)


def test_mrmc_and_sweep_presets():
    mrmc = preset("mrmc")
    assert {(r.policy, r.channels) for r in mrmc.runs} == {
        ("Wr", 1), ("Wr", 2), ("WrD", 1), ("WrD", 2)}
    sweep = preset("sweep")
    assert {(r.nodes, r.area) for r in sweep.runs} == {(10, 350), (15, 450), (20, 500)}
    assert all(r.slots == 2600 for r in sweep.runs)
    assert {r.flow_mode for r in sweep.runs if r.nodes > 10} == {"random"}
    with pytest.raises(ConfigError):
        preset("huge")


def test_parse_config_sections():
    plan = parse_config("""
[phy]
noise_dbm = -80
rates = 12:9.03, 6:6.02
[net]
nodes = 12
seeds = 1 2
gateways = 3 7
[flows]
sources = 1 2
[scheduler]
policies = W WrdD
schedules = 2
[output]
dir = somewhere
trace = yes
""")
    assert len(plan.runs) == 4
    r = plan.runs[0]
    assert r.phy.noise_mw == pytest.approx(1e-8)
    assert r.rate_table().rates.tolist() == [12e6, 6e6]
    assert r.gateway_ids == (3, 7) and r.flow_sources == (1, 2)
    assert r.schedules == 2
    assert plan.trace and str(plan.out_dir) == "somewhere"


@pytest.mark.parametrize("text", [
    "[net]\nnodez = 10\n",
    "[bogus]\nx = 1\n",
    "[scheduler]\npolicy = best\n",
    "[phy]\nrates = 54\n",
    "[net]\nnodes = ten\n",
    "not an ini file",
])
def test_bad_config_rejected(text):
    with pytest.raises(ConfigError):
        parse_config(text)


def test_overrides():
    plan = apply_overrides(preset("default"), policy="WrD", seed=4, slots=50, channels=2)
    assert len(plan.runs) == 1
    r = plan.runs[0]
    assert (r.policy, r.seed, r.slots, r.channels, r.radios) == ("WrD", 4, 50, 2, 2)


def run_cli(*args):
    return cli.main(["run", *args])


def test_run_writes_reports(tmp_path, capsys):
    out = tmp_path / "a"
    assert run_cli("--policy", "W", "--slots", "40", "--out", str(out), "--trace") == 0
    stem = "W_N10_C1_seed1_T40"
    for suffix in ("flows.csv", "gateway_ratio.csv", "fairness.csv", "summary.csv",
                   "summary.json", "trace.csv", "topology.txt"):
        assert (out / f"{stem}_{suffix}").exists()
    assert (out / "default_sweep_summary.csv").exists()
    assert "aggregate_throughput_mbps" in capsys.readouterr().out
    header = (out / f"{stem}_flows.csv").read_text().splitlines()
    assert any(l.startswith("# config_hash: ") for l in header)
    assert any(l.startswith("# version: meshsched") for l in header)


def test_byte_identical_reruns(tmp_path):
    for d in ("a", "b"):
        assert run_cli("--policy", "WrD", "--slots", "60", "--out", str(tmp_path / d),
                       "--trace") == 0
    names = sorted(p.name for p in (tmp_path / "a").iterdir())
    assert names == sorted(p.name for p in (tmp_path / "b").iterdir())
    match, mismatch, errors = filecmp.cmpfiles(tmp_path / "a", tmp_path / "b", names,
                                               shallow=False)
    assert not mismatch and not errors


def test_resume_skips_completed(tmp_path, monkeypatch):
    out = str(tmp_path)
    assert run_cli("--policy", "W", "--slots", "30", "--out", out) == 0

    def boom(*a, **k):
        raise AssertionError("completed run executed again")

    monkeypatch.setattr(cli, "Simulation", boom)
    assert run_cli("--policy", "W", "--slots", "30", "--out", out) == 0
    with pytest.raises(AssertionError):
        run_cli("--policy", "W", "--slots", "31", "--out", out)


def test_exit_codes(tmp_path, capsys):
    assert run_cli("--policy", "nope", "--out", str(tmp_path)) == 2
    assert run_cli("--seed", "2", "--slots", "5", "--policy", "W", "--out", str(tmp_path)) == 3
    bad = tmp_path / "bad.ini"
    bad.write_text("[net]\nnodez = 3\n")
    assert run_cli("--config", str(bad)) == 2
    assert run_cli("--config", str(tmp_path / "missing.ini")) == 2
    assert "error:" in capsys.readouterr().err


def test_topology_command(tmp_path, capsys):
    path = tmp_path / "t.txt"
    assert cli.main(["topology", str(path)]) == 0
    assert "target=[3,6]" in capsys.readouterr().out
    assert path.read_text().startswith("# gateways ")
    cfg = tmp_path / "fixed.ini"
    cfg.write_text(f"[net]\ntopology_file = {path.name}\n[scheduler]\npolicy = W\nslots = 20\n"
                   f"[output]\ndir = {tmp_path / 'out'}\n")
    assert run_cli("--config", str(cfg)) == 0
