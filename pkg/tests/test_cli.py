import json

import pytest

from m3lab.cli import RunConfig, main, parse_config_text
from m3lab.errors import ConfigError

SPIN_CFG = """
# spin run at desk scale
grid.nx = 32
grid.ny = 32
model = M3
params.c = 0.3
params.d = 1.0
params.l = 0.0
spin.init = modulated-helix
spin.init.eps = 0.05
spin.init.kappa = 1
t_end = 0.05
save_every = 2
output_dir = spinrun
"""

NLS_CFG = """
grid.nx = 32
grid.ny = 32
model = Zakharov
params.c = 0.0
params.d = 1.0
nls.init = plane-wave
nls.init.amplitude = 0.5
nls.init.k1 = 1
nls.init.k2 = 1
t_end = 0.05
save_every = 2
output_dir = nlsrun
"""


# ---------------------------------------------------------------------------
# config parsing
# ---------------------------------------------------------------------------

def test_parse_config_roundtrip():
    values = parse_config_text(SPIN_CFG)
    assert values["grid.nx"] == 32
    assert values["params.c"] == 0.3
    assert values["spin.init.eps"] == 0.05
    assert values["spin.init.kappa"] == 1      # integers survive


def test_parse_config_rejects_unknown_key():
    with pytest.raises(ConfigError):
        parse_config_text("grid.nx = 32\nspn.init = uniform\n")


def test_parse_config_rejects_duplicates_and_garbage():
    with pytest.raises(ConfigError):
        parse_config_text("dt = 0.1\ndt = 0.2\n")
    with pytest.raises(ConfigError):
        parse_config_text("just words\n")
    with pytest.raises(ConfigError):
        parse_config_text("grid.nx = many\n")


def test_config_hash_stable():
    a = RunConfig.from_text(SPIN_CFG)
    b = RunConfig.from_text(SPIN_CFG)
    c = RunConfig.from_text(SPIN_CFG.replace("0.05", "0.06"))
    assert a.sha == b.sha
    assert a.sha != c.sha


# ---------------------------------------------------------------------------
# subcommands
# ---------------------------------------------------------------------------

@pytest.fixture
def spin_run(tmp_path):
    cfg = tmp_path / "spin.cfg"
    cfg.write_text(SPIN_CFG)
    assert main(["--output-dir", str(tmp_path), "simulate-spin", str(cfg)]) == 0
    return tmp_path / "spinrun"


@pytest.fixture
def nls_run(tmp_path):
    cfg = tmp_path / "nls.cfg"
    cfg.write_text(NLS_CFG)
    assert main(["--output-dir", str(tmp_path), "simulate-nls", str(cfg)]) == 0
    return tmp_path / "nlsrun"


def test_simulate_spin_outputs(spin_run):
    meta = json.loads((spin_run / "meta.json").read_text())
    assert meta["kind"] == "spin"
    assert len(meta["slices"]) == len(meta["times"]) >= 3
    for name in meta["slices"]:
        assert (spin_run / name).exists()
    header = (spin_run / "invariants.csv").read_text().splitlines()[0]
    assert header == "t,K1,K2,K3,Kc1,Kc2,Kc3,Q1,Q2,Q3"


def test_simulate_spin_deterministic(tmp_path):
    for sub in ("a", "b"):
        d = tmp_path / sub
        d.mkdir()
        cfg = d / "spin.cfg"
        cfg.write_text(SPIN_CFG)
        assert main(["--output-dir", str(d), "simulate-spin", str(cfg)]) == 0
    name = "spin_000001.mfld1"
    assert (tmp_path / "a" / "spinrun" / name).read_bytes() == \
        (tmp_path / "b" / "spinrun" / name).read_bytes()


def test_frame_and_charges(spin_run, tmp_path):
    assert main(["--output-dir", str(tmp_path), "frame", "spinrun"]) == 0
    assert (spin_run / "frame_000000.mfld1").exists()
    assert (spin_run / "coeffs_000001.mfld1").exists()
    report = json.loads((spin_run / "frame_report.json").read_text())
    assert report["residuals"] and "xy" in report["residuals"][0]
    assert report["residuals"][0]["xy"] < 1e-6
    assert main(["--output-dir", str(tmp_path), "charges", "spinrun"]) == 0
    rows = (spin_run / "charges.csv").read_text().splitlines()
    assert len(rows) >= 4
    q1 = float(rows[1].split(",")[7])
    assert abs(q1) < 1e-6        # helix is topologically trivial


def test_initial_condition_from_mfld1(spin_run, tmp_path):
    """A saved slice restarts a run; missing files and grid mismatches fail."""
    meta = json.loads((spin_run / "meta.json").read_text())
    slice_path = spin_run / meta["slices"][0]
    cfg = tmp_path / "restart.cfg"
    cfg.write_text(
        "grid.nx = 32\ngrid.ny = 32\nmodel = M3\nparams.c = 0.3\n"
        f"spin.init = {slice_path}\nt_end = 0.02\nsave_every = 2\n"
        "output_dir = restartrun\n")
    assert main(["--output-dir", str(tmp_path), "simulate-spin", str(cfg)]) == 0
    meta2 = json.loads((tmp_path / "restartrun" / "meta.json").read_text())
    assert len(meta2["slices"]) >= 2
    bad = tmp_path / "bad_restart.cfg"
    bad.write_text(
        "grid.nx = 16\ngrid.ny = 16\nmodel = M3\nparams.c = 0.3\n"
        f"spin.init = {slice_path}\nt_end = 0.02\noutput_dir = badrun\n")
    assert main(["--output-dir", str(tmp_path), "simulate-spin", str(bad)]) == 2
    gone = tmp_path / "gone.cfg"
    gone.write_text(
        "grid.nx = 32\ngrid.ny = 32\nmodel = M3\nparams.c = 0.3\n"
        "spin.init = nowhere.mfld1\nt_end = 0.02\noutput_dir = gonerun\n")
    assert main(["--output-dir", str(tmp_path), "simulate-spin", str(gone)]) == 2


def test_model_key_aliases():
    cfg = RunConfig.from_text("spin.model = M2\nparams.c = 0.4\nparams.d = 0.0\n"
                              "params.l = 0.3\nnls.model = Strachan\n")
    assert cfg.spin_params().model == "M2"
    assert cfg.nls_params().model == "Strachan"


def test_lax_check_q_side(nls_run, tmp_path):
    assert main(["--output-dir", str(tmp_path), "lax-check", "nlsrun",
                 "--lambda", "0.3,0.1"]) == 0
    rep = json.loads((nls_run / "lax_report.json").read_text())
    entry = rep["results"][0]
    assert entry["residual"] < 1e-3
    assert entry["trace_U"] < 1e-12
    assert entry["trace_V"] < 1e-12


def test_lax_check_scan(nls_run, tmp_path):
    assert main(["--output-dir", str(tmp_path), "lax-check", "nlsrun",
                 "--lambda", "0.3,0.1", "--lambda", "0.5,0.0",
                 "--lambda=-0.2,0.4"]) == 0
    rows = (nls_run / "lax_scan.csv").read_text().splitlines()
    assert rows[0] == "lam_re,lam_im,residual"
    assert len(rows) == 4


def test_lax_check_spin_side(spin_run, tmp_path):
    assert main(["--output-dir", str(tmp_path), "lax-check", "spinrun",
                 "--lambda", "0.4,0.2", "--spin-side"]) == 0
    rep = json.loads((spin_run / "lax_report.json").read_text())
    entry = rep["results"][0]
    assert entry["trace_U_factored"] < 1e-12
    assert entry["trace_V_factored"] < 1e-12


def test_equiv_check_small_ladder(spin_run, tmp_path):
    assert main(["--output-dir", str(tmp_path), "equiv-check", "spinrun",
                 "--ladder", "16,24,32"]) == 0
    rep = json.loads((spin_run / "equiv_report.json").read_text())
    assert rep["order"] > 1.5
    assert len(rep["ladder"]) == 3


def test_lambda_check(capsys):
    assert main(["lambda-check", "--n", "1", "--k", "2", "--a", "1",
                 "--c", "0.5", "--samples", "3"]) == 0
    out = capsys.readouterr().out
    assert "residual_analytic" in out
    rows = [line for line in out.splitlines() if line and not line.startswith(("y,", "#"))]
    assert all(float(r.split(",")[2]) < 1e-12 for r in rows)


def test_selftest_passes(capsys):
    assert main(["selftest"]) == 0
    out = capsys.readouterr().out
    assert "FAIL" not in out


def test_bad_config_exits_2(tmp_path):
    cfg = tmp_path / "bad.cfg"
    cfg.write_text("mystery.key = 1\n")
    assert main(["--output-dir", str(tmp_path), "simulate-spin", str(cfg)]) == 2
    missing = tmp_path / "nope.cfg"
    assert main(["--output-dir", str(tmp_path), "simulate-spin", str(missing)]) == 2


def test_numerical_abort_exits_3(tmp_path):
    # a uniform field has no frame: the invariants stage aborts numerically
    cfg = tmp_path / "flat.cfg"
    cfg.write_text(
        "grid.nx = 32\ngrid.ny = 32\nmodel = M3\nparams.c = 0.25\n"
        "spin.init = uniform\nt_end = 0.02\noutput_dir = flatrun\n")
    assert main(["--output-dir", str(tmp_path), "simulate-spin", str(cfg)]) == 3
