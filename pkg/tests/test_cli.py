import json
import math

import numpy as np
import pytest

from nvzero.cli import main
from nvzero.model import CONFIG_ENV_VAR


def run(*argv):
    return main([str(a) for a in argv])


def read_lines(path):
    text = path.read_text()
    assert "\r" not in text
    return text.splitlines()


def test_fig2_outputs(tmp_path):
    assert run("--out", tmp_path, "--points", 9, "fig2") == 0
    for name in ("fig2a", "fig2b", "fig2c", "fig2d"):
        assert (tmp_path / f"{name}.csv").exists()
    lines = read_lines(tmp_path / "fig2a.csv")
    assert lines[0] == "field_V_per_um,e_lower_GHz,e_upper_GHz,case"
    # five cases, nine samples each
    assert len(lines) == 1 + 5 * 9
    cases = {l.rsplit(",", 1)[1] for l in lines[1:]}
    assert cases == {"Y0", "Y12_a0", "Y12_a90", "Y12_am90", "Y12_a180"}
    # undistorted zero-field row shows the bare spin-orbit doublet
    first = lines[1].split(",")
    assert float(first[0]) == 0.0
    assert float(first[2]) == pytest.approx(2.15)


def test_fig2_manifest(tmp_path):
    run("--out", tmp_path, "--points", 9, "fig2")
    m = json.loads((tmp_path / "fig2_manifest.json").read_text())
    assert m["command"] == "fig2"
    assert m["options"]["points"] == 9
    assert m["constants"]["lambda_par"] == 4.3
    assert set(m["outputs"]) == {"fig2a.csv", "fig2b.csv", "fig2c.csv", "fig2d.csv"}
    assert "generated_at" in m and "version" in m


def test_fig2_byte_identical_reruns(tmp_path):
    a, b = tmp_path / "a", tmp_path / "b"
    run("--out", a, "--points", 9, "fig2")
    run("--out", b, "--points", 9, "fig2")
    for name in ("fig2a", "fig2b", "fig2c", "fig2d"):
        assert (a / f"{name}.csv").read_bytes() == (b / f"{name}.csv").read_bytes()


def test_shared_options_accepted_around_subcommand(tmp_path):
    # the same run spelled three ways, including both positions at once
    # (last one wins)
    a, b, c = tmp_path / "a", tmp_path / "b", tmp_path / "c"
    assert run("--out", a, "--points", 9, "fig2") == 0
    assert run("fig2", "--out", b, "--points", 9) == 0
    assert run("--out", tmp_path / "x", "--points", 9, "fig2", "--out", c) == 0
    assert not (tmp_path / "x" / "fig2a.csv").exists()
    for name in ("fig2a", "fig2b", "fig2c", "fig2d"):
        ref = (a / f"{name}.csv").read_bytes()
        assert (b / f"{name}.csv").read_bytes() == ref
        assert (c / f"{name}.csv").read_bytes() == ref
    # nested subcommands take them too
    assert run("spectro", "synth", "--snr", 40, "--seed", 3,
               "--out", tmp_path / "s1") == 0
    assert run("--seed", 3, "--out", tmp_path / "s2", "spectro", "synth",
               "--snr", 40) == 0
    s1 = (tmp_path / "s1" / "spectrum.csv").read_bytes()
    assert s1 == (tmp_path / "s2" / "spectrum.csv").read_bytes()


def test_fig3_outputs(tmp_path):
    assert run("--out", tmp_path, "--points", 5, "fig3") == 0
    lines = read_lines(tmp_path / "fig3b.csv")
    assert lines[0] == "field_V_per_um,orientation,e_lower_GHz,e_upper_GHz,case"
    # five cases, five samples, four orientations
    assert len(lines) == 1 + 5 * 5 * 4
    assert len(read_lines(tmp_path / "fig3e.csv")) == 1 + 5 * 5
    orients = {l.split(",")[1] for l in lines[1:]}
    assert orients == {"[111]", "[-1-11]", "[-11-1]", "[1-1-1]"}


def test_fig3_byte_identical_reruns(tmp_path):
    a, b = tmp_path / "a", tmp_path / "b"
    run("--out", a, "--points", 5, "fig3")
    run("--out", b, "--points", 5, "fig3")
    for name in ("fig3b", "fig3c", "fig3d", "fig3e"):
        assert (a / f"{name}.csv").read_bytes() == (b / f"{name}.csv").read_bytes()


def test_decoherence_json(tmp_path, capsys):
    assert run("--out", tmp_path, "decoherence") == 0
    d = json.loads((tmp_path / "decoherence.json").read_text())
    assert d["kappa"] == pytest.approx(1.346, abs=1e-3)
    assert d["splitting_spread_GHz"]["large_djt"] == pytest.approx(10.0, abs=0.1)
    assert d["noise"]["p_plus_delta_p"] == pytest.approx(0.107, abs=0.005)
    assert d["lifetime_floor_ns"]["4.2"] == pytest.approx(5.32, abs=0.01)
    assert d["lifetime_floor_ns"]["1.0"] == pytest.approx(15.94, abs=0.01)
    # stdout carries the same payload
    assert json.loads(capsys.readouterr().out)["kappa"] == d["kappa"]


def test_memory_bulk_json(tmp_path):
    assert run("--out", tmp_path, "memory") == 0
    d = json.loads((tmp_path / "memory.json").read_text())
    assert d["coupling_strength"] == pytest.approx(0.9534, abs=1e-4)
    assert d["sub_wavelength"] is False
    assert d["inputs_si"]["pulse_energy_J"] == 10e-9


def test_memory_waveguide_json(tmp_path):
    assert run("--out", tmp_path, "memory", "--geometry", "waveguide",
               "--pulse-energy", 0.1e-9) == 0
    d = json.loads((tmp_path / "memory.json").read_text())
    assert d["coupling_strength"] == pytest.approx(54.819, abs=1e-3)
    assert d["sub_wavelength"] is True


def test_memory_rejects_bad_input(tmp_path, capsys):
    assert run("--out", tmp_path, "memory", "--detuning", -1.0) == 2
    assert "error:" in capsys.readouterr().err


def test_spectro_pipeline(tmp_path):
    assert run("--out", tmp_path, "--seed", 0, "spectro", "synth",
               "--snr", 40) == 0
    csv = tmp_path / "spectrum.csv"
    assert csv.exists()
    assert run("--out", tmp_path, "spectro", "fit", "--input", csv) == 0
    fit = json.loads((tmp_path / "fit.json").read_text())
    assert fit["sigma_GHz"] == pytest.approx(16.0, abs=0.5)
    assert fit["converged"] is True
    assert run("--out", tmp_path, "spectro", "sweep", "--input", csv) == 0
    sweep = json.loads((tmp_path / "sweep.json").read_text())
    assert sweep["bound_GHz"] == pytest.approx(24.58, abs=0.01)
    assert sweep["upsilon_bound_GHz"] == pytest.approx(12.1, abs=0.1)
    assert sweep["upsilon_bound_clamped"] is False
    lines = read_lines(tmp_path / "sweep.csv")
    assert lines[0] == "splitting_GHz,relative_ssr,fitted_sigma_GHz"
    assert len(lines) == 1 + 41
    rel = [float(l.split(",")[1]) for l in lines[1:]]
    assert min(rel) == pytest.approx(1.0, rel=1e-9)


def test_spectro_synth_deterministic_per_seed(tmp_path):
    a, b, c = tmp_path / "a", tmp_path / "b", tmp_path / "c"
    run("--out", a, "--seed", 5, "spectro", "synth", "--snr", 40)
    run("--out", b, "--seed", 5, "spectro", "synth", "--snr", 40)
    run("--out", c, "--seed", 6, "spectro", "synth", "--snr", 40)
    assert (a / "spectrum.csv").read_bytes() == (b / "spectrum.csv").read_bytes()
    assert (a / "spectrum.csv").read_bytes() != (c / "spectrum.csv").read_bytes()


def test_spectro_missing_input(tmp_path, capsys):
    assert run("--out", tmp_path, "spectro", "fit",
               "--input", tmp_path / "nope.csv") == 2
    assert "error:" in capsys.readouterr().err


def test_config_file_flows_through(tmp_path, capsys):
    cfg = tmp_path / "alt.toml"
    cfg.write_text("[constants]\neps_E = -300.0\n")
    run("--out", tmp_path, "--config", cfg, "decoherence")
    d = json.loads((tmp_path / "decoherence.json").read_text())
    assert d["kappa"] == pytest.approx(0.9015945349584269, abs=1e-9)
    m = json.loads((tmp_path / "decoherence_manifest.json").read_text())
    assert m["constants"]["eps_E"] == -300.0


def test_env_config_and_flag_precedence(tmp_path, monkeypatch):
    env_cfg = tmp_path / "env.toml"
    env_cfg.write_text("[constants]\neps_E = -300.0\n")
    flag_cfg = tmp_path / "flag.toml"
    flag_cfg.write_text("[constants]\neps_E = -150.0\n")
    monkeypatch.setenv(CONFIG_ENV_VAR, str(env_cfg))
    out1 = tmp_path / "envrun"
    run("--out", out1, "decoherence")
    d1 = json.loads((out1 / "decoherence_manifest.json").read_text())
    assert d1["constants"]["eps_E"] == -300.0
    out2 = tmp_path / "flagrun"
    run("--out", out2, "--config", flag_cfg, "decoherence")
    d2 = json.loads((out2 / "decoherence_manifest.json").read_text())
    assert d2["constants"]["eps_E"] == -150.0


def test_unknown_command_exits_nonzero(capsys):
    with pytest.raises(SystemExit) as exc:
        main(["nonsense"])
    assert exc.value.code == 2


def test_fig2d_noise_falls_with_field(tmp_path):
    run("--out", tmp_path, "--points", 9, "fig2")
    lines = read_lines(tmp_path / "fig2d.csv")[1:]
    y0 = [float(l.split(",")[1]) for l in lines if l.endswith(",Y0")]
    assert y0[0] == pytest.approx(0.5)      # symmetric at zero field
    assert y0[-1] < 1e-3                    # strongly suppressed at 10 V/um