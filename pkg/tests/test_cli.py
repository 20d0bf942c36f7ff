import csv
import json
import re

import numpy as np
import pytest

from phtwist.cli import main
from phtwist.config import CONFIG_ENV, Config, ConfigError
from phtwist.foliations import ModelFoliations
from phtwist.svg import foliations_svg, heatmap_svg, integral_curve

FAST = {"n_grid": 64, "t_grid": 16, "center_grid": 16, "sweep_n": [16, 32, 64],
        "cocycle_samples": 64, "da_samples": 20, "ftle_samples": 5, "ftle_time": 20.0}


def write_config(tmp_path, **over):
    path = tmp_path / "cfg.json"
    path.write_text(json.dumps({**FAST, "out_dir": str(tmp_path / "out"), **over}))
    return path


def test_config_defaults_valid():
    cfg = Config().validate()
    assert cfg.to_dict()["schemaVersion"] == 1
    assert Config.from_dict(cfg.to_dict()) == cfg


def test_config_field_level_diagnostics():
    with pytest.raises(ConfigError) as err:
        Config.from_dict({"matrix": [[2, 1], [1, 1]], "flat_lo": 0.95, "n_grid": 8,
                          "alpha_profile": "cubic"})
    names = {p.split(":")[0] for p in err.value.problems}
    assert names == {"matrix", "flat_lo", "n_grid", "alpha_profile"}
    with pytest.raises(ConfigError, match="unknown key"):
        Config.from_dict({"bogus": 1})


def test_config_from_env(tmp_path, monkeypatch):
    path = write_config(tmp_path, seed=7)
    monkeypatch.setenv(CONFIG_ENV, str(path))
    assert Config.load().seed == 7


def test_digest_tracks_content():
    assert Config().digest() == Config().digest()
    assert Config(seed=1).digest() != Config().digest()


def test_homology_command(tmp_path):
    assert main(["homology", "--config", str(write_config(tmp_path))]) == 0
    rep = json.loads((tmp_path / "out" / "homology.json").read_text())
    assert rep["matrix"] == [[1, 0], [1, 1]] and rep["obstructed"] is True


def test_certificate_exit_codes(tmp_path, capsys):
    cfg = str(write_config(tmp_path))
    assert main(["certificate", "--config", cfg]) == 0
    rep = json.loads((tmp_path / "out" / "certificate.json").read_text())
    assert all(r["margin_cs_uu"] >= 0.05 and r["margin_cu_ss"] >= 0.05 for r in rep["reports"])
    assert main(["certificate", "--config", cfg, "--threshold", "0.999"]) == 1
    assert "limiting margin" in capsys.readouterr().err
    assert main(["certificate", "--config", cfg, "--c-max", "0"]) == 0
    assert json.loads((tmp_path / "out" / "certificate.json").read_text())["n0"] == 1.0


def test_bad_config_exit_one(tmp_path, capsys):
    cfg = write_config(tmp_path, flat_hi=0.05)
    assert main(["homology", "--config", str(cfg)]) == 1
    assert "flat_lo" in capsys.readouterr().err


def test_sweep_rows_and_single_n(tmp_path):
    cfg = str(write_config(tmp_path))
    assert main(["sweep", "--config", cfg]) == 0
    rows = list(csv.DictReader(open(tmp_path / "out" / "sweep.csv")))
    assert [float(r["N"]) for r in rows] == [16, 32, 64]
    m = [min(float(r["marginCsUu"]), float(r["marginCuSs"])) for r in rows]
    assert m == sorted(m)
    assert main(["sweep", "--config", cfg, "--sweep-n", "32"]) == 0
    single = list(csv.DictReader(open(tmp_path / "out" / "sweep.csv")))
    assert single == [rows[1]]
    assert main(["sweep", "--config", cfg, "--sweep-n"]) == 1


def test_center_with_twist_disabled(tmp_path):
    cfg = str(write_config(tmp_path, twist_enabled=False))
    assert main(["center", "--config", cfg]) == 0
    rows = list(csv.DictReader(open(tmp_path / "out" / "displacement.csv")))
    assert len(rows) == 16 * 16
    assert all(float(r["Dx"]) == 0.0 and float(r["Dy"]) == 0.0 for r in rows)


def test_all_is_reproducible_and_listed(tmp_path):
    a = write_config(tmp_path)
    assert main(["all", "--config", str(a)]) == 0
    out = tmp_path / "out"
    manifest = json.loads((out / "manifest.json").read_text())
    emitted = sorted(p.name for p in out.iterdir())
    assert manifest["files"] == emitted
    for name in ("foliations.svg", "sweep.csv", "displacement.csv", "displacement.svg",
                 "certificate.json", "homology.json", "da_verify.json"):
        assert name in emitted
    first = {n: (out / n).read_bytes() for n in emitted if n != "manifest.json"}
    assert main(["all", "--config", str(a)]) == 0
    assert first == {n: (out / n).read_bytes() for n in first}


def test_unwritable_out_dir(tmp_path, capsys):
    blocker = tmp_path / "file"
    blocker.write_text("x")
    cfg = str(write_config(tmp_path))
    assert main(["homology", "--config", cfg, "--out-dir", str(blocker / "sub")]) == 1
    assert str(blocker) in capsys.readouterr().err


def test_foliation_svg_has_four_compact_leaves():
    text = foliations_svg(ModelFoliations(), n_seeds=4)
    leaves = re.findall(r'<line class="compact-leaf (\w)-leaf" data-x="([0-9.]+)"', text)
    assert sorted(leaves) == [("s", "0.0"), ("s", "0.5"), ("u", "0.25"), ("u", "0.75")]


def test_u_curves_are_translated_s_curves():
    fol = ModelFoliations()
    s = np.array(integral_curve(fol.s_direction, 0.3, 0.5, length=0.2)[0])
    u = np.array(integral_curve(fol.u_direction, 0.55, 0.5, length=0.2)[0])
    assert np.allclose(u[:, 0] - 0.25, s[:, 0], atol=1e-12)
    assert np.allclose(u[:, 1], s[:, 1], atol=1e-12)


def test_curve_refinement_keeps_shape():
    fol = ModelFoliations()
    coarse = np.array(integral_curve(fol.s_direction, 0.3, 0.5, length=0.2, step=4e-3)[0])
    fine = np.array(integral_curve(fol.s_direction, 0.3, 0.5, length=0.2, step=2e-3)[0])
    assert len(fine) > len(coarse)
    assert np.allclose(fine[::2], coarse, atol=1e-8)


def test_heatmap_svg_cells():
    text = heatmap_svg(np.arange(12.0).reshape(3, 4))
    assert text.count("<rect") == 12
