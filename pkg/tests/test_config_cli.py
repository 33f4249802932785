import json
import logging

import pytest

from horseshoe import constants as C
from horseshoe import tangency
from horseshoe.cli import EXIT_ERROR, run
from horseshoe.config import RunConfig, load_config
from horseshoe.errors import ConfigError


def _run(capsys, *argv):
    code = run(list(argv))
    return code, json.loads(capsys.readouterr().out.strip().splitlines()[-1])


def test_defaults_match_constants():
    cfg = load_config(None)
    assert cfg.grid.n_max == C.N_ROWS - 1 and cfg.grid.spacing == C.STEP_B
    assert cfg.tolerances.bisection == C.BISECTION_TOL
    assert cfg.stencil_delta == C.SLOPE_DELTA
    assert cfg.cans.radius_factor == C.RADIUS_FACTOR
    assert tuple(cfg.window) == tuple(C.WINDOW)


def test_unknown_keys_rejected(tmp_path):
    with pytest.raises(ConfigError):
        load_config({"grid": {"sign": "+", "rows": 3}})
    with pytest.raises(ConfigError):
        load_config({"colour": "red"})
    p = tmp_path / "bad.json"
    p.write_text("{not json")
    with pytest.raises(ConfigError):
        load_config(p)


@pytest.mark.parametrize("patch", [
    {"grid": {"sign": "x"}},
    {"tolerances": {"arc": 0}},
    {"window": [1, 0, 0, 1]},
    {"cans": {"alpha": 1.5}},
    {"cans": {"preset": "nope"}},
    {"jobs": 0},
])
def test_invalid_values_rejected(patch):
    with pytest.raises(ConfigError):
        load_config(patch)


def test_lists_become_tuples():
    cfg = load_config({"window": [-3, 3, -3, 3], "cans": {"wide_rows_minus": [19, 21]}})
    assert cfg.window == (-3, 3, -3, 3)
    assert isinstance(cfg.cans.wide_rows_minus, tuple)
    assert load_config(cfg.as_dict()).as_dict() == cfg.as_dict()


def test_certify_corner_extend(tmp_path, capsys):
    out = tmp_path / "out"
    code, rep = _run(capsys, "certify", "--out", str(out))
    assert code == 0 and rep["ok"]
    center = rep["summary"]["center"]
    assert center["half_width"] < 7 / 8
    hull = rep["summary"]["chains"]["+"]["hull"]
    assert hull[0] == pytest.approx(1e-6, abs=1e-6) and hull[1] == pytest.approx(7.699311, abs=1e-6)
    hull = rep["summary"]["chains"]["-"]["hull"]
    assert hull[0] == pytest.approx(-8.198261, abs=1e-6) and hull[1] == pytest.approx(-0.24632, abs=1e-6)
    assert (out / "certificates_plus.csv").exists() and (out / "certify.json").exists()

    code, rep = _run(capsys, "corner", "--out", str(out))
    assert code == 0 and rep["summary"]["separation"] == pytest.approx(0.000001 + 0.24632, abs=1e-9)

    code, rep = _run(capsys, "extend", "--out", str(out))
    assert code == 0
    assert rep["summary"]["+"]["extremal_row"] == 50
    assert rep["summary"]["+"]["extremal_value"] == pytest.approx(2 * 5.699311, abs=1e-5)
    assert rep["summary"]["-"]["extremal_value"] == pytest.approx(2 * -6.198261, abs=1e-5)


def test_repeat_runs_are_bitwise_identical(tmp_path, capsys):
    for d in ("r1", "r2"):
        assert run(["certify", "--out", str(tmp_path / d)]) == 0
    capsys.readouterr()
    for name in ("certificates_plus.csv", "certificates_minus.csv", "certify.json"):
        a = (tmp_path / "r1" / name).read_bytes()
        assert a == (tmp_path / "r2" / name).read_bytes()
        assert b"\r\n" not in a


def test_errors_give_json_and_nonzero_exit(tmp_path, capsys):
    code, rep = _run(capsys, "tangency", "--out", str(tmp_path))
    assert code == EXIT_ERROR and "error" in json.dumps(rep).lower()
    cfg = tmp_path / "c.json"
    cfg.write_text(json.dumps({"bogus": 1}))
    code, rep = _run(capsys, "certify", "--config", str(cfg), "--out", str(tmp_path))
    assert code == EXIT_ERROR


def test_emit_plots_columns(tmp_path, capsys):
    code, rep = _run(capsys, "emit-plots", "--out", str(tmp_path))
    assert code == 0
    cols = {}
    for name in ("figure1", "figure2", "figure3", "figure4"):
        lines = (tmp_path / f"{name}.csv").read_text().splitlines()
        header = lines[0].split(",")
        assert header[:2] == ["b", "a_boundary"]
        cols[name] = [row.split(",")[0] for row in lines[1:]]
    assert len(cols["figure1"]) == 25
    assert cols["figure2"] == cols["figure3"] == cols["figure4"]
    assert "a_gamma_p3A" in rep["summary"]["figure4"]["columns"]
    assert "a_gamma_p3B" in rep["summary"]["figure4"]["columns"]


def test_table_cache_reuse_and_corrupt_tail(tmp_path, capsys, monkeypatch, caplog):
    cfg = tmp_path / "c.json"
    cache = tmp_path / "cache" / "r.jsonl"
    cfg.write_text(json.dumps({"cache_path": str(cache)}))
    calls = []
    real = tangency.a_tgc

    def counting(b, **kw):
        calls.append(b)
        return real(b, **kw)

    monkeypatch.setattr(tangency, "a_tgc", counting)
    argv = ["table", "--sign", "+", "--rows", "1", "--config", str(cfg), "--out", str(tmp_path)]
    code, rep = _run(capsys, *argv)
    assert code == 0 and rep["ok"] and calls
    first = len(calls)
    assert _run(capsys, *argv)[0] == 0
    assert len(calls) == first
    # a truncated final record is skipped with a warning and the row is recomputed
    text = cache.read_text()
    cache.write_text(text[: len(text) // 2])
    with caplog.at_level(logging.WARNING):
        code, rep = _run(capsys, *argv)
    assert code == 0 and rep["ok"]
    assert "corrupt" in caplog.text
    assert len(calls) > first


def test_runconfig_solver_kwargs():
    kw = RunConfig().solver_kwargs()
    assert set(kw) == {"window", "arc_tol", "merge_tol", "tol"}
