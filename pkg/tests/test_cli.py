import csv
import math

import numpy as np
import pytest

from harmqc.cli import EXIT_ERROR, EXIT_FAILED, EXIT_OK, SWEEP_HEADER, main
from harmqc.config import parse_config
from harmqc.domains import Annulus, CircleDomain, Disk
from harmqc.errors import ConfigError

FAST = "grid = 16\nrefinements = 2\ninjectivity_grid = 40\npiece_n = 48\ntrace_n = 128\ntrials = 2000\n"


def run(tmp_path, text, *args):
    cfg = tmp_path / "run.cfg"
    cfg.write_text(text)
    out = tmp_path / "out"
    code = main([args[0], "--config", str(cfg), "--out", str(out), *args[1:]])
    return code, out


def read_csv(path):
    with open(path) as fh:
        first = fh.readline()
        assert first.startswith("# harmqc ") and first.rstrip().endswith("csv v1")
        return list(csv.reader(fh))


def report(out):
    return (out / "report.txt").read_text()


def field(text, key):
    for line in text.splitlines():
        if line.startswith(key + " "):
            return line[len(key):].strip()
    raise KeyError(key)


# config ---------------------------------------------------------------------

def test_parse_config_full():
    cfg = parse_config("""
        # comment
        domain = annulus
        R = 3
        h = 1 1 0
        h = -1 0 0.5   # trailing comment
        g = 2 0.05 0
        grid = 20
        seed = 7
        t_min = 0
        t_max = 1
        steps = 3
    """)
    assert cfg.domain == Annulus(3.0)
    assert cfg.h == [(1, 1.0, 0.0), (-1, 0.0, 0.5)]
    assert cfg.g == [(2, 0.05, 0.0)]
    assert (cfg.grid, cfg.seed) == (20, 7)
    assert cfg.sweep.values() == [0.0, 0.5, 1.0]
    f = cfg.harmonic_map()
    z = 1.5 + 0.5j
    assert f(z) == pytest.approx(z + 0.5j / z + np.conj(0.05 * z * z))


def test_parse_config_domains():
    assert parse_config("h = 1 1 0").domain == Disk()
    assert parse_config("h = 1 1 0\nradius = 2\ncenter = 1 1").domain == Disk(2.0, 1 + 1j)
    cd = parse_config("domain = circles\nh = 1 1 0\ncircle = 0 0 3\ncircle = 1 0 0.5").domain
    assert isinstance(cd, CircleDomain) and len(cd.circles) == 2


@pytest.mark.parametrize("text", [
    "h = 1 1",                          # short triple
    "h = 1.5 1 0",                      # fractional exponent
    "g = 1 0 0",                        # no h
    "h = 1 1 0\nfoo = 1",               # unknown key
    "h = 1 1 0\ngrid = 1",              # budget too small
    "h = 1 1 0\ngrid = x",              # not numeric
    "h = 1 1 0\ngrid = 4\ngrid = 8",    # duplicate scalar
    "h = 1 1 0\ndomain = annulus",      # annulus without R
    "h = 1 1 0\ndomain = annulus\nR = 1",
    "h = 1 1 0\ndomain = blob",
    "h = 1 1 0\nt_min = 0\nt_max = 1",  # incomplete sweep
    "h = 1 1 0\nt_min = 1\nt_max = 0\nsteps = 3",
    "h = 1 1 0\nt_min = 0\nt_max = 1\nsteps = 1",
    "h = 1 1 0\nno equals sign",
    "domain = circles\nh = 1 1 0\ncircle = 0 0 1\ncircle = 0.9 0 0.5",  # overlapping hole
])
def test_parse_config_errors(text):
    with pytest.raises(ConfigError):
        parse_config(text)


# analyze --------------------------------------------------------------------

def test_analyze_identity(tmp_path):
    code, out = run(tmp_path, FAST + "h = 1 1 0\n", "analyze")
    assert code == EXIT_OK
    rep = report(out)
    assert float(field(rep, "schwarzian_norm")) == 0.0
    assert float(field(rep, "dilatation_sup")) == 0.0
    assert field(rep, "local_univalence") == "pass"
    assert field(rep, "grid_injectivity").startswith("pass")
    rows = read_csv(out / "samples.csv")
    assert rows[0] == ["re_z", "im_z", "lambda", "norm_density"]
    data = np.array(rows[1:], dtype=float)
    z = data[:, 0] + 1j * data[:, 1]
    np.testing.assert_allclose(data[:, 2], 1 / (1 - abs(z) ** 2), rtol=1e-14)
    assert np.all(data[:, 3] == 0)


def test_analyze_shear(tmp_path):
    code, out = run(tmp_path, FAST.replace("refinements = 2", "refinements = 6")
                    + "h = 1 1 0\ng = 2 0.5 0\n", "analyze")
    assert code == EXIT_OK
    rep = report(out)
    assert float(field(rep, "schwarzian_norm")) == pytest.approx(1.5, rel=1e-2)
    assert field(rep, "boundary_trend") == "increasing"
    assert float(field(rep, "dilatation_sup")) > 0.95
    data = np.array(read_csv(out / "samples.csv")[1:], dtype=float)
    z = data[:, 0] + 1j * data[:, 1]
    np.testing.assert_allclose(data[:, 3], 1.5 * abs(z) ** 2, atol=1e-6)


def test_analyze_rejects_dilatation(tmp_path):
    code, out = run(tmp_path, FAST + "h = 1 1 0\ng = 1 2 0\n", "analyze")
    assert code == EXIT_ERROR
    assert not (out / "report.txt").exists()


def test_analyze_reports_location(tmp_path, caplog):
    code, _ = run(tmp_path, FAST + "h = 1 1 0\ng = 2 1 0\n", "analyze")
    assert code == EXIT_ERROR
    assert "DilatationBoundError" in caplog.text and "at" in caplog.text


def test_missing_config(tmp_path):
    assert main(["analyze", "--config", str(tmp_path / "nope.cfg"), "--out", str(tmp_path)]) == EXIT_ERROR


def test_grid_flag_validated(tmp_path):
    code, _ = run(tmp_path, FAST + "h = 1 1 0\n", "analyze", "--grid", "1")
    assert code == EXIT_ERROR


# trace ----------------------------------------------------------------------

def test_trace_identity_circle(tmp_path):
    code, out = run(tmp_path, FAST + "h = 1 1 0\n", "trace", "--n", "256")
    assert code == EXIT_OK
    rows = read_csv(out / "boundary_0.csv")
    assert rows[0] == ["theta", "re_f", "im_f"]
    data = np.array(rows[1:], dtype=float)
    assert len(data) == 256
    np.testing.assert_allclose(data[:, 1] + 1j * data[:, 2], np.exp(1j * data[:, 0]), atol=1e-15)
    assert float(field(report(out), "turning_constant")) == pytest.approx(1.0, abs=0.05)


def test_trace_affine_ellipse(tmp_path):
    code, out = run(tmp_path, FAST + "h = 1 1 0\ng = 1 0.3 0\n", "trace")
    assert code == EXIT_OK
    data = np.array(read_csv(out / "boundary_0.csv")[1:], dtype=float)
    th = data[:, 0]
    np.testing.assert_allclose(data[:, 1], 1.3 * np.cos(th), atol=1e-14)
    np.testing.assert_allclose(data[:, 2], 0.7 * np.sin(th), atol=1e-14)
    assert field(report(out), "stable") == "true"


def test_trace_non_jordan(tmp_path):
    code, out = run(tmp_path, FAST + "domain = annulus\nR = 2\nh = 2 1 0\n", "trace", "--circle", "0")
    assert code == EXIT_FAILED
    rep = report(out)
    assert field(rep, "jordan") == "false"
    assert "segments" in field(rep, "jordan_witness")


def test_trace_bad_circle(tmp_path):
    code, _ = run(tmp_path, FAST + "h = 1 1 0\n", "trace", "--circle", "3")
    assert code == EXIT_ERROR


# decompose ------------------------------------------------------------------

def test_decompose_identity(tmp_path):
    code, out = run(tmp_path, FAST + "domain = annulus\nR = 2\nh = 1 1 0\n", "decompose")
    assert code == EXIT_OK
    for k in range(3):
        rows = read_csv(out / f"piece_{k}.csv")
        assert rows[0] == ["re_z", "im_z", "re_f", "im_f"]
    assert field(report(out), "covering_sweep").startswith("pass")


def test_decompose_square(tmp_path):
    code, out = run(tmp_path, FAST + "domain = annulus\nR = 2\nh = 2 1 0\n", "decompose")
    assert code == EXIT_FAILED
    assert "FAIL witness" in report(out)


def test_decompose_bad_modulus(tmp_path):
    code, _ = run(tmp_path, FAST + "domain = annulus\nR = 0.5\nh = 1 1 0\n", "decompose")
    assert code == EXIT_ERROR
    code, _ = run(tmp_path, FAST + "h = 1 1 0\n", "decompose")
    assert code == EXIT_ERROR


# sweep ----------------------------------------------------------------------

SHEAR_SWEEP = FAST + "h = 1 1 0\ng_t = 2 0.5 0\nt_min = 0\nt_max = 1\nsteps = 6\n"


def sweep_table(out):
    rows = read_csv(out / "sweep.csv")
    assert rows[0] == SWEEP_HEADER
    return [dict(zip(SWEEP_HEADER, r)) for r in rows[1:]]


def test_sweep_shear_family(tmp_path):
    code, out = run(tmp_path, SHEAR_SWEEP, "sweep")
    assert code == EXIT_OK
    rows = sweep_table(out)
    assert [float(r["t"]) for r in rows] == pytest.approx([0, 0.2, 0.4, 0.6, 0.8, 1.0])
    assert float(rows[0]["norm"]) == 0.0 and rows[0]["injective"] == "true"
    norms = [float(r["norm"]) for r in rows]
    assert all(a < b for a, b in zip(norms, norms[1:]))
    # |omega_t| = t|z| < 1 on the open disk, so every row including t = 1 passes
    assert all(r["status"] == "ok" and r["injective"] == "true" for r in rows)
    rep = report(out)
    assert float(field(rep, "largest passing t")) == 1.0
    assert "not a univalence constant" in rep


def test_sweep_affine_family(tmp_path):
    code, out = run(tmp_path, FAST + "h = 1 1 0\ng_t = 1 1 0\nt_min = 0\nt_max = 0.9\nsteps = 4\n", "sweep")
    assert code == EXIT_OK
    for r in sweep_table(out):
        assert r["status"] == "ok"
        assert float(r["norm"]) <= 1e-12
        assert r["injective"] == "true"


def test_sweep_byte_identical(tmp_path):
    a = tmp_path / "a"
    b = tmp_path / "b"
    a.mkdir()
    b.mkdir()
    text = SHEAR_SWEEP.replace("steps = 6", "steps = 3")
    assert run(a, text, "sweep", "--seed", "5")[0] == EXIT_OK
    assert run(b, text, "sweep", "--seed", "5")[0] == EXIT_OK
    assert (a / "out" / "sweep.csv").read_bytes() == (b / "out" / "sweep.csv").read_bytes()


def test_sweep_requires_range(tmp_path):
    code, _ = run(tmp_path, FAST + "h = 1 1 0\n", "sweep")
    assert code == EXIT_ERROR


def test_analyze_byte_identical(tmp_path):
    outs = []
    for name in ("a", "b"):
        d = tmp_path / name
        d.mkdir()
        assert run(d, FAST + "h = 1 1 0\ng = 2 0.3 0\n", "analyze")[0] == EXIT_OK
        outs.append((d / "out" / "samples.csv").read_bytes())
    assert outs[0] == outs[1]


def test_sweep_records_row_failures(tmp_path):
    code, out = run(tmp_path, FAST + "h = 1 1 0\ng_t = 2 0.5 0\nt_min = 0.5\nt_max = 2\nsteps = 4\n", "sweep")
    assert code == EXIT_OK
    status = [r["status"] for r in sweep_table(out)]
    assert status == ["ok", "ok", "dilatation_ge_1", "dilatation_ge_1"]
    assert float(field(report(out), "largest passing t")) == 1.0
