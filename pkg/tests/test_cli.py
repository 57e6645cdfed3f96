import math
import subprocess
import sys

import numpy as np
import pytest

from tfscatter.cli import EXIT_CONFIG, EXIT_FAIL, EXIT_IO, EXIT_OK, main
from tfscatter.fileio import read_grid, read_ppm, read_probes, write_grid

SMOKE = """
[scatterer]
name = disk
base_panels = 8

[packet]
sigma = 1
omega0 = 6
t0 = 8

[solver]
T = 24
m = 40

[probes]
points = 2 0; -3 0.5; 0 0
times = 0:24:13

[grid]
bounds = -3, 3, -3, 3
shape = 9, 7
times = 10, 14

[output]
probes = probes.csv
grid = snap.tfwv
"""


@pytest.fixture
def smoke(tmp_path):
    path = tmp_path / "smoke.ini"
    path.write_text(SMOKE)
    return path


def test_solve_smoke(smoke, capsys):
    assert main(["solve", str(smoke)]) == EXIT_OK
    out = capsys.readouterr().out
    assert "m = 40" in out and "delta =" in out and "n_c =" in out and "max residual" in out
    d = read_probes(smoke.parent / "probes.csv")
    assert d.shape == (3 * 13, 7)
    assert np.all(np.isnan(d[26:, 3]))             # the probe at the origin is masked
    g = read_grid(smoke.parent / "snap.tfwv")
    assert g.values.shape == (2, 7, 9) and g.mask[:, 3, 4].all()


def test_solve_is_deterministic(smoke, tmp_path):
    assert main(["solve", str(smoke)]) == EXIT_OK
    a = (tmp_path / "probes.csv").read_bytes(), (tmp_path / "snap.tfwv").read_bytes()
    assert main(["solve", str(smoke), "--workers", "2"]) == EXIT_OK
    b = (tmp_path / "probes.csv").read_bytes(), (tmp_path / "snap.tfwv").read_bytes()
    assert a == b


def test_solve_delta_over_limit(tmp_path, capsys):
    path = tmp_path / "bad.ini"
    path.write_text(SMOKE.replace("m = 40", "m = 40\ndelta = 0.5"))
    assert main(["solve", str(path)]) == EXIT_CONFIG
    assert "delta_limit" in capsys.readouterr().err


def test_solve_missing_file(tmp_path):
    assert main(["solve", str(tmp_path / "none.ini")]) == EXIT_IO


def test_solve_unwritable_output(tmp_path):
    path = tmp_path / "x.ini"
    path.write_text(SMOKE.replace("probes = probes.csv", "probes = missing_dir/probes.csv"))
    assert main(["solve", str(path)]) == EXIT_IO


def test_render(tmp_path, capsys):
    v = np.zeros((2, 3, 4), complex)
    v[1, 0, 0] = complex(np.nan, 0.0)
    write_grid(tmp_path / "g.tfwv", v, (0, 1, 0, 1), [0.0, 1.0])
    assert main(["render", str(tmp_path / "g.tfwv"), "-o", str(tmp_path / "img.ppm")]) == EXIT_OK
    a, b = read_ppm(tmp_path / "img_000.ppm"), read_ppm(tmp_path / "img_001.ppm")
    assert a.shape == (3, 4, 3) and np.all(a == a[0, 0])
    assert b[-1, 0].tolist() == [0, 0, 0]
    write_grid(tmp_path / "one.tfwv", v[:1], (0, 1, 0, 1), [0.0])
    assert main(["render", str(tmp_path / "one.tfwv"), "--colormap", "log"]) == EXIT_OK
    assert (tmp_path / "one.ppm").exists()


def test_render_malformed(tmp_path):
    (tmp_path / "bad.tfwv").write_bytes(b"TFWV\x01\x00")
    assert main(["render", str(tmp_path / "bad.tfwv")]) == EXIT_IO


def test_validate_contour(capsys):
    assert main(["validate", "contour"]) == EXIT_OK
    out = capsys.readouterr().out
    assert "Cauchy identity" in out and "delta independence" in out and "all checks passed" in out


def test_validate_synthesis(capsys):
    assert main(["validate", "synthesis"]) == EXIT_OK
    assert "surrogate" in capsys.readouterr().out


def test_validate_failure_exit_code(monkeypatch):
    from tfscatter import validation
    monkeypatch.setitem(validation.SUITES, "contour",
                        lambda: [validation.Check("forced", 1.0, 0.0, False)])
    assert main(["validate", "contour"]) == EXIT_FAIL


def test_validate_unknown_suite():
    assert main(["validate", "nope"]) == EXIT_CONFIG


def test_gallery_disk(tmp_path, capsys):
    out = tmp_path / "disk.txt"
    assert main(["gallery", "disk", "--radius", "1", "-o", str(out)]) == EXIT_OK
    pts = np.loadtxt(out)
    assert pts.shape == (2048, 2)
    text = capsys.readouterr().out
    arclength = float(text.split("arclength = ")[1].split()[0])
    assert abs(arclength - 2 * math.pi) < 1e-10


def test_gallery_keyhole_and_radiator(tmp_path, capsys):
    assert main(["gallery", "keyhole", "-o", str(tmp_path / "k.txt")]) == EXIT_OK
    assert "corners = 4" in capsys.readouterr().out
    assert main(["gallery", "radiator", "-o", str(tmp_path / "r.txt")]) == EXIT_OK
    assert "petals = 5" in capsys.readouterr().out


def test_gallery_two_components(tmp_path):
    out = tmp_path / "c.txt"
    assert main(["gallery", "crescents", "--points", "300", "-o", str(out)]) == EXIT_OK
    blocks = out.read_text().strip().split("\n\n")
    assert len(blocks) == 2 and sum(len(b.splitlines()) for b in blocks) == 300


def test_gallery_errors(tmp_path):
    assert main(["gallery", "teapot"]) == EXIT_CONFIG
    assert main(["gallery", "keyhole", "--e", "5", "-o", str(tmp_path / "k.txt")]) == EXIT_CONFIG
    assert main(["gallery", "disk", "--radius", "-o", str(tmp_path / "k.txt")]) == EXIT_CONFIG


def test_module_entry_point():
    res = subprocess.run([sys.executable, "-m", "tfscatter", "--help"], capture_output=True, text=True)
    assert res.returncode == 0 and "solve" in res.stdout
    res = subprocess.run([sys.executable, "-m", "tfscatter", "validate", "bogus"], capture_output=True)
    assert res.returncode == EXIT_CONFIG
