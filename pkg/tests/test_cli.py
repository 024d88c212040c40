import json

import numpy as np
import pytest

from laguerre import cli, group


def run(args):
    return cli.main(args)


def write(tmp_path, name, obj):
    path = tmp_path / name
    path.write_text(json.dumps(obj))
    return str(path)


@pytest.fixture
def sphere_files(tmp_path):
    a = write(tmp_path, "a.json", {"kind": "sphere", "center": [0, 0, 0], "radius": 1})
    b = write(tmp_path, "b.json", {"kind": "sphere", "center": [3, 0, 0], "radius": -2})
    c = write(tmp_path, "c.json", {"kind": "sphere", "center": [0, 0, 0], "radius": 2})
    return a, b, c


@pytest.fixture
def torus_spec_file(tmp_path):
    return write(tmp_path, "torus.json", {
        "builtin": "torus", "params": {"R": 2, "a": 1},
        "grid": {"u": [-np.pi / 3, np.pi / 3, 65], "v": [0, 2 * np.pi, 64],
                 "periodic": ["v"]},
        "normal": "outward",
    })


def read_out(capsys):
    return json.loads(capsys.readouterr().out)


def test_spheres_contact_tangent_pair(sphere_files, capsys):
    a, b, _ = sphere_files
    assert run(["spheres", "contact", "--a", a, "--b", b]) == 0
    out = read_out(capsys)
    assert out["contact"] is True
    assert out["F"] == pytest.approx(0.0)


def test_spheres_contact_concentric(sphere_files, capsys):
    a, _, c = sphere_files
    assert run(["spheres", "contact", "--a", a, "--b", c]) == 0
    out = read_out(capsys)
    assert out["contact"] is False
    assert out["F"] == pytest.approx(-1.0)


def test_spheres_identical_inputs(sphere_files, capsys):
    a, _, _ = sphere_files
    assert run(["spheres", "contact", "--a", a, "--b", a]) == 0
    out = read_out(capsys)
    assert out["contact"] is True and out["F"] == 0.0


def test_malformed_json_exits_2(tmp_path, capsys):
    bad = tmp_path / "bad.json"
    bad.write_text("{not json")
    a = write(tmp_path, "a.json", {"kind": "sphere", "center": [0, 0, 0], "radius": 1})
    assert run(["spheres", "contact", "--a", str(bad), "--b", a]) == 2
    assert run(["spheres", "contact", "--a", a, "--b",
                write(tmp_path, "c.json", {"kind": "blob"})]) == 2


def test_group_compose_flow_law(tmp_path, capsys):
    script = write(tmp_path, "t.json", [
        {"kind": "parabolic", "t": 1.0}, {"kind": "parabolic", "t": 2.0},
    ])
    assert run(["group", "compose", "--transform", script, "--n", "3"]) == 0
    out = read_out(capsys)
    expect = group.parabolic(3.0, 3).matrix
    assert np.abs(np.array(out["matrix"]) - expect).max() < 1e-12


def test_group_decompose_identity(tmp_path, capsys):
    script = write(tmp_path, "t.json", {
        "n": 3, "factors": [{"kind": "matrix", "rows": np.eye(6).tolist()}],
    })
    assert run(["group", "decompose", "--transform", script]) == 0
    out = read_out(capsys)
    assert out["t"] == 0.0 and out["s"] == 0.0 and out["epsilon"] == 1
    assert out["reconstruction_error"] == 0.0


def test_group_decompose_random_product(tmp_path, capsys):
    rng = np.random.default_rng(3)
    T = group.random_transform(rng, 3, factors=5)
    script = write(tmp_path, "t.json", [{"kind": "matrix", "rows": T.matrix.tolist()}])
    assert run(["group", "decompose", "--transform", script]) == 0
    out = read_out(capsys)
    assert out["reconstruction_error"] < 1e-10


def test_group_invalid_element_exits_3(tmp_path, capsys):
    script = write(tmp_path, "t.json", [
        {"kind": "matrix", "rows": np.diag([1.0, 1, 1, 1, 1, 2]).tolist()},
    ])
    assert run(["group", "decompose", "--transform", script]) == 3
    capsys.readouterr()


def test_surface_analyze(torus_spec_file, capsys, tmp_path):
    csv_path = str(tmp_path / "fields.csv")
    assert run(["surface", "analyze", "--spec", torus_spec_file, "--csv", csv_path]) == 0
    out = read_out(capsys)
    smax = out["s_eigenvalues"]["max"]
    assert smax[0] == pytest.approx(1 / np.sqrt(2), abs=1e-6)
    assert out["volume"] == pytest.approx(2 * np.pi * 4 * np.log(2 + np.sqrt(3)), rel=1e-4)
    header = open(csv_path).readline().strip().split(",")
    assert header[:2] == ["u", "v"] and "rho" in header


def test_surface_volume(torus_spec_file, capsys):
    assert run(["surface", "volume", "--spec", torus_spec_file]) == 0
    out = read_out(capsys)
    assert out["volume"] == pytest.approx(33.0988, abs=1e-3)
    assert out["forms_relative_gap"] < 1e-6


def test_surface_minimality(torus_spec_file, capsys):
    assert run(["surface", "minimality", "--spec", torus_spec_file]) == 0
    out = read_out(capsys)
    assert out["verdict"] == "non-minimal" and out["consistent"]


def test_surface_embed_catenoid(tmp_path, capsys):
    spec = write(tmp_path, "cat.json", {"space": "r31", "builtin": "maximal_catenoid_r31"})
    assert run(["surface", "embed", "--spec", spec]) == 0
    out = read_out(capsys)
    assert out["minimality"]["verdict"] == "minimal"
    assert out["transfer"]["Y_transfer"] < 1e-6


def test_surface_compare_with_transform(torus_spec_file, tmp_path, capsys):
    rng = np.random.default_rng(9)
    T = group.random_transform(rng, 3, factors=4, translation_scale=0.3, flow_scale=0.2)
    script = write(tmp_path, "t.json", [{"kind": "matrix", "rows": T.matrix.tolist()}])
    assert run(["surface", "compare", "--spec", torus_spec_file,
                "--spec2", torus_spec_file, "--transform", script]) == 0
    out = read_out(capsys)
    assert out["max_g_deviation"] < 1e-6
    assert out["max_s_eig_deviation"] < 1e-6


def test_degenerate_surface_exits_4(tmp_path, capsys):
    spec = write(tmp_path, "s.json", {"builtin": "sphere"})
    assert run(["surface", "analyze", "--spec", spec]) == 4
    capsys.readouterr()


def test_strict_mode_exits_5(torus_spec_file, capsys):
    assert run(["surface", "analyze", "--spec", torus_spec_file,
                "--strict", "--tol", "1e-12"]) == 5
    capsys.readouterr()


def test_deterministic_output(torus_spec_file, capsys, tmp_path):
    out1 = str(tmp_path / "r1.json")
    out2 = str(tmp_path / "r2.json")
    assert run(["surface", "analyze", "--spec", torus_spec_file, "--out", out1,
                "--seed", "7"]) == 0
    assert run(["surface", "analyze", "--spec", torus_spec_file, "--out", out2,
                "--seed", "7"]) == 0
    assert open(out1, "rb").read() == open(out2, "rb").read()


def test_grid_refine_flag(tmp_path, capsys):
    spec = write(tmp_path, "t.json", {
        "builtin": "torus", "params": {"R": 2, "a": 1},
        "grid": {"u": [-np.pi / 4, np.pi / 4, 33], "v": [0, 2 * np.pi, 32],
                 "periodic": ["v"]},
    })
    assert run(["surface", "volume", "--spec", spec, "--grid-refine", "2"]) == 0
    read_out(capsys)
    # refining also works when the spec relies on the builtin default grid
    bare = write(tmp_path, "bare.json", {"builtin": "torus", "params": {"R": 2, "a": 1}})
    assert run(["surface", "volume", "--spec", bare, "--grid-refine", "2"]) == 0
    out = read_out(capsys)
    assert out["volume"] == pytest.approx(33.0988, abs=1e-3)
