import json
import pytest
from unittest.mock import patch

import main
from cli.commands import cmd_check, cmd_decompose, cmd_gen, generatrix_path, parse_params
from cli.report import render
from cli.surface_file import dumps, load, save
from config import settings
from core.errors import BadParams, InternalInconsistency
from core.surface_model import Mode, PLSurface
from tests.shapes import (
    cross_polytope, cube, perturbed_cube, simplex_boundary, square_cone_sphere, octant_sphere,
)


@pytest.fixture(autouse=True)
def restore_settings(monkeypatch):
    monkeypatch.setattr(settings, "REPORT_FORMAT", "json")
    monkeypatch.setattr(settings, "REPORT_TIMINGS", False)
    monkeypatch.setattr(settings, "JOBS", 1)
    monkeypatch.setattr(settings, "PROBE_SEED", 0)


@pytest.fixture
def cube_file(tmp_path):
    return save(tmp_path / "cube.plx", cube(3))


# ===== check =====

def test_check_convex_cube(cube_file):
    code, doc = cmd_check(cube_file)
    assert code == 0
    assert doc.verdict == "ConvexEmbedding"
    assert doc.exposed_vertex == 0
    assert len(doc.witness.halfspaces) == 6
    assert ["-1", "0", "0", "0"] in doc.witness.halfspaces
    assert ["1", "0", "0", "1"] in doc.witness.halfspaces
    assert doc.local.strictly_convex == 12
    assert doc.timings == {}


def test_check_dented_cube(tmp_path):
    code, doc = cmd_check(save(tmp_path / "dent.plx", perturbed_cube()))
    assert code == 1
    assert doc.verdict == "NotLocallyConvex"
    assert doc.violations
    assert doc.witness is None


def test_check_structural_reject(tmp_path):
    base = simplex_boundary(3)
    s = PLSurface(3, Mode.EUCLIDEAN, base.vertices + ((1, 1, -1),), base.facets + ((0, 1, 4),))
    code, doc = cmd_check(save(tmp_path / "fin.plx", s))
    assert code == 2
    assert doc.verdict == "StructuralReject"
    assert doc.validation.ridge_defects


def test_check_hyperbolic_is_unsupported(tmp_path, cube_file):
    path = tmp_path / "hyp.plx"
    path.write_text(cube_file.read_text().replace("mode euclidean", "mode hyperbolic"))
    code, doc = cmd_check(path)
    assert code == 3
    assert doc.verdict == "Unsupported"
    assert "hyperbolic" in doc.error


def test_check_broken_file(tmp_path):
    path = tmp_path / "broken.plx"
    path.write_text("plconvex 1\ndim three\n")
    code, doc = cmd_check(path)
    assert code == 2
    assert doc.verdict == "FileError"
    assert "line 2" in doc.error


def test_check_internal_inconsistency(mocker, cube_file):
    mocker.patch("cli.commands.check_surface", side_effect=InternalInconsistency("witness fails clause (a)"))
    code, doc = cmd_check(cube_file)
    assert code == 4
    assert doc.verdict == "InternalInconsistency"


def test_check_mode_override(cube_file):
    code, doc = cmd_check(cube_file, mode_override="spherical")
    assert code == 0
    assert doc.mode == "spherical"
    assert doc.verdict == "ConvexConeBoundary"
    assert doc.jn.directrix_dim == "pointed"
    assert doc.jn.embedded


def test_witness_out(tmp_path, cube_file):
    target = tmp_path / "witness.json"
    cmd_check(cube_file, witness_out=target)
    data = json.loads(target.read_text())
    assert len(data["halfspaces"]) == 6
    assert data["lineality"] == []
    assert data["pointed_part_dim"] == 3


def test_no_witness_for_negative_verdict(tmp_path):
    target = tmp_path / "witness.json"
    cmd_check(save(tmp_path / "dent.plx", perturbed_cube()), witness_out=target)
    assert not target.exists()


def test_timings_when_enabled(monkeypatch, cube_file):
    monkeypatch.setattr(settings, "REPORT_TIMINGS", True)
    _, doc = cmd_check(cube_file)
    assert set(doc.timings) == {"load", "check"}


def test_reports_are_byte_identical(cube_file):
    first = render(cmd_check(cube_file)[1], "json")
    second = render(cmd_check(cube_file)[1], "json")
    assert first == second


# ===== decompose =====

def test_decompose_writes_generatrix(tmp_path):
    path = save(tmp_path / "square.plx", square_cone_sphere())
    code, doc = cmd_decompose(path)
    assert code == 0
    assert doc.jn.lineality_dim == 1
    assert doc.jn.generatrix_cells == 4
    assert doc.jn.generatrix_file == "square.generatrix.plx"
    generatrix = load(generatrix_path(path))
    assert generatrix.ambient_dim == 2
    assert len(generatrix.facets) == 4


def test_decompose_great_sphere_has_no_generatrix(tmp_path):
    path = save(tmp_path / "great.plx", cross_polytope(3, Mode.SPHERICAL))
    code, doc = cmd_decompose(path)
    assert code == 0
    assert doc.verdict == "GreatSubsphere"
    assert doc.jn.generatrix_file is None
    assert not generatrix_path(path).exists()


def test_decompose_needs_spherical_input(cube_file):
    code, doc = cmd_decompose(cube_file)
    assert code == 3
    assert doc.verdict == "Unsupported"


# ===== gen =====

def test_parse_params():
    assert parse_params(["n=3", " m = 9 "]) == {"n": "3", "m": "9"}
    with pytest.raises(BadParams):
        parse_params(["n3"])


def test_gen_to_file(tmp_path):
    out = tmp_path / "hull.plx"
    code, generated = cmd_gen("hull", {"m": "10"}, seed=4, out=out)
    assert code == 0
    assert load(out) == generated.surface
    assert out.read_text().startswith("plconvex 1\n# hull n=3 m=10 seed=4\n")


# ===== main =====

def test_run_gen_to_stdout(capsys):
    assert main.run(["gen", "sph-cone", "n=3", "lineality=1", "--seed", "3"]) == 0
    out = capsys.readouterr().out
    assert out.startswith("plconvex 1\n")
    assert "mode spherical" in out


def test_run_check_text(capsys, cube_file):
    assert main.run(["check", str(cube_file), "--format", "text"]) == 0
    out = capsys.readouterr().out
    assert out.startswith("verdict: ConvexEmbedding (exit 0)\n")
    assert "exposed vertex: 0" in out


def test_run_check_json(capsys, tmp_path):
    path = save(tmp_path / "octant.plx", octant_sphere())
    assert main.run(["check", str(path)]) == 0
    report = json.loads(capsys.readouterr().out)
    assert report["verdict"] == "ConvexConeBoundary"
    assert report["strict_vertex"] == 0
    assert report["timings"] == {}


def test_run_rejects_bad_jobs(cube_file):
    assert main.run(["check", str(cube_file), "--jobs", "0"]) == 2


@pytest.mark.parametrize("command", ["check", "decompose"])
def test_run_seed_leaves_verdicts_unchanged(capsys, tmp_path, command):
    path = save(tmp_path / "octant.plx", octant_sphere())
    assert main.run([command, str(path)]) == 0
    baseline = capsys.readouterr().out
    assert main.run([command, str(path), "--seed", "7"]) == 0
    assert settings.PROBE_SEED == 7
    assert capsys.readouterr().out == baseline


def test_run_rejects_negative_seed(cube_file):
    assert main.run(["check", str(cube_file), "--seed", "-1"]) == 2


def test_run_gen_bad_params():
    assert main.run(["gen", "cylinder-truncated", "p=4", "q=2"]) == 2


def test_main_exits_four_on_crash():
    with patch("main.run", side_effect=RuntimeError("boom")):
        with pytest.raises(SystemExit) as info:
            main.main()
    assert info.value.code == 4


def test_gen_output_is_stable(capsys):
    main.run(["gen", "hull", "m=8"])
    first = capsys.readouterr().out
    main.run(["gen", "hull", "m=8"])
    assert capsys.readouterr().out == first
    assert first == dumps(*_default_hull())


def _default_hull():
    _, generated = cmd_gen("hull", {"m": "8"})
    return generated.surface, generated.comments
