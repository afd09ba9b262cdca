import subprocess
import sys

import pytest

from spectral_layers.cli import run
from spectral_layers.lgf import parse_lgf
from spectral_layers.fixtures import load_figure


def _run(capsys, *argv):
    code = run(list(argv))
    out = capsys.readouterr()
    return code, out.out, out.err


def test_fig3a_witness(capsys):
    code, out, _ = _run(capsys, "verify", "--fixture", "fig3a", "--check", "path-commuting")
    assert code == 1
    assert "x=v2 y=v3 fb=1 bf=2" in out


def test_fig4a_strong(capsys):
    code, out, _ = _run(capsys, "verify", "--fixture", "fig4a", "--check", "strong")
    assert code == 1 and "degree n=3" in out
    assert _run(capsys, "verify", "--fixture", "fig4a", "--check", "path-commuting")[0] == 0


def test_fig5_family_preserving(capsys):
    code, out, _ = _run(capsys, "verify", "--fixture", "fig5", "--check", "family-preserving", "--format", "csv")
    assert code == 1
    assert out.startswith("check,verdict,witness\nfamily-preserving,fail,")


def test_antitree_all_checks_pass(capsys):
    code, out, _ = _run(capsys, "verify", "--antitree", "1;2,3", "--depth", "5")
    assert code == 0 and "fail" not in out


def test_decompose_both(capsys, tmp_path):
    code, out, _ = _run(
        capsys, "decompose", "--antitree", "1;2,3", "--depth", "10", "--kind", "laplacian", "--method", "both",
        "--format", "csv", "--out", str(tmp_path),
    )
    assert code == 0 and "reconcile: pass" in out
    assert (tmp_path / "generic_blocks.csv").read_text().startswith("block_id,start_sphere,multiplicity,length\n")
    assert (tmp_path / "closed_coefficients.csv").read_text().startswith("block_id,index,a,b\n")


def test_decompose_rejects_non_commuting(capsys):
    code, out, _ = _run(capsys, "decompose", "--fixture", "fig3a", "--kind", "adjacency")
    assert code == 1 and "residual" in out


def test_closed_form_needs_generator(capsys):
    code, _, err = _run(capsys, "decompose", "--fixture", "fig5", "--method", "closed-form")
    assert code == 2 and "closed forms" in err


def test_spectrum_tree(capsys):
    code, out, _ = _run(capsys, "spectrum", "--tree-cs", "2|1", "--depth", "8", "--format", "csv")
    assert code == 0
    assert "spectrum: pass" in out
    assert out.startswith("index,union,compressed,deviation\n")


def test_spectrum_generic_route(capsys):
    code, out, _ = _run(capsys, "spectrum", "--fixture", "fig5", "--kind", "adjacency")
    assert code == 0 and "spectrum: pass" in out


def test_bands(capsys):
    code, out, _ = _run(capsys, "bands", "--tree-cs", "2|1", "--format", "csv")
    lo, hi = out.splitlines()[1].split(",")[:2]
    assert code == 0
    assert abs(float(lo) - (3 - 2 * 2**0.5)) < 1e-9 and abs(float(hi) - (3 + 2 * 2**0.5)) < 1e-9
    code, out, _ = _run(capsys, "bands", "--a", "1", "--b", "0")
    lo, hi = out.splitlines()[1].strip(" []").split(",")
    assert code == 0 and abs(float(lo) + 2) < 1e-9 and abs(float(hi) - 2) < 1e-9


def test_detect_period(capsys):
    assert _run(capsys, "detect-period", "--antitree", "1;2,3")[1] == "N=1 q=2\n"
    assert _run(capsys, "detect-period", "--values", "1,2,3,4,5,6,7,8,9", "--max-period", "3")[1] == "none detected\n"


def test_build_round_trip(capsys, tmp_path):
    code, out, _ = _run(capsys, "build", "--fixture", "fig4b", "--out", str(tmp_path))
    assert code == 0
    assert parse_lgf(out) == load_figure("fig4b")
    code, out2, _ = _run(capsys, "verify", "--lgf", str(tmp_path / "graph.lgf"), "--check", "spherical-symmetry")
    assert code == 0


@pytest.mark.parametrize(
    "argv",
    [
        ["verify", "--fixture", "nope"],
        ["verify", "--antitree", "1;2"],
        ["decompose", "--antitree", "1;x", "--depth", "3"],
        ["spectrum", "--lgf", "/nonexistent.lgf"],
        ["decompose", "--antitree", "1;2", "--depth", "2", "--tol", "-1"],
        ["bands", "--a", "1"],
        [],
    ],
)
def test_usage_errors(capsys, argv):
    assert _run(capsys, *argv)[0] == 2


def test_bad_lgf(capsys, tmp_path):
    p = tmp_path / "bad.lgf"
    p.write_text("spheres 1 2\ncross 0 0 0\nintra 1 0 0\n")
    code, _, err = _run(capsys, "build", "--lgf", str(p))
    assert code == 2 and "line 3" in err


def test_deterministic(capsys):
    argv = ["decompose", "--tree-cs", "2|1", "--depth", "5", "--format", "csv"]
    first = _run(capsys, *argv)[1]
    assert _run(capsys, *argv)[1] == first


def test_module_entry_point():
    proc = subprocess.run(
        [sys.executable, "-m", "spectral_layers", "detect-period", "--values", "5,5,5,5,5,5", "--max-period", "2"],
        capture_output=True, text=True,
    )
    assert proc.returncode == 0 and proc.stdout == "N=0 q=1\n"
