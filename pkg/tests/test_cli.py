import io
import json

import numpy as np
import pytest

from aniso_rt.cli import main
from aniso_rt.mesh_io import FamilySpec, generate_family, write_mesh


def run(argv):
    out = io.StringIO()
    code = main(argv, out=out)
    return code, out.getvalue()


class TestAnalyze:
    def test_reference_triangle(self):
        code, text = run(["analyze-simplex", "--vertices", "0,0;1,0;0,1"])
        data = json.loads(text)
        assert code == 0 and data["schema"] == 1
        assert np.isclose(data["report"]["H_T0"], 4.0)
        assert data["report"]["good_element"] is True
        assert data["report"]["max_dihedral"] is None

    def test_cap_is_bad(self):
        _, text = run(["analyze-simplex", "--vertices", "0,0;1,0;0.5,0.001"])
        assert json.loads(text)["report"]["good_element"] is False

    def test_file_input(self, tmp_path):
        p = tmp_path / "tet.txt"
        p.write_text("0 0 0\n1 0 0\n0 1 0\n0 0 1\n", encoding="utf-8")
        code, text = run(["analyze-simplex", "--vertices", str(p)])
        assert code == 0 and json.loads(text)["decomposition"]["case_type"] == "i"

    @pytest.mark.parametrize("verts", ["0,0;1,0", "0,0;1,0;2,0", "a,b;c,d;e,f"])
    def test_bad_vertices(self, verts, capsys):
        code, _ = run(["analyze-simplex", "--vertices", verts])
        assert code == 2
        assert "error" in capsys.readouterr().err


class TestAudit:
    def _write(self, tmp_path, name, level=1):
        p = tmp_path / f"{name}.mesh"
        p.write_text(write_mesh(generate_family(FamilySpec(name), level)), encoding="utf-8")
        return str(p)

    def test_shape_regular_all_good(self, tmp_path):
        csv_path = tmp_path / "audit.csv"
        code, text = run(["audit-mesh", "--mesh", self._write(tmp_path, "shape_regular"), "--csv", str(csv_path)])
        data = json.loads(text)
        assert code == 0 and data["n_good"] == data["n_elements"] == 8
        assert csv_path.read_text().splitlines()[0].startswith("element,h,")

    def test_cap_all_bad(self, tmp_path):
        _, text = run(["audit-mesh", "--mesh", self._write(tmp_path, "cap_2d", 3), "--gamma0", "2"])
        assert json.loads(text)["n_good"] == 0

    def test_empty(self, tmp_path):
        p = tmp_path / "empty.mesh"
        p.write_text("dim 2\nnodes 0\nelements 0\n", encoding="utf-8")
        code, text = run(["audit-mesh", "--mesh", str(p)])
        assert code == 0 and json.loads(text)["n_elements"] == 0

    def test_parse_error(self, tmp_path):
        p = tmp_path / "bad.mesh"
        p.write_text("dim 2\nnodes 1\n0\n", encoding="utf-8")
        assert run(["audit-mesh", "--mesh", str(p)])[0] == 2


class TestExperiments:
    def test_interp_error(self):
        code, text = run(["interp-error", "--k", "0", "--field", "trig", "--p", "2", "--simplex", "0,0;1,0;0,0.01"])
        data = json.loads(text)
        assert code == 0 and data["breakdown"]["aniso_rhs_61"] > 0

    def test_interp_error_precondition(self):
        code, _ = run(["interp-error", "--simplex", "0,0;1,0;0,1", "--variant", "RT616b"])
        assert code == 2

    def test_study(self, tmp_path):
        js = tmp_path / "s.json"
        code, text = run(["study", "--family", "needle_2d", "--levels", "5", "--json", str(js)])
        assert code == 0
        assert len(text.strip().splitlines()) == 6
        verdicts = json.loads(js.read_text())["verdicts"]
        assert verdicts["RT61"]["bounded"] and verdicts["RT62"]["bounded"]
        # ||Iv|| / rhs51 is still rising toward its limit at level 4, so --check reports it
        assert not verdicts["stability51"]["bounded"]
        assert run(["study", "--family", "needle_2d", "--levels", "5", "--check"])[0] == 3

    def test_counterexample(self):
        code, text = run(["counterexample"])
        assert code == 0
        assert "I v = (x1/3, x2/3)" in text and "PASS" in text

    def test_counterexample_k1(self):
        code, text = run(["counterexample", "--k", "1"])
        assert code == 0 and "||(I v)_1 - v_1||_L2 = 0.0394" in text

    def test_usage_error(self):
        with pytest.raises(SystemExit) as info:
            run(["counterexample", "--bad"])
        assert info.value.code == 1

    def test_sweep_deterministic(self):
        args = ["sweep", "--lemma", "RT41", "--samples", "10", "--seed", "5", "--ratios"]
        a, b = run(args), run(args)
        assert a == b
        assert json.loads(a[1])["seed"] == 5

    def test_family_command(self):
        code, text = run(["family", "--family", "sliver", "--level", "2"])
        assert code == 0 and text.startswith("dim 3")
