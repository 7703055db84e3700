import json
import math
import subprocess
import sys

import numpy as np
import pytest

from qphysreal import io
from qphysreal.cli import _grid, main
from qphysreal.errors import DimensionMismatch, InputError

R = math.sqrt(0.1)
BALANCED = {"n": 2, "n_u": 2, "n_y": 2, "A": [[-0.1, 0], [0, -0.1]],
            "Bu": [[-R, 0], [0, -R]], "C": [[R, 0], [0, R]]}
LOSSY = dict(BALANCED, A=[[-0.05, 0], [0, -0.05]])
NO_OUTPUT = {"n": 2, "n_u": 2, "n_y": 2, "A": [[-1, 0], [0, -1]],
             "Bu": [[1, 0], [0, 1]], "C": [[0, 0], [0, 0]]}
PLANT = dict(BALANCED, Bw1=[[R, 0], [0, R]], Du=[[1, 0], [0, 1]], Dw1=[[0, 0], [0, 0]],
             Sw1=[[3, 0], [0, 3]])


def dump(tmp_path, name, doc):
    path = tmp_path / name
    path.write_text(json.dumps(doc))
    return str(path)


def run(capsys, *argv):
    code = main(list(argv))
    out = capsys.readouterr().out
    return code, (json.loads(out) if out.strip() else None)


class TestParsing:
    def test_system_round_trip(self):
        ss, bv1, bv2 = io.parse_system(BALANCED)
        assert bv1 is None and bv2 is None
        again, _, _ = io.parse_system(io.system_doc(ss))
        for name in ("a", "bu", "c"):
            assert np.array_equal(getattr(again, name), getattr(ss, name))

    def test_unknown_key(self):
        with pytest.raises(InputError):
            io.parse_system(dict(BALANCED, D=[[0]]))

    def test_missing_key(self):
        doc = dict(BALANCED)
        del doc["C"]
        with pytest.raises(InputError):
            io.parse_system(doc)

    def test_non_integer_dimension(self):
        with pytest.raises(InputError):
            io.parse_system(dict(BALANCED, n=2.0))

    def test_shape_mismatch(self):
        with pytest.raises(DimensionMismatch):
            io.parse_system(dict(BALANCED, A=[[1, 0, 0], [0, 1, 0]]))

    def test_empty_bv2(self):
        _, _, bv2 = io.parse_system(dict(BALANCED, Bv2=[]))
        assert bv2.shape == (2, 0)

    def test_plant_optional_sw1(self):
        doc = dict(PLANT)
        del doc["Sw1"]
        assert np.array_equal(io.parse_plant(doc).s_w1, np.eye(2))

    def test_complex_pairs(self):
        assert io.complex_pairs(np.array([[1 + 2j, -0.5j]])) == [[[1.0, 2.0], [0.0, -0.5]]]

    def test_grid(self):
        assert _grid("1:100:3") == [0.0, 1.0, 10.0, 100.0]
        assert _grid("1:100:3", zero=False) == [1.0, 10.0, 100.0]


class TestCommands:
    def test_check_exit_codes(self, tmp_path, capsys):
        code, out = run(capsys, "check", dump(tmp_path, "b.json", BALANCED))
        assert code == 0 and out["realizable"] and out["n_v2_required"] == 0
        code, out = run(capsys, "check", dump(tmp_path, "l.json", LOSSY))
        assert code == 1 and not out["realizable"] and out["n_v2_required"] == 2
        bad_sign = dict(BALANCED, Bv1=[[R, 0], [0, R]], Bv2=[])
        code, out = run(capsys, "check", dump(tmp_path, "s.json", bad_sign))
        assert code == 1
        assert out["residual_feedthrough"] == pytest.approx(2 * R * math.sqrt(2))

    def test_input_errors(self, tmp_path, capsys):
        assert main(["check", str(tmp_path / "missing.json")]) == 2
        bad = tmp_path / "bad.json"
        bad.write_text("{not json")
        assert main(["check", str(bad)]) == 2
        assert main(["check", dump(tmp_path, "u.json", dict(BALANCED, extra=1))]) == 2
        assert main(["check", dump(tmp_path, "o.json", dict(BALANCED, n=3))]) == 2
        capsys.readouterr()

    def test_realize(self, tmp_path, capsys):
        out_path = tmp_path / "r.json"
        code, _ = run(capsys, "realize", dump(tmp_path, "l.json", LOSSY), "--out", str(out_path))
        assert code == 0
        doc = json.loads(out_path.read_text())
        assert doc["input"] == LOSSY
        assert doc["n_v2"] == 2 and doc["realizable"]
        assert np.array(doc["Bv2"]).shape == (2, 2)
        assert np.array(doc["R"]).shape == (2, 2)
        assert np.array(doc["Lambda"]).shape == (3, 2, 2)

    def test_realize_tf(self, tmp_path, capsys):
        code, out = run(capsys, "realize-tf", dump(tmp_path, "b.json", BALANCED))
        assert code == 0 and out["realizable_without_extra_noise"] and out["n_v2"] == 0
        code, out = run(capsys, "realize-tf", dump(tmp_path, "z.json", NO_OUTPUT))
        assert code == 1
        assert out["realizable_without_extra_noise"] is False
        assert out["cause"] == "SingularX"

    def test_lqg(self, tmp_path, capsys):
        code, out = run(capsys, "lqg", "--plant", dump(tmp_path, "p.json", PLANT),
                        "--rho-grid", "1e-2:1e2:5", "--refine-iters", "5")
        assert code == 0
        assert out["realizable"] and out["rho_star"] >= 0
        # N = J/4 - 1/2 lies between 0 and the uncontrolled value k_n/2 = 0.5
        assert 0.0 <= out["J"] / 4 - 0.5 <= 0.5

    def test_cavity_csv(self, tmp_path, capsys):
        out_path = tmp_path / "c.csv"
        code = main(["cavity", "--kn-grid", "0.5:1:2", "--rho-grid", "1e-2:1e2:5",
                     "--refine-iters", "4", "--out", str(out_path)])
        assert code == 0
        lines = out_path.read_text().splitlines()
        assert lines[0] == "k_n,N_no_control,N_heterodyne,N_coherent,rho_star,n_v2"
        # the --kn-grid option also includes k_n = 0
        assert [ln.split(",")[0] for ln in lines[1:]] == ["0", "0.5", "1"]

    def test_module_entry_point(self, tmp_path):
        proc = subprocess.run([sys.executable, "-m", "qphysreal", "check",
                               dump(tmp_path, "b.json", BALANCED)],
                              capture_output=True, text=True)
        assert proc.returncode == 0
        assert json.loads(proc.stdout)["realizable"] is True
