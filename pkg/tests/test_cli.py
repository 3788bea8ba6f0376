import json

import pytest

from patchtower import serialize
from patchtower.cli import main
from patchtower.complexes import koszul_complex, make_complex
from patchtower.graded import GradedModule
from patchtower.linalg import Matrix
from patchtower.rings import RingTowerElement, graded_ring, make_patch_ring


def run(capsys, argv):
    code = main(argv)
    out = capsys.readouterr().out
    return code, out


@pytest.fixture()
def koszul_file(tmp_path):
    spec = graded_ring(3, 2)
    t1, t2 = RingTowerElement.variable(spec, 0), RingTowerElement.variable(spec, 1)
    path = tmp_path / "koszul.json"
    path.write_text(serialize.canonical_dumps(serialize.complex_to_obj(koszul_complex(spec, [t1, t2]))))
    return path


class TestVerifyHA:
    def test_passes_on_koszul(self, capsys, koszul_file):
        code, out = run(capsys, ["verify-ha", str(koszul_file), "--format", "json"])
        assert code == 0
        obj = json.loads(out)
        assert obj["all_pass"] and obj["height_profile"] == [2]

    def test_text_format(self, capsys, koszul_file):
        code, out = run(capsys, ["verify-ha", str(koszul_file)])
        assert code == 0 and "overall: pass" in out

    def test_malformed_json_is_invalid_input(self, capsys, tmp_path):
        bad = tmp_path / "bad.json"
        bad.write_text("{nope")
        code, out = run(capsys, ["verify-ha", str(bad), "--format", "json"])
        assert code == 2
        assert json.loads(out)["error"] == "InvalidInput"

    def test_unit_entry_is_invalid_input(self, capsys, tmp_path):
        spec = graded_ring(3, 1)
        one = RingTowerElement.one(spec)
        cx = make_complex(spec, 0, [1, 1], [Matrix(spec, [[one]])])
        path = tmp_path / "unit.json"
        path.write_text(serialize.canonical_dumps(serialize.complex_to_obj(cx)))
        code, out = run(capsys, ["verify-ha", str(path), "--format", "json"])
        assert code == 2
        assert json.loads(out)["error"] == "NotMinimalInput"


class TestInvariantsAndMinimize:
    def test_invariants_record(self, capsys, tmp_path):
        spec = graded_ring(3, 2)
        t1 = RingTowerElement.variable(spec, 0)
        mod = GradedModule.quotient_by_ideal(spec, [t1])
        path = tmp_path / "mod.json"
        path.write_text(serialize.canonical_dumps(serialize.graded_module_to_obj(mod)))
        code, out = run(capsys, ["invariants", str(path), "--format", "json"])
        assert code == 0
        obj = json.loads(out)
        assert obj["projdim"] == 1 and obj["dim"] == 1 and obj["perfect"] is True

    def test_minimize_roundtrip(self, capsys, tmp_path):
        spec = make_patch_ring(3, 1, 1, 1)
        one = RingTowerElement.one(spec)
        t = RingTowerElement.variable(spec, 0)
        zero = RingTowerElement.zero(spec)
        cx = make_complex(spec, 0, [2, 2], [Matrix(spec, [[one, zero], [zero, t]])])
        path = tmp_path / "cx.json"
        path.write_text(serialize.canonical_dumps(serialize.complex_to_obj(cx)))
        code, out = run(capsys, ["minimize", str(path), "--format", "json"])
        assert code == 0
        back = serialize.complex_from_obj(json.loads(out))
        assert back.ranks == (1, 1)
        assert back.diffs[0].entries == ((t,),)


class TestGenPatch:
    def test_roundtrip_and_determinism(self, capsys, tmp_path):
        argv = ["gen", "--q", "1", "--r", "1", "--seed", "4", "--out-dir", str(tmp_path / "a"), "--format", "json"]
        code, _ = run(capsys, argv)
        assert code == 0
        argv2 = ["gen", "--q", "1", "--r", "1", "--seed", "4", "--out-dir", str(tmp_path / "b"), "--format", "json"]
        run(capsys, argv2)
        a = (tmp_path / "a" / "tower.json").read_bytes()
        b = (tmp_path / "b" / "tower.json").read_bytes()
        assert a == b

        code, out = run(capsys, ["patch", str(tmp_path / "a" / "tower.json"), "--precision", "2", "--format", "json"])
        assert code == 0
        cert = json.loads(out)
        sidecar = json.loads((tmp_path / "a" / "expected.json").read_text())
        assert cert["rank"] == sidecar["expected"]["rank"]
        assert cert["valid"] is True
        assert cert["tau"] == sidecar["expected"]["tau"]
        assert cert["limit_differentials"] == sidecar["expected"]["limit_differentials"]

    def test_violation_exit_code(self, capsys, tmp_path):
        argv = [
            "gen", "--q", "1", "--r", "1", "--seed", "4",
            "--perturbation", "tau_out_of_range",
            "--out-dir", str(tmp_path), "--format", "json",
        ]
        run(capsys, argv)
        code, out = run(capsys, ["patch", str(tmp_path / "tower.json"), "--precision", "2", "--format", "json"])
        assert code == 1
        assert json.loads(out)["error"] == "TauOutOfRange"

    def test_invalid_params_exit_code(self, capsys, tmp_path):
        code, out = run(capsys, ["gen", "--q", "1", "--r", "2", "--out-dir", str(tmp_path), "--format", "json"])
        assert code == 2

    def test_tower_file_roundtrip(self, capsys, tmp_path):
        run(capsys, ["gen", "--q", "1", "--r", "0", "--seed", "8", "--out-dir", str(tmp_path), "--format", "json"])
        obj = json.loads((tmp_path / "tower.json").read_text())
        tower = serialize.tower_from_obj(obj)
        again = serialize.canonical_dumps(serialize.tower_to_obj(tower))
        assert again == (tmp_path / "tower.json").read_text()
