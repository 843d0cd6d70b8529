import io
import json

import pytest

from stringtop import fixture_path
from stringtop.cli import run


def call(*argv):
    out = io.StringIO()
    code = run(list(argv), stdout=out)
    return code, out.getvalue()


def test_loop_coproduct_s3():
    code, out = call("loop-coproduct", fixture_path("s3"), "--max-degree", "8")
    assert code == 0
    assert "trivial (χ = 0)" in out


def test_bg_loop_product_bs1():
    code, out = call("bg-loop-product", fixture_path("bs1"), "--max-degree", "10")
    assert code == 0
    assert "loop product trivial up to degree 10" in out


def test_check_pd_bad_fixture():
    code, out = call("check-pd", fixture_path("cp2-bad"))
    assert code == 1
    assert "axiom (i)" in out


@pytest.mark.parametrize("name", ["s2", "s3", "cp2"])
def test_check_pd_good_fixtures(name):
    assert call("check-pd", fixture_path(name))[0] == 0


def test_infinite_model_requires_max_degree(capsys):
    code, _ = call("loop-betti", fixture_path("s3-sullivan"))
    assert code == 2
    assert "--max-degree" in capsys.readouterr().err


def test_insufficient_truncation_exit_code():
    assert call("loop-product", fixture_path("s3"), "--max-degree", "2")[0] == 3


def test_parse_error_exit_code(tmp_path, capsys):
    bad = tmp_path / "bad.alg"
    bad.write_text("[algebra]\nkind = sullivan\nname = T\n[generators]\nx = 2\ny = 3\n"
                   "[differential]\ny = x\n")
    assert call("betti", str(bad), "--max-degree", "4")[0] == 2
    assert "d does not raise degree by 1 on y" in capsys.readouterr().err


def test_missing_file_exit_code(tmp_path):
    assert call("betti", str(tmp_path / "nope.alg"), "--max-degree", "4")[0] == 2


def test_wrong_kind_exit_code():
    assert call("bg-loop-product", fixture_path("s3"), "--max-degree", "4")[0] == 2


@pytest.mark.parametrize("argv", [
    ("check-pd", "s3"),
    ("betti", "s2-sullivan", "--max-degree", "6"),
    ("loop-betti", "s3-sullivan", "--max-degree", "8"),
    ("loop-betti", "cp2", "--max-degree", "6"),
    ("loop-product", "s3", "--max-degree", "6"),
    ("loop-coproduct", "s2", "--max-degree", "6"),
    ("fiber-intersection", "s2", "--max-degree", "6"),
    ("diagonal-class", "cp2"),
    ("module-property", "cp2", "--max-degree", "8"),
    ("bg-loop-product", "bg24", "--max-degree", "8"),
    ("bg-loop-coproduct", "bsu2", "--max-degree", "10"),
    ("ext-diagonal", "bs1", "--max-degree", "9"),
])
def test_every_command_succeeds_and_json_is_deterministic(tmp_path, argv):
    command, name, *flags = argv
    docs = []
    for i in range(2):
        path = tmp_path / f"out{i}.json"
        code, out = call(command, fixture_path(name), *flags, "--json", str(path))
        assert code == 0, out
        doc = json.loads(path.read_text())
        assert doc["command"] == command
        assert set(doc) >= {"degrees", "betti", "tables", "verdicts", "truncation",
                            "input_sha256", "timing_seconds"}
        doc.pop("timing_seconds")
        docs.append(json.dumps(doc, sort_keys=True))
    assert docs[0] == docs[1]


def test_diagonal_class_output():
    code, out = call("diagonal-class", fixture_path("s3"))
    assert code == 0 and "D = 1⊗x - x⊗1" in out


def test_ext_diagonal_json_degrees_are_strings(tmp_path):
    path = tmp_path / "ext.json"
    code, _ = call("ext-diagonal", fixture_path("bs1"), "--max-degree", "5", "--json", str(path))
    assert code == 0
    doc = json.loads(path.read_text())
    assert doc["degrees"][0] == -5
    assert all(isinstance(k, str) for k in doc["tables"]["expected"])


def test_ext_diagonal_falsified_exit_code():
    code, out = call("ext-diagonal", fixture_path("bs1"), "--max-degree", "5",
                     "--gorenstein-dim", "0")
    assert code == 1


def test_copies_flag():
    code, out = call("ext-diagonal", fixture_path("bs1"), "--max-degree", "6", "--copies", "3")
    assert code == 0 and "shifted by -2" in out
