"""CLI contract: exit codes, reproducibility, file handling."""

import json

import pytest

from slpgroup import cli
from slpgroup import groups as G
from slpgroup import oracle as O
from slpgroup import slp


@pytest.fixture()
def files(tmp_path, z2_fixture):
    group = tmp_path / "group.json"
    group.write_text(json.dumps(G.desc_to_json(z2_fixture)))

    def dump(name, word):
        path = tmp_path / name
        path.write_text(json.dumps(slp.to_json(word)))
        return str(path)

    t, ti, a = slp.stable("t1"), slp.stable("t1", -1), slp.gen("a1")
    return {
        "group": str(group),
        "trivial": dump("trivial.json", slp.from_symbols([ti, a, t, a])),
        "nontrivial": dump("nontrivial.json", slp.from_symbols([a, t])),
        "reduced": dump("reduced.json", slp.from_symbols([a, t])),
        "big": dump("big.json", slp.power(slp.from_symbols([a]), 2**40)),
        "tmp": tmp_path,
    }


def test_solve_exit_codes(files, capsys):
    assert cli.main(["solve", files["group"], files["trivial"]]) == 0
    assert capsys.readouterr().out.strip() == "TRIVIAL"
    assert cli.main(["solve", files["group"], files["nontrivial"]]) == 1
    assert capsys.readouterr().out.strip() == "NONTRIVIAL"


def test_equal_exit_codes(files, capsys):
    assert cli.main(["equal", files["group"], files["trivial"], files["trivial"]]) == 0
    assert capsys.readouterr().out.strip() == "EQUAL"
    assert (
        cli.main(["equal", files["group"], files["trivial"], files["nontrivial"]]) == 1
    )
    assert capsys.readouterr().out.strip() == "UNEQUAL"


def test_malformed_group_is_exit_2(files, capsys):
    bad = files["tmp"] / "bad.json"
    bad.write_text('{"kind":"finite","elements":["1","a"],"table":[[0,1],[1,1]]}')
    assert cli.main(["solve", str(bad), files["trivial"]]) == 2
    assert "error" in capsys.readouterr().err


def test_foreign_symbol_is_exit_2(files, capsys, tmp_path):
    word = tmp_path / "foreign.json"
    word.write_text(json.dumps(slp.to_json(slp.from_symbols([slp.gen("zz")]))))
    assert cli.main(["solve", files["group"], str(word)]) == 2


def test_reduce_round_trips_reduced_input(files, capsys, z2_fixture):
    assert cli.main(["reduce", files["group"], files["reduced"]]) == 0
    data = json.loads(capsys.readouterr().out)
    back = slp.from_json(data)
    assert O.decompress(back, 100) == (slp.gen("a1"), slp.stable("t1"))


def test_eval_and_cap(files, capsys):
    assert cli.main(["eval", files["trivial"]]) == 0
    assert capsys.readouterr().out.strip() == "t1^-1 a1 t1 a1"
    assert cli.main(["--cap", "1000", "eval", files["big"]]) == 2


def test_gen_is_byte_identical(capsys):
    assert cli.main(["--seed", "12", "gen"]) == 0
    first = capsys.readouterr().out
    assert cli.main(["--seed", "12", "gen"]) == 0
    assert capsys.readouterr().out == first
    parsed = json.loads(first)
    desc = G.desc_from_json(parsed["group"])
    G.validate_desc(desc)
    slp.from_json(parsed["slp"])


def test_check_agrees(capsys):
    assert cli.main(["--seed", "3", "check", "--count", "20"]) == 0
    assert capsys.readouterr().out.strip() == "20/20 agree"


def test_stats_stream(files, capsys):
    assert cli.main(["--stats", "solve", files["group"], files["trivial"]]) == 0
    err = capsys.readouterr().err
    assert any(line.startswith("{") for line in err.splitlines())
