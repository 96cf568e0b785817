"""Fixture parsing, commands, exit codes, JSON payloads, and DOT output."""

from __future__ import annotations

import json
import os

import jsonschema
import pytest

from conftest import FIXTURE_DIR, fixture_path
from ocrank.cli import (
    Fixture,
    FixtureError,
    load_fixture_file,
    machine_dot,
    main,
    parse_fixture,
    render_fixture,
)
from ocrank.rank import RocAtom, RocConcat, RocPlus
from ocrank.transducer import Transducer

SCHEMA_PATH = os.path.join(FIXTURE_DIR, "..", "schema.json")

DEEP_CHAIN = """
alphabet a b
states s0 s1 s2 s3 s4 s5 s6 s7 s8 s9 s10
initial s0
final s10
trans s0 0 s1 a+b
trans s1 0 s2 a
trans s2 0 s3 a
trans s3 0 s4 a
trans s4 0 s5 a
trans s5 1 s6 a
trans s6 1 s7 a
trans s7 1 s8 a
trans s8 1 s9 a
trans s9 1 s10 a
"""


def run_cli(capsys, argv):
    code = main(argv)
    captured = capsys.readouterr()
    return code, captured.out, captured.err


@pytest.fixture(scope="module")
def schema():
    with open(SCHEMA_PATH, encoding="utf-8") as fh:
        return json.load(fh)


def load_json(path):
    with open(path, encoding="utf-8") as fh:
        return json.load(fh)


# --- fixture parsing -----------------------------------------------------------------


def test_fixture_round_trip():
    for name in ("fig1.oct", "fig2.oct"):
        fixture = load_fixture_file(fixture_path(name))
        assert fixture.is_machine
        again = parse_fixture(render_fixture(fixture))
        assert again.value == fixture.value


def test_expr_fixture_resolution(tmp_path):
    # references resolve relative to the expression file, with an implied
    # .oct extension when the bare name does not exist
    fig1 = os.path.abspath(fixture_path("fig1.oct"))
    bare = fig1[: -len(".oct")]
    path = tmp_path / "pair.oct"
    path.write_text(f"expr concat {bare} {fig1}\n")
    fixture = load_fixture_file(str(path))
    assert not fixture.is_machine
    expr = fixture.value
    assert isinstance(expr, RocConcat)
    assert isinstance(expr.left, RocAtom) and isinstance(expr.right, RocAtom)
    assert isinstance(expr.left.machine, Transducer)
    assert fixture.directive == f"expr concat {bare} {fig1}"


def test_expr_fixture_nests(tmp_path):
    fig1 = os.path.abspath(fixture_path("fig1.oct"))
    (tmp_path / "inner.oct").write_text(f"expr plus {fig1}\n")
    (tmp_path / "outer.oct").write_text("expr concat inner.oct inner\n")
    expr = load_fixture_file(str(tmp_path / "outer.oct")).value
    assert isinstance(expr, RocConcat)
    assert isinstance(expr.left, RocPlus) and isinstance(expr.right, RocPlus)


def test_expr_atom_rejects_expression_reference(tmp_path):
    fig1 = os.path.abspath(fixture_path("fig1.oct"))
    (tmp_path / "inner.oct").write_text(f"expr plus {fig1}\n")
    (tmp_path / "bad.oct").write_text("expr atom inner.oct\n")
    with pytest.raises(FixtureError, match="needs a machine fixture"):
        load_fixture_file(str(tmp_path / "bad.oct"))


def test_expr_fixture_depth_limit(tmp_path):
    (tmp_path / "loop.oct").write_text("expr plus loop.oct\n")
    with pytest.raises(FixtureError, match="nested deeper"):
        load_fixture_file(str(tmp_path / "loop.oct"))


def test_expr_fixture_must_stand_alone():
    text = "alphabet a\nexpr plus fig1\n"
    with pytest.raises(FixtureError, match="exactly one 'expr' line"):
        parse_fixture(text, base_dir=FIXTURE_DIR)


@pytest.mark.parametrize(
    "text,message",
    [
        ("alphabet a\nstates q\ninitial q\n", "missing 'final' line"),
        ("states q\ninitial q\nfinal q\n", "missing 'alphabet' line"),
        ("alphabet a\nstates q\nfinal q\n", "missing 'initial' line"),
        ("alphabet a\nbogus q\n", ":2: unknown directive 'bogus'"),
        ("alphabet a\nalphabet b\n", ":2: duplicate 'alphabet' line"),
        ("alphabet a\nstates q q\n", ":2: duplicate state names"),
        (
            "alphabet a\nstates q\ninitial q\nfinal q\ntrans q 2 q a\n",
            ":5: input bit must be 0 or 1",
        ),
        (
            "alphabet a\nstates q\ninitial q\nfinal q\ntrans q 0 z a\n",
            ":5: unknown state 'z'",
        ),
        (
            "alphabet a\nstates q\ninitial q\nfinal q\ntrans q 0 q a**\n",
            ":5: bad regex 'a**'",
        ),
        (
            "alphabet a\nstates q\ninitial q\nfinal q\n"
            "trans q 0 q a\ntrans q 0 q a\n",
            ":6: duplicate transition q -0-> q",
        ),
        (
            "alphabet a\nstates q\ninitial z\nfinal q\ntrans q 0 q a\n",
            "initial state 'z' not declared",
        ),
        (
            "alphabet a\nstates q\ninitial q\nfinal z\ntrans q 0 q a\n",
            "final state 'z' not declared",
        ),
        ("alphabet a\nstates q\ninitial q q\nfinal q\n", "exactly one state"),
    ],
)
def test_fixture_errors_carry_position(text, message):
    with pytest.raises(FixtureError) as excinfo:
        parse_fixture(text, name="bad.oct")
    assert message in str(excinfo.value)
    assert str(excinfo.value).startswith("bad.oct")


def test_comments_and_blank_lines_are_ignored():
    text = "# heading\n\nalphabet a b   # trailing\nstates q\ninitial q\nfinal q\ntrans q 0 q a\n"
    machine = parse_fixture(text).value
    assert isinstance(machine, Transducer)
    assert machine.alphabet.letters == ("a", "b")


# --- exit codes ------------------------------------------------------------------------


def test_nsets_runs_clean(capsys):
    code, out, err = run_cli(capsys, ["nsets", fixture_path("fig2.oct")])
    assert code == 0
    assert "P = 6" in out
    assert sum(1 for line in out.splitlines() if "| N = " in line) == 9
    assert "tau(q8) = {0}" in out


def test_rank_machine_exit_zero(capsys):
    code, out, _ = run_cli(capsys, ["rank", fixture_path("fig2.oct")])
    assert code == 0
    assert out.startswith("bound: 18\nstatus: Certified\n")


def test_rank_not_scattered_exit_two(capsys, tmp_path):
    fig1 = os.path.abspath(fixture_path("fig1.oct"))
    path = tmp_path / "iter.oct"
    path.write_text(f"expr plus {fig1}\n")
    code, out, _ = run_cli(capsys, ["rank", str(path)])
    assert code == 2
    assert "not scattered" in out
    assert "word1: ca" in out and "word2: cba" in out


def test_rank_unknown_exit_three(capsys, tmp_path):
    (tmp_path / "deep.oct").write_text(DEEP_CHAIN)
    (tmp_path / "iter.oct").write_text("expr plus deep.oct\n")
    code, out, _ = run_cli(capsys, ["rank", str(tmp_path / "iter.oct")])
    assert code == 3
    assert out.startswith("unknown:")


def test_tiny_counter_cap_exits_four(capsys):
    code, _, err = run_cli(
        capsys, ["nsets", fixture_path("fig2.oct"), "--counter-cap", "10"]
    )
    assert code == 4
    assert "certification failed" in err
    assert "--counter-cap" in err


def test_check_reports_cap_failure(capsys):
    code, out, _ = run_cli(
        capsys, ["check", fixture_path("fig2.oct"), "--counter-cap", "10"]
    )
    assert code == 4
    assert "FAIL counter-sets" in out
    assert "ok   structure" in out


@pytest.mark.parametrize(
    "argv",
    [
        ["frobnicate", "whatever.oct"],
        ["nsets"],
        ["nsets", "/nonexistent/machine.oct"],
    ],
)
def test_usage_errors_exit_one(capsys, argv):
    code, _, err = run_cli(capsys, argv)
    assert code == 1
    assert err.strip()


def test_machine_command_rejects_expression_fixture(capsys, tmp_path):
    fig1 = os.path.abspath(fixture_path("fig1.oct"))
    path = tmp_path / "iter.oct"
    path.write_text(f"expr plus {fig1}\n")
    code, _, err = run_cli(capsys, ["nsets", str(path)])
    assert code == 1
    assert "needs a machine fixture" in err


def test_bad_fixture_exits_one(capsys, tmp_path):
    path = tmp_path / "broken.oct"
    path.write_text("alphabet a\nstates q\ninitial q\nfinal q\ntrans q 0 q a**\n")
    code, _, err = run_cli(capsys, ["nsets", str(path)])
    assert code == 1
    assert "bad regex" in err


def test_help_exits_zero(capsys):
    code, out, _ = run_cli(capsys, ["--help"])
    assert code == 0
    assert "usage" in out.lower()


# --- command output --------------------------------------------------------------------


def test_check_all_green_on_fixtures(capsys):
    for name in ("fig1.oct", "fig2.oct"):
        code, out, _ = run_cli(capsys, ["check", fixture_path(name)])
        assert code == 0, out
        lines = out.strip().splitlines()
        assert len(lines) == 5
        assert all(line.startswith("ok  ") for line in lines)
        names = [line.split()[1].rstrip(":") for line in lines]
        assert names == [
            "structure",
            "counter-sets",
            "leveling",
            "bounded-equality",
            "lift-project",
        ]


def test_enumerate_cli_words_and_note(capsys):
    code, out, err = run_cli(
        capsys,
        ["enumerate", fixture_path("fig1.oct"), "--input-cap", "4", "--output-cap", "6"],
    )
    assert code == 0
    assert out.split() == [
        "ca",
        "cba",
        "cbba",
        "cbbba",
        "cbbbba",
        "ccaa",
        "ccaba",
        "ccabba",
        "ccbaa",
        "ccbaba",
        "ccbbaa",
    ]
    assert "exceeded --output-cap" in err


def test_dot_output_stdout_and_file(capsys, tmp_path):
    code, out, _ = run_cli(capsys, ["dot", fixture_path("fig1.oct")])
    assert code == 0
    assert out.startswith("digraph transducer {")
    assert out.count("->") == 4  # __start arrow plus three transitions
    assert '"qf" [shape=doublecircle];' in out
    assert 'label="0 / c"' in out

    target = tmp_path / "fig1.dot"
    code, out, _ = run_cli(capsys, ["dot", fixture_path("fig1.oct"), "--dot", str(target)])
    assert code == 0
    assert out == ""
    assert target.read_text().startswith("digraph transducer {")


def test_mprime_dot_file(capsys, tmp_path):
    target = tmp_path / "prime.dot"
    code, out, _ = run_cli(
        capsys, ["mprime", fixture_path("fig1.oct"), "--dot", str(target)]
    )
    assert code == 0
    text = target.read_text()
    assert text.startswith("digraph leveled {")
    assert '"(q0,0,up)"' in text
    assert "(rule" not in text  # rules are tagged as (i)/(ii)/...
    assert "(i)" in text or "(iii)" in text


def test_mprime_stdout_shape(capsys):
    code, out, _ = run_cli(capsys, ["mprime", fixture_path("fig1.oct")])
    assert code == 0
    assert "period = 2" in out
    assert "states (8):" in out
    assert "(q0,0,up) (initial)" in out
    assert "(qf,0,down) (accepting)" in out


def test_cli_output_is_deterministic(capsys):
    first = run_cli(capsys, ["mprime", fixture_path("fig2.oct")])
    second = run_cli(capsys, ["mprime", fixture_path("fig2.oct")])
    assert first == second
    third = run_cli(capsys, ["nsets", fixture_path("fig2.oct")])
    fourth = run_cli(capsys, ["nsets", fixture_path("fig2.oct")])
    assert third == fourth


# --- JSON payloads ---------------------------------------------------------------------


def test_json_payloads_validate(capsys, tmp_path, schema):
    out_path = str(tmp_path / "payload.json")
    fig1 = fixture_path("fig1.oct")
    fig2 = fixture_path("fig2.oct")
    (tmp_path / "iter.oct").write_text(f"expr plus {os.path.abspath(fig1)}\n")
    (tmp_path / "deep.oct").write_text(DEEP_CHAIN)
    (tmp_path / "murky.oct").write_text("expr plus deep.oct\n")

    cases = [
        (["nsets", fig2], 0),
        (["mprime", fig2], 0),
        (["rank", fig1], 0),
        (["rank", str(tmp_path / "iter.oct")], 2),
        (["rank", str(tmp_path / "murky.oct")], 3),
        (["enumerate", fig1], 0),
        (["enumerate", str(tmp_path / "iter.oct"), "--output-cap", "8"], 0),
        (["check", fig1], 0),
        (["check", fig2, "--counter-cap", "10"], 4),
    ]
    for argv, expected in cases:
        code, _, _ = run_cli(capsys, argv + ["--json", out_path])
        assert code == expected, argv
        payload = load_json(out_path)
        jsonschema.validate(payload, schema)
        assert payload["command"] == argv[0]


def test_json_nsets_content(capsys, tmp_path):
    out_path = str(tmp_path / "n.json")
    run_cli(capsys, ["nsets", fixture_path("fig2.oct"), "--json", out_path])
    payload = load_json(out_path)
    assert payload["period"] == 6
    assert payload["nsets"]["q8"]["meet"] == "{0}"
    assert payload["types"]["q7"] == [1]
    assert payload["counter_cap"] == 202


def test_json_rank_witness_content(capsys, tmp_path):
    out_path = str(tmp_path / "r.json")
    fig1 = os.path.abspath(fixture_path("fig1.oct"))
    (tmp_path / "iter.oct").write_text(f"expr plus {fig1}\n")
    run_cli(capsys, ["rank", str(tmp_path / "iter.oct"), "--json", out_path])
    payload = load_json(out_path)
    assert payload["status"] == "NotScattered"
    assert payload["bound"] is None
    assert payload["witness"]["word1"] == "ca"
    assert payload["witness"]["word2"] == "cba"
    assert payload["witness"]["state"] is None


def test_json_enumerate_expr_truncation_is_null(capsys, tmp_path):
    out_path = str(tmp_path / "e.json")
    fig1 = os.path.abspath(fixture_path("fig1.oct"))
    (tmp_path / "iter.oct").write_text(f"expr plus {fig1}\n")
    run_cli(
        capsys,
        ["enumerate", str(tmp_path / "iter.oct"), "--output-cap", "8", "--json", out_path],
    )
    payload = load_json(out_path)
    assert payload["truncated"] is None
    assert payload["input_cap"] == 8 and payload["output_cap"] == 8


def test_json_machine_enumerate_truncation_is_boolean(capsys, tmp_path):
    out_path = str(tmp_path / "e.json")
    run_cli(capsys, ["enumerate", fixture_path("fig1.oct"), "--json", out_path])
    payload = load_json(out_path)
    assert payload["truncated"] is True
    assert payload["words"][0] == "ca"
