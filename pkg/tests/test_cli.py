"""CLI exit codes, output formats, and golden-file determinism."""

import os

import pytest

from invweave.cli import main

from helpers import CORPUS

DLIST = CORPUS / "dlist"


def weave_args(out_dir):
    return [
        "weave",
        str(DLIST / "list.moo"),
        "--spec",
        str(DLIST / "invariants.json"),
        "--out",
        str(out_dir),
    ]


GENERATED = [
    "ExposedAbstractList.moo",
    "ExposedDLinkedList.moo",
    "IExposedAbstractList.moo",
    "IExposedDLinkedList.moo",
    "InvV.moo",
]


def test_weave_writes_five_declarations_and_report(tmp_path, capsys):
    assert main(weave_args(tmp_path / "out")) == 0
    names = sorted(os.listdir(tmp_path / "out"))
    assert names == sorted(GENERATED + ["report.json"])


def test_weave_malformed_spec_exit_1(tmp_path, capsys):
    bad = tmp_path / "bad.json"
    bad.write_text('{"classes":[{"name":"DLinkedList","invariant":["size >="]}]}')
    code = main(
        ["weave", str(DLIST / "list.moo"), "--spec", str(bad), "--out", str(tmp_path / "o")]
    )
    assert code == 1
    err = capsys.readouterr().err
    assert "DLinkedList, invariant[0]" in err


def test_weave_unknown_class_exit_1(tmp_path, capsys):
    bad = tmp_path / "bad.json"
    bad.write_text('{"classes":[{"name":"Ghost","invariant":["x > 0"]}]}')
    code = main(
        ["weave", str(DLIST / "list.moo"), "--spec", str(bad), "--out", str(tmp_path / "o")]
    )
    assert code == 1
    assert "unknown-class" in capsys.readouterr().err


def test_weave_unwritable_outdir_exit_2(tmp_path, capsys):
    # A regular file where the output directory should go defeats even a
    # root-privileged test runner.
    blocker = tmp_path / "blocker"
    blocker.write_text("not a directory")
    code = main(weave_args(blocker))
    assert code == 2
    assert "cannot write" in capsys.readouterr().err


def test_weave_missing_source_exit_2(tmp_path, capsys):
    code = main(
        [
            "weave",
            str(tmp_path / "nope.moo"),
            "--spec",
            str(DLIST / "invariants.json"),
            "--out",
            str(tmp_path / "o"),
        ]
    )
    assert code == 2


def test_run_unwoven_faulty_exit_0(capsys):
    code = main(["run", str(DLIST / "list.moo"), str(DLIST / "driver_plain.moo")])
    assert code == 0
    assert capsys.readouterr().out.splitlines() == ["testRemove complete"]


def test_run_woven_faulty_exit_3_with_violation_line(tmp_path, capsys):
    out = tmp_path / "out"
    assert main(weave_args(out)) == 0
    capsys.readouterr()
    code = main(
        ["run", str(DLIST / "list.moo")]
        + [str(out / n) for n in GENERATED]
        + [str(DLIST / "driver_checked.moo")]
    )
    assert code == 3
    lines = capsys.readouterr().out.splitlines()
    assert lines[-1] == "VIOLATION DLinkedList 0 exit remove"


def test_run_woven_fixed_output_matches_unwoven(tmp_path, capsys):
    code = main(["run", str(DLIST / "list_fixed.moo"), str(DLIST / "driver_plain.moo")])
    assert code == 0
    plain_out = capsys.readouterr().out
    out = tmp_path / "out"
    assert (
        main(
            [
                "weave",
                str(DLIST / "list_fixed.moo"),
                "--spec",
                str(DLIST / "invariants.json"),
                "--out",
                str(out),
            ]
        )
        == 0
    )
    capsys.readouterr()
    code = main(
        ["run", str(DLIST / "list_fixed.moo")]
        + [str(out / n) for n in GENERATED]
        + [str(DLIST / "driver_checked.moo")]
    )
    assert code == 0
    assert capsys.readouterr().out == plain_out


def test_run_trace_interleaves_checks(tmp_path, capsys):
    out = tmp_path / "out"
    assert (
        main(
            [
                "weave",
                str(DLIST / "list_fixed.moo"),
                "--spec",
                str(DLIST / "invariants.json"),
                "--out",
                str(out),
            ]
        )
        == 0
    )
    capsys.readouterr()
    code = main(
        ["run", "--trace", str(DLIST / "list_fixed.moo")]
        + [str(out / n) for n in GENERATED]
        + [str(DLIST / "driver_checked.moo")]
    )
    assert code == 0
    lines = capsys.readouterr().out.splitlines()
    assert lines[0] == "CHECK 1 DLinkedList construction <init>"
    assert "testRemove complete" in lines
    assert any(l.startswith("CHECK") and " exit remove" in l for l in lines)


def test_run_type_error_exit_1(tmp_path, capsys):
    src = tmp_path / "bad.moo"
    src.write_text("class A { public int x; public void f() { this.x = true; } }\ndriver { }\n")
    assert main(["run", str(src)]) == 1
    assert "type-mismatch" in capsys.readouterr().err


def test_run_parse_error_exit_1(tmp_path, capsys):
    src = tmp_path / "bad.moo"
    src.write_text("class A {")
    assert main(["run", str(src)]) == 1


def test_run_runtime_fault_exit_1(tmp_path, capsys):
    src = tmp_path / "crash.moo"
    src.write_text(
        "class N { public N other; }\ndriver {\n    N n = null;\n    print(n.other);\n}\n"
    )
    assert main(["run", str(src)]) == 1
    assert "runtime fault" in capsys.readouterr().err


def test_run_no_driver_exit_1(capsys):
    assert main(["run", str(DLIST / "list.moo")]) == 1


def test_run_entry_selects_driver(tmp_path, capsys):
    a = tmp_path / "a.moo"
    b = tmp_path / "b.moo"
    a.write_text('driver { print("from a"); }\n')
    b.write_text('driver { print("from b"); }\n')
    assert main(["run", str(a), str(b)]) == 1  # ambiguous without --entry
    capsys.readouterr()
    assert main(["run", str(a), str(b), "--entry", str(b)]) == 0
    assert capsys.readouterr().out.splitlines() == ["from b"]


def test_report_output_and_exit(capsys):
    code = main(
        ["report", str(DLIST / "list.moo"), "--spec", str(DLIST / "invariants.json")]
    )
    assert code == 0
    lines = capsys.readouterr().out.splitlines()
    assert "depth h=1" in lines
    assert any(l.startswith("class AbstractList:") for l in lines)
    assert any(l.startswith("class DLinkedList:") for l in lines)
    assert lines[-1].startswith("SPACE PASS")


def test_report_synthetic_depth8_bound(tmp_path, capsys):
    lines = []
    entries = []
    for i in range(9):
        header = "class K%d" % i + (" extends K%d" % (i - 1) if i else "")
        lines.append(header + " {")
        lines.append("    protected int f%d;" % i)
        lines.append("    public K%d() {" % i)
        if i:
            lines.append("        super();")
        lines.append("    }")
        for k in range(6):
            lines.append("    public void m%d_%d() {" % (i, k))
            lines.append("        this.f%d = this.f%d + 1;" % (i, i))
            lines.append("    }")
        lines.append("}")
        entries.append('{"name": "K%d", "invariant": ["f%d >= 0"]}' % (i, i))
    src = tmp_path / "chain.moo"
    src.write_text("\n".join(lines) + "\n")
    spec = tmp_path / "chain.json"
    spec.write_text('{"classes": [%s]}' % ", ".join(entries))
    code = main(["report", str(src), "--spec", str(spec)])
    assert code == 0
    out = capsys.readouterr().out.splitlines()
    assert "depth h=8" in out
    assert "max_new_members n=7" in out
    assert "formula_bound=252" in out
    assert out[-1].startswith("SPACE PASS")


def test_report_single_class_h0(tmp_path, capsys):
    src = tmp_path / "one.moo"
    src.write_text("class Solo { protected int x; }\n")
    spec = tmp_path / "one.json"
    spec.write_text('{"classes": [{"name": "Solo", "invariant": ["x >= 0"]}]}')
    assert main(["report", str(src), "--spec", str(spec)]) == 0
    out = capsys.readouterr().out.splitlines()
    assert "depth h=0" in out
    assert "formula_bound=0" in out
    assert out[-1] == "SPACE PASS (0 <= 0)"


def test_weave_deterministic_byte_identical(tmp_path):
    out1 = tmp_path / "o1"
    out2 = tmp_path / "o2"
    assert main(weave_args(out1)) == 0
    assert main(weave_args(out2)) == 0
    for name in GENERATED + ["report.json"]:
        b1 = (out1 / name).read_bytes()
        b2 = (out2 / name).read_bytes()
        assert b1 == b2, name


@pytest.mark.parametrize("command", ["weave", "run", "report"])
def test_exit_codes_stay_in_contract(command, tmp_path, capsys):
    # A missing file is an I/O failure for every subcommand.
    args = [command, str(tmp_path / "missing.moo")]
    if command in ("weave", "report"):
        args += ["--spec", str(DLIST / "invariants.json")]
    if command == "weave":
        args += ["--out", str(tmp_path / "o")]
    assert main(args) == 2
