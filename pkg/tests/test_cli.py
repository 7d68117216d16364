"""Command-line entry points, driven through main() with captured output."""

import pytest

from lineal.cli import main

MAVG = "programs/mavg.lin"
CSV = "data/emissions.csv"


@pytest.fixture
def mavg_dir(tmp_path):
    """An evaluated session directory for the query/export commands."""
    out = str(tmp_path / "mavg.session")
    code = main(["eval", MAVG, "--data", f"data={CSV}", "--out", out])
    assert code == 0
    return out


def test_eval_reports_result_and_session(tmp_path, capsys):
    out = str(tmp_path / "s")
    assert main(["eval", MAVG, "--data", f"data={CSV}", "--out", out]) == 0
    lines = capsys.readouterr().out.splitlines()
    assert lines == [
        "result: [20.15, 25.813333333333333, 40.18]",
        "vertices: 72",
        "edges: 55",
        f"session: {out}",
    ]


def test_dump_core_prints_without_evaluating(capsys):
    # no --data, which evaluation would reject: dumping never evaluates
    assert main(["eval", MAVG, "--dump-core"]) == 0
    text = capsys.readouterr().out
    assert text.startswith("(let two = 2 in")
    assert "(letrec mavg =" in text


def test_missing_program_file(capsys):
    assert main(["eval", "no-such.lin"]) == 2
    assert "error: no such file: no-such.lin" in capsys.readouterr().err


def test_dataset_flag_validation(tmp_path, capsys):
    assert main(["eval", MAVG, "--data", "data"]) == 1
    assert "--data expects name=path" in capsys.readouterr().err
    weird = tmp_path / "d.xml"
    weird.write_text("<x/>")
    assert main(["eval", MAVG, "--data", f"data={weird}"]) == 1
    assert ".csv or .json" in capsys.readouterr().err


def test_query_prints_described_answers(mavg_dir, capsys):
    code = main(
        ["query", mavg_dir, "demandedBy", "--select", "data[2].emissions", "--restrict", "outputs"]
    )
    assert code == 0
    got = capsys.readouterr()
    assert got.out.splitlines() == ["58\tout[1]\t25.813333333333333", "64\tout[2]\t40.18"]
    assert "(2 of " in got.err and "answer vertices shown)" in got.err


def test_query_without_restriction_shows_interior_vertices(mavg_dir, capsys):
    assert main(["query", mavg_dir, "demands", "--select", "out[0]"]) == 0
    got = capsys.readouterr()
    lines = got.out.splitlines()
    assert "0\tdata[0].emissions\t18.17" in lines
    assert "2\tdata[1].emissions\t22.13" in lines
    assert any("\t-\t" in line for line in lines)  # closures, divisor, sums
    shown = int(got.err.split(" of ")[0].lstrip("("))
    assert shown == len(lines)


def test_query_rejects_unknown_selection(mavg_dir, capsys):
    assert main(["query", mavg_dir, "demands", "--select", "out[7]"]) == 1
    assert "unknown selection path" in capsys.readouterr().err


def test_query_rejects_wrong_boundary(mavg_dir, capsys):
    # demands starts from outputs; an input cell is outside its universe
    assert main(["query", mavg_dir, "demands", "--select", "data[0].emissions"]) == 1
    assert "error:" in capsys.readouterr().err


def test_export_dot(mavg_dir, tmp_path, capsys):
    assert main(["export-dot", mavg_dir]) == 0
    text = capsys.readouterr().out
    assert text.startswith("digraph dependence {")
    assert 'n0 [label="18.17"];' in text
    out = tmp_path / "g.dot"
    assert main(["export-dot", mavg_dir, "-o", str(out)]) == 0
    assert out.read_text() == text


def test_bench_command(tmp_path, capsys):
    (tmp_path / "tiny.lin").write_text(
        "dataset data;\ndef heads (Cons r rest) = [r.co2e];\nheads data\n"
    )
    cfg = tmp_path / "suite.cfg"
    cfg.write_text(
        "[suite]\nruns = 2\nrows = 6\n"
        "[tiny]\nprogram = tiny.lin\ndataset = data:table\n"
        "input = data[0].co2e\noutput = out[0]\n"
    )
    report_file = tmp_path / "report.txt"
    assert main(["bench", str(cfg), "--out", str(report_file)]) == 0
    text = capsys.readouterr().out
    assert "direct wins:" in text
    assert report_file.read_text() == text


def test_bench_failures_set_exit_code(tmp_path, capsys):
    cfg = tmp_path / "suite.cfg"
    cfg.write_text(
        "[suite]\nruns = 2\n"
        "[gone]\nprogram = nope.lin\ndataset = d:table\ninput = i\noutput = o\n"
    )
    assert main(["bench", str(cfg)]) == 1
    assert "FAILED gone:" in capsys.readouterr().out
