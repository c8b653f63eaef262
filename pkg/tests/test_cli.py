import json

from qobdd.cli import (
    EXIT_BUDGET,
    EXIT_CHECK,
    EXIT_EXPECT,
    EXIT_OK,
    EXIT_USAGE,
    main,
)
from qobdd.pcnf import parse_qdimacs


def run(capsys, *argv):
    code = main(list(argv))
    captured = capsys.readouterr()
    return code, captured.out, captured.err


def test_gen_quparity_clause_count(tmp_path, capsys):
    out = tmp_path / "q4.qdimacs"
    code, _, _ = run(capsys, "gen", "quparity", "4", "-o", str(out))
    assert code == EXIT_OK
    f = parse_qdimacs(out.read_text())
    assert len(f.clauses) == 8 * 4 - 6 == 26


def test_gen_eqprime_clause_count(capsys):
    code, out, _ = run(capsys, "gen", "eqprime", "2")
    assert code == EXIT_OK
    assert len(parse_qdimacs(out).clauses) == 6


def test_gen_invalid_size_is_usage_error(capsys):
    code, _, err = run(capsys, "gen", "eqprime", "1")
    assert code == EXIT_USAGE
    code2, _, _ = run(capsys, "gen", "quparity", "four")
    assert code2 == EXIT_USAGE


def test_gen_ipg_from_edge_list(tmp_path, capsys):
    graph = tmp_path / "g.edges"
    graph.write_text("1 2\n3 4\n")
    code, out, _ = run(capsys, "gen", "ipg", str(graph))
    assert code == EXIT_OK
    f = parse_qdimacs(out)
    assert len(f.universals) == 1


def test_full_pipeline_ends_winning(tmp_path, capsys):
    qdimacs = tmp_path / "eq4.qdimacs"
    trace = tmp_path / "eq4.qobddtrace"
    strat = tmp_path / "eq4.strategy"
    assert run(capsys, "gen", "eqprime", "4", "-o", str(qdimacs))[0] == EXIT_OK
    code, out, _ = run(
        capsys, "solve", str(qdimacs), "--proof", str(trace), "--expect", "false"
    )
    assert code == EXIT_OK
    assert out.strip() == "FALSE"
    code, out, _ = run(capsys, "check", str(qdimacs), str(trace))
    assert code == EXIT_OK and "ACCEPTED refutation" in out
    assert run(capsys, "extract", str(qdimacs), str(trace), "-o", str(strat))[0] == EXIT_OK
    code, out, _ = run(capsys, "verify", str(qdimacs), str(strat))
    assert code == EXIT_OK
    assert out.strip() == "WINNING"


def test_check_tampered_trace_exits_2(tmp_path, capsys):
    qdimacs = tmp_path / "eq2.qdimacs"
    trace = tmp_path / "eq2.trace"
    run(capsys, "gen", "eqprime", "2", "-o", str(qdimacs))
    run(capsys, "solve", str(qdimacs), "--proof", str(trace))
    text = trace.read_text().splitlines()
    text[1] = "h " + "0" * 64
    trace.write_text("\n".join(text) + "\n")
    code, _, err = run(capsys, "check", str(qdimacs), str(trace))
    assert code == EXIT_CHECK
    assert "formula-hash-mismatch" in err


def test_check_truncated_trace_exits_2(tmp_path, capsys):
    qdimacs = tmp_path / "eq2.qdimacs"
    trace = tmp_path / "eq2.trace"
    run(capsys, "gen", "eqprime", "2", "-o", str(qdimacs))
    run(capsys, "solve", str(qdimacs), "--proof", str(trace))
    lines = trace.read_text().splitlines()
    trace.write_text("\n".join(lines[: len(lines) - 3]) + "\n")
    code, _, err = run(capsys, "check", str(qdimacs), str(trace))
    assert code == EXIT_CHECK
    assert "truncated" in err


def test_solve_expect_mismatch_exits_3(tmp_path, capsys):
    qdimacs = tmp_path / "true.qdimacs"
    qdimacs.write_text("p cnf 1 1\ne 1 0\n1 0\n")
    code, out, _ = run(capsys, "solve", str(qdimacs), "--expect", "false")
    assert code == EXIT_EXPECT
    assert out.strip() == "TRUE"


def test_solve_budget_exits_4(tmp_path, capsys):
    qdimacs = tmp_path / "eq6.qdimacs"
    run(capsys, "gen", "eqprime", "6", "-o", str(qdimacs))
    code, _, _ = run(capsys, "--budget", "20", "solve", str(qdimacs))
    assert code == EXIT_BUDGET


def test_solve_stats_and_json(tmp_path, capsys):
    qdimacs = tmp_path / "eq3.qdimacs"
    stats = tmp_path / "stats.json"
    run(capsys, "gen", "eqprime", "3", "-o", str(qdimacs))
    code, out, _ = run(capsys, "--json", "solve", str(qdimacs), "--stats", str(stats))
    assert code == EXIT_OK
    payload = json.loads(out)
    assert payload["value"] is False
    report = json.loads(stats.read_text())
    assert {"value", "max_width", "trace_nodes", "lines", "eliminations"} <= set(report)
    assert "wall_time_ms" not in report  # only with --timings


def test_outputs_reproducible(tmp_path, capsys):
    qdimacs = tmp_path / "eq3.qdimacs"
    run(capsys, "gen", "eqprime", "3", "-o", str(qdimacs))
    outs = set()
    for _ in range(2):
        code, out, _ = run(capsys, "--json", "--seed", "11", "solve", str(qdimacs))
        assert code == EXIT_OK
        outs.add(out)
    assert len(outs) == 1


def test_solve_given_order(tmp_path, capsys):
    qdimacs = tmp_path / "eq2.qdimacs"
    orderfile = tmp_path / "order.txt"
    run(capsys, "gen", "eqprime", "2", "-o", str(qdimacs))
    f = parse_qdimacs(qdimacs.read_text())
    orderfile.write_text(" ".join(str(v) for v in f.variables) + "\n")
    code, out, _ = run(capsys, "solve", str(qdimacs), "--order", f"given:{orderfile}")
    assert code == EXIT_OK and out.strip() == "FALSE"
    code, _, _ = run(capsys, "solve", str(qdimacs), "--order", "bogus")
    assert code == EXIT_USAGE


def test_translate_command(tmp_path, capsys):
    qdimacs = tmp_path / "pairs.qdimacs"
    qdimacs.write_text("p cnf 2 4\na 1 0\ne 2 0\n1 2 0\n1 -2 0\n-1 2 0\n-1 -2 0\n")
    proof = tmp_path / "proof.qures"
    proof.write_text("1 A 1 2 0\n2 A 1 -2 0\n3 R 1 2 2\n4 U 3 1\n")
    trace = tmp_path / "out.trace"
    code, _, _ = run(capsys, "translate", str(qdimacs), str(proof), "-o", str(trace))
    assert code == EXIT_OK
    code, out, _ = run(capsys, "check", str(qdimacs), str(trace))
    assert code == EXIT_OK and "refutation" in out


def test_verify_counterexample(tmp_path, capsys):
    qdimacs = tmp_path / "eq2.qdimacs"
    run(capsys, "gen", "eqprime", "2", "-o", str(qdimacs))
    strat = tmp_path / "const.strategy"
    strat.write_text(
        "p qobdd-strategy\n"
        "u 3 1\nentry 1\nobdd 1\n0 T1 - -\n"
        "u 4 1\nentry 1\nobdd 1\n0 T1 - -\n"
    )
    code, out, _ = run(capsys, "verify", str(qdimacs), str(strat))
    assert code == EXIT_CHECK
    assert out.startswith("COUNTEREXAMPLE")


def test_bench_table_schema_and_monotone_sizes(capsys):
    code, out, _ = run(capsys, "bench", "--family", "quparity", "--n", "2:6:2")
    assert code == EXIT_OK
    lines = out.strip().splitlines()
    assert lines[0].split("\t") == [
        "family", "n", "order", "value", "max_width", "trace_nodes", "eliminations",
    ]
    sizes = [int(row.split("\t")[5]) for row in lines[1:]]
    assert sizes == sorted(sizes)


def test_bench_eqprime_constant_width(capsys):
    code, out, _ = run(
        capsys, "--json", "bench", "--family", "eqprime", "--n", "4:8:2",
        "--orders", "pathwidth",
    )
    assert code == EXIT_OK
    rows = json.loads(out)
    widths = {r["max_width"] for r in rows}
    assert len(widths) == 1
    assert all(r["value"] is False for r in rows)


def test_bench_threads(capsys):
    code, out, _ = run(
        capsys, "--threads", "2", "--json", "bench",
        "--family", "eqprime", "--n", "2:4",
    )
    assert code == EXIT_OK
    rows = json.loads(out)
    assert [r["n"] for r in rows] == [2, 3, 4]


def test_verify_json_mode(tmp_path, capsys):
    qdimacs = tmp_path / "eq2.qdimacs"
    trace = tmp_path / "eq2.trace"
    strat = tmp_path / "eq2.strategy"
    run(capsys, "gen", "eqprime", "2", "-o", str(qdimacs))
    run(capsys, "solve", str(qdimacs), "--proof", str(trace))
    run(capsys, "extract", str(qdimacs), str(trace), "-o", str(strat))
    code, out, _ = run(capsys, "--json", "verify", str(qdimacs), str(strat))
    assert code == EXIT_OK
    data = json.loads(out)
    assert data["winning"] is True and data["exhaustive"] is True


def test_rect_analyze(tmp_path, capsys):
    graph = tmp_path / "m3.edges"
    graph.write_text("1 2\n3 4\n5 6\n")
    report = tmp_path / "rect.json"
    code, out, _ = run(
        capsys, "rect", "analyze", "--graph", str(graph),
        "--partition", "pairs", "--report", str(report),
    )
    assert code == EXIT_OK
    data = json.loads(report.read_text())
    assert {"n", "m", "bound", "oracle_max", "witness"} <= set(data)
    assert data["n"] == 6 and data["m"] == 3 and data["ok"]


def test_rect_analyze_random_partition(tmp_path, capsys):
    graph = tmp_path / "c4.edges"
    graph.write_text("1 2\n2 3\n3 4\n1 4\n")
    code, out, _ = run(
        capsys, "rect", "analyze", "--graph", str(graph), "--partition", "random:3"
    )
    assert code == EXIT_OK
    data = json.loads(out)
    assert data["ok"]


def test_usage_errors(capsys):
    assert run(capsys, "frobnicate")[0] == EXIT_USAGE
    assert run(capsys, "bench", "--family", "eqprime", "--n", "x")[0] == EXIT_USAGE
