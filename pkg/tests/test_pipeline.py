"""The end-to-end determinization routes, the bench harness, and the CLI."""

import random

import pytest

from detmon import cli
from detmon.equivalence import verdict_equiv
from detmon.pipeline import BENCH_COLUMNS, bench, bench_csv, determinize_monitor
from detmon.semantics import is_deterministic
from detmon.syntax import parse_monitor, print_term
from detmon.terms import END, NO, YES, TermError, Verdict, verdicts_in

from gen import random_monitor

A = frozenset({"a"})
AB = frozenset({"a", "b"})


# ---------------------------------------------------------------------------
# determinize_monitor
# ---------------------------------------------------------------------------


def test_rejects_unknown_methods():
    with pytest.raises(TermError):
        determinize_monitor(Verdict(YES), A, method="magic")


def test_rejects_two_verdict_monitors():
    with pytest.raises(TermError):
        determinize_monitor(parse_monitor("a.yes + b.no", AB), AB)


def test_verdictless_monitors_collapse_to_end():
    assert determinize_monitor(parse_monitor("a.end", A), A) == Verdict(END)
    assert determinize_monitor(parse_monitor("rec x. a.x", A), A) == Verdict(END)


def test_running_example_both_routes():
    m_e = parse_monitor("rec x. a.(a.no + x)", A)
    via_automata = determinize_monitor(m_e, A, method="automata")
    via_equations = determinize_monitor(m_e, A, method="equations")
    assert print_term(via_automata) == "rec x_s0. a.(rec x_s0_s1. a.no)"
    assert print_term(via_equations) == "a.a.no"
    for out in (via_automata, via_equations):
        assert is_deterministic(out)
        assert verdict_equiv(m_e, out, A)


def test_routes_agree_on_random_monitors():
    rng = random.Random(2024)
    done = 0
    for _ in range(150):
        m = random_monitor(rng, rng.randint(1, 8), AB, verdicts=(YES,))
        if YES not in verdicts_in(m):
            continue
        d1 = determinize_monitor(m, AB, method="automata", force=True)
        d2 = determinize_monitor(m, AB, method="equations")
        assert is_deterministic(d1), print_term(m)
        assert is_deterministic(d2), print_term(m)
        assert verdict_equiv(m, d1, AB), print_term(m)
        assert verdict_equiv(d1, d2, AB), print_term(m)
        done += 1
    assert done >= 100


def test_no_verdict_monitors_are_dualized_back():
    m = parse_monitor("a.no + a.a.no", A)
    out = determinize_monitor(m, A, force=True)
    assert verdicts_in(out) == {NO}
    assert is_deterministic(out)
    assert verdict_equiv(m, out, A)


# ---------------------------------------------------------------------------
# bench
# ---------------------------------------------------------------------------


def test_bench_rows_have_the_documented_shape():
    rows = bench("mn", 1, 3, timeout=60.0)
    assert [r["n"] for r in rows] == [1, 2, 3]
    for row in rows:
        assert tuple(row.keys()) == BENCH_COLUMNS
        assert row["status"] == "ok"
    assert [r["min_dfa_states"] for r in rows] == [4, 6, 10]  # 2^n + 2
    assert [r["det_monitor_size"] for r in rows] == [14, 35, 164]


def test_bench_unknown_family():
    with pytest.raises(TermError):
        bench("zz", 1, 2)


def test_bench_csv_is_rectangular():
    rows = bench("mn", 1, 2, timeout=60.0)
    csv = bench_csv(rows)
    lines = csv.strip().split("\n")
    assert lines[0] == ",".join(BENCH_COLUMNS)
    assert len(lines) == 3
    for line in lines:
        assert len(line.split(",")) == len(BENCH_COLUMNS)


# ---------------------------------------------------------------------------
# CLI
# ---------------------------------------------------------------------------


def _mfile(tmp_path, name, text):
    p = tmp_path / name
    p.write_text(text)
    return str(p)


def test_cli_synth(tmp_path, capsys):
    f = _mfile(tmp_path, "f.hml", "alphabet: a\nmax X. [a][a]ff\n")
    assert cli.main(["synth", f]) == 0
    out = capsys.readouterr().out
    assert "alphabet: a" in out
    assert "no" in out


def test_cli_determinize_golden(tmp_path, capsys):
    m = _mfile(tmp_path, "m.mon", "alphabet: a\nrec x. a.(a.no + x)\n")
    assert cli.main(["determinize", m, "--method", "equations"]) == 0
    assert "a.a.no" in capsys.readouterr().out


def test_cli_equiv_exit_codes(tmp_path, capsys):
    m1 = _mfile(tmp_path, "m1.mon", "alphabet: a\na.yes\n")
    m2 = _mfile(tmp_path, "m2.mon", "alphabet: a\nrec x. a.yes\n")
    m3 = _mfile(tmp_path, "m3.mon", "alphabet: a\na.a.yes\n")
    assert cli.main(["equiv", m1, m2]) == 0
    assert "equivalent" in capsys.readouterr().out
    assert cli.main(["equiv", m1, m3]) == 1
    err = capsys.readouterr().out
    assert "not equivalent" in err and "a" in err


def test_cli_conflict_exit_codes(tmp_path, capsys):
    bad = _mfile(tmp_path, "bad.mon", "alphabet: a\na.yes + a.no\n")
    ok = _mfile(tmp_path, "ok.mon", "alphabet: a,b\na.yes + b.no\n")
    assert cli.main(["conflict", bad]) == 1
    assert "conflicting on a" in capsys.readouterr().out
    assert cli.main(["conflict", ok]) == 0
    assert "conflict-free" in capsys.readouterr().out


def test_cli_malformed_input_is_exit_2(tmp_path, capsys):
    junk = _mfile(tmp_path, "junk.mon", "alphabet: a\nrec rec rec\n")
    assert cli.main(["determinize", junk]) == 2
    assert "error" in capsys.readouterr().err
    assert cli.main(["trace", "--monitor", str(tmp_path / "missing.mon"),
                     "--trace", "a"]) == 2


def test_cli_cap_is_exit_3(tmp_path, capsys):
    from detmon.automata import format_automaton
    from detmon.families import mn_nfa

    big = _mfile(tmp_path, "big.aut", format_automaton(mn_nfa(9)))  # 11 states
    assert cli.main(["from-nfa", big]) == 3
    assert "error" in capsys.readouterr().err
    assert cli.main(["from-nfa", big, "--force"]) == 0


def test_cli_trace(tmp_path, capsys):
    m = _mfile(tmp_path, "m.mon", "alphabet: a\nrec x. a.(a.no + x)\n")
    assert cli.main(["trace", "--monitor", m, "--trace", "a.a"]) == 0
    assert "no" in capsys.readouterr().out
    assert cli.main(["trace", "--monitor", m, "--trace", "a"]) == 0
    assert "(none)" in capsys.readouterr().out


def test_cli_family(capsys):
    assert cli.main(["family", "--name", "mn", "--n", "1"]) == 0
    assert "rec x. 0.x + 1.x + 1.e.yes" in capsys.readouterr().out
    assert cli.main(["family", "--name", "mn", "--n", "2", "--kind", "dfa"]) == 0
    out = capsys.readouterr().out
    assert out.startswith("type: dfa")


def test_cli_automaton_round_trip(tmp_path, capsys):
    m = _mfile(tmp_path, "m.mon", "alphabet: a\nrec x. a.(a.no + x)\n")
    assert cli.main(["to-nfa", m, "--verdict", "no"]) == 0
    aut = _mfile(tmp_path, "m.aut", capsys.readouterr().out)
    assert cli.main(["to-dfa", aut, "--minimize"]) == 0
    assert "type: dfa" in capsys.readouterr().out
    # from-nfa rebuilds an acceptance monitor; the verdict the automaton
    # came from is not recorded in the file format
    assert cli.main(["from-nfa", aut]) == 0
    back = capsys.readouterr().out
    assert "yes" in back


def test_cli_simulate(tmp_path, capsys):
    m = _mfile(tmp_path, "m.mon", "alphabet: a,b\na.a.yes\n")
    lts = _mfile(
        tmp_path, "p.lts", "states: s0, s1\ninit: s0\ns0 -a-> s1\ns1 -a-> s0\n"
    )
    assert cli.main(["simulate", "--monitor", m, "--lts", lts]) == 0
    out = capsys.readouterr().out
    assert "acc: True" in out
    assert "rej: False" in out


def test_cli_bench_writes_csv(tmp_path, capsys):
    out = tmp_path / "rows.csv"
    argv = ["bench", "--family", "mn", "--min-n", "1", "--max-n", "2",
            "--out", str(out)]
    assert cli.main(argv) == 0
    lines = out.read_text().strip().split("\n")
    assert lines[0] == ",".join(BENCH_COLUMNS)
    assert len(lines) == 3
