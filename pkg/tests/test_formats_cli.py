import csv
import io
import json
import random

import pytest

from kmedexact import generate
from kmedexact.cli import main
from kmedexact.facility import FLInstance
from kmedexact.formats import KMedFile, ParseError, format_value, parse_instance, parse_text
from kmedexact.matching import WeightedGraph
from kmedexact.metric import Clustering, Objective, evaluate_cost
from kmedexact.exact import count_guesses


def run(*argv):
    out = io.StringIO()
    code = main([str(a) for a in argv], out=out)
    return code, out.getvalue()


def write(tmp_path, name, text):
    p = tmp_path / name
    p.write_text(text)
    return p


def test_minimal_kmed():
    parsed = parse_text("KMED 1\n1 1\n0\n")
    assert parsed.instance.n == 1 and parsed.k == 1


def test_comments_and_blank_lines():
    parsed = parse_text("# hi\n\nKMED 1\n# matrix follows\n2 1\n0 3\n\n3 0\n")
    assert parsed.instance.dist == ((0, 3), (3, 0))


@pytest.mark.parametrize("text, line, col, needle", [
    ("KMED 1\n2 1\n1 5\n5 0\n", 3, 1, "nonzero diagonal at (0,0)"),
    ("KMED 1\n2 1\n0 5\n4 0\n", 4, 1, "asymmetry"),
    ("KMED 1\n2 1\n0 x\n5 0\n", 3, 3, "non-integer"),
    ("KMED 1\n2 1\n0 5 1\n5 0\n", 3, 5, "expected 2 integers"),
    ("KMED 1\n2 1\n0 -5\n-5 0\n", 3, 3, "negative"),
    ("KMED 1\n2 3\n0 5\n5 0\n", 2, 3, "k=3"),
    ("KMED 2\n1 1\n0\n", 1, 1, "version"),
    ("MATRIX 1\n", 1, 1, "unrecognized header"),
    ("KMED 1\n2 1\n0 5\n", 4, 1, "end of file"),
    ("KMED 1\n1 1\n0\n7\n", 4, 1, "trailing"),
])
def test_parse_errors_locate_cell(text, line, col, needle):
    with pytest.raises(ParseError) as err:
        parse_text(text)
    assert err.value.line == line and err.value.col == col
    assert needle in str(err.value)


def test_asym_flag():
    parsed = parse_text("KMED 1\n2 1 ASYM\n0 5\n4 0\n")
    assert not parsed.instance.symmetric


def test_kmedfl_2x2():
    inst = parse_text("KMEDFL 1\n2 2 1\n1 3\n3 1\n")
    assert isinstance(inst, FLInstance)
    assert inst.dist == ((1, 3), (3, 1)) and inst.k == 1


def test_round_trip():
    rng = random.Random(4)
    values = [
        KMedFile(generate.grid_l1(6, rng), 2),
        KMedFile(generate.closure(5, rng), 3),
        KMedFile(generate.asymmetric(4, rng), 1),
        generate.random_fl(5, 3, 2, rng),
        generate.connected_graph(6, rng),
        generate.covering_system(6, 4, 2, rng),
        WeightedGraph.from_edges(4, [(0, 1, 3), (2, 3, 4)]),
    ]
    for v in values:
        assert parse_text(format_value(v)) == v


def test_solve_means_two_points(tmp_path):
    f = write(tmp_path, "a.kmed", "KMED 1\n2 1\n0 5\n5 0\n")
    code, out = run("solve", f, "--objective", "means", "--json")
    rec = json.loads(out)
    assert code == 0
    assert rec["cost"] == 25
    assert set(rec) == {"cost", "centers", "clusters", "objective", "algorithm",
                        "guesses_explored", "elapsed_ms"}


def test_solve_k_equals_n(tmp_path):
    f = tmp_path / "r.kmed"
    assert run("gen", "random", "--n", 6, "--k", 6, "--seed", 1, "-o", f)[0] == 0
    assert json.loads(run("solve", f, "--json")[1])["cost"] == 0


def test_solve_matching_vs_brute_and_revalidates(tmp_path):
    for seed in range(4):
        f = tmp_path / f"r{seed}.kmed"
        run("gen", "random", "--model", "closure", "--n", 8, "--k", 3, "--seed", seed, "-o", f)
        a = json.loads(run("solve", f, "--json", "--algorithm", "matching")[1])
        b = json.loads(run("solve", f, "--json", "--algorithm", "brute")[1])
        assert a["cost"] == b["cost"]
        assert b["guesses_explored"] is None
        inst = parse_instance(f).instance
        cl = Clustering.from_clusters(inst.n, a["centers"], a["clusters"])
        assert evaluate_cost(inst, cl, Objective.median()) == a["cost"]
        assert a["centers"] == sorted(a["centers"])
        assert all(c == sorted(c) for c in a["clusters"])


def test_determinism_across_threads(tmp_path):
    f = tmp_path / "d.kmed"
    run("gen", "random", "--n", 9, "--k", 3, "--seed", 7, "-o", f)
    outs = []
    for threads in (1, 1, 2):
        rec = json.loads(run("solve", f, "--json", "--threads", threads)[1])
        rec.pop("elapsed_ms")
        outs.append(rec)
    assert outs[0] == outs[1] == outs[2]


def test_gen_is_deterministic(tmp_path):
    a, b = tmp_path / "a", tmp_path / "b"
    for kind in ("random", "graph", "sets", "fl"):
        run("gen", kind, "--seed", 3, "-o", a)
        run("gen", kind, "--seed", 3, "-o", b)
        assert a.read_bytes() == b.read_bytes()


def test_gen_domset_p4(tmp_path):
    g = write(tmp_path, "p4.graph", "GRAPH 1\n4 3\n0 1\n1 2\n2 3\n")
    k = tmp_path / "p4.kmed"
    assert run("gen", "domset", "--graph", g, "--k", 2, "-o", k)[0] == 0
    assert json.loads(run("solve", k, "--json")[1])["cost"] == 2


def test_gen_setcover_fl_solve(tmp_path):
    s = write(tmp_path, "s.sc", "SETCOVER 1\n2 2 1\n1 0\n1 1\n")
    f = tmp_path / "s.fl"
    assert run("gen", "setcover", "--sets", s, "-o", f)[0] == 0
    for alg in ("conv", "naive-conv", "brute"):
        code, out = run("fl", "solve", f, "--json", "--algorithm", alg)
        assert code == 0 and json.loads(out)["cost"] == 4


def test_verify_passes(tmp_path):
    f = tmp_path / "v.kmed"
    run("gen", "random", "--n", 6, "--k", 2, "--seed", 2, "-o", f)
    code, out = run("verify", f)
    assert code == 0 and out.strip().endswith("verify: PASS")
    g = tmp_path / "v.fl"
    run("gen", "fl", "--n", 6, "--m", 3, "--k", 2, "-o", g)
    assert run("verify", g)[0] == 0


def test_exit_codes(tmp_path):
    bad = write(tmp_path, "bad.kmed", "KMED 1\n2 1\n1 5\n5 0\n")
    assert run("solve", bad)[0] == 1
    assert run("solve", tmp_path / "missing.kmed")[0] == 1
    big = tmp_path / "big.kmed"
    run("gen", "random", "--n", 18, "--k", 2, "-o", big)
    assert run("solve", big, "--algorithm", "brute")[0] == 2
    ok = write(tmp_path, "ok.kmed", "KMED 1\n2 1\n0 5\n5 0\n")
    assert run("solve", ok, "--objective", "center")[0] == 2
    inf = write(tmp_path, "inf.fl", f"KMEDFL 1\n2 2 1\n{2**61} 1\n1 {2**61}\n")
    assert run("fl", "solve", inf)[0] == 2
    assert run("fl", "solve", ok)[0] == 1


def test_debug_match(tmp_path):
    f = write(tmp_path, "k4.w", "WGRAPH 1\n4 6\n0 1 1\n0 2 1\n0 3 1\n1 2 1\n1 3 1\n2 3 1\n")
    code, out = run("debug", "match", f)
    assert code == 0 and json.loads(out)["weight"] == 2


def test_bench_csv_monotone_and_bounded():
    code, out = run("bench", "--suite", "matching", "--max-n", 10, "--with-bound", "--algorithms", "matching")
    assert code == 0
    rows = list(csv.DictReader(io.StringIO(out)))
    assert list(rows[0])[:6] == ["n", "k", "algorithm", "elapsed_ms", "guesses_explored", "cost"]
    explored = [int(r["guesses_explored"]) for r in rows]
    assert explored == sorted(explored)
    for r in rows:
        assert int(r["guesses_explored"]) == int(r["count_guesses"]) == count_guesses(int(r["n"]), int(r["k"]))
        assert int(r["guesses_explored"]) <= int(r["bound"])


def test_bench_fl_suite():
    code, out = run("bench", "--suite", "fl", "--max-n", 8)
    rows = list(csv.DictReader(io.StringIO(out)))
    costs = {}
    for r in rows:
        costs.setdefault(r["n"], set()).add(r["cost"])
    assert code == 0 and all(len(c) == 1 for c in costs.values())
