from __future__ import annotations

import json
import random

import pytest

from postman.cli import main
from postman.generate import random_colored_graph
from postman.graph_core import (is_strongly_connected, parse_colored_graph,
                                parse_mixed_graph, parse_pbs_instance,
                                serialize_colored_graph, underlying_graph)
from postman.reductions.to_mcpp import pbs_to_mcpp

TRIANGLE = "v 3\na 0 1 1\na 1 2 1\na 2 0 1\n"


def run(capsys, *argv):
    code = main([str(a) for a in argv])
    out = capsys.readouterr().out
    return code, out


def run_json(capsys, *argv):
    code, out = run(capsys, *argv)
    return code, json.loads(out)


@pytest.fixture
def triangle(tmp_path):
    path = tmp_path / "triangle.mg"
    path.write_text(TRIANGLE)
    return path


@pytest.mark.parametrize("mode", ["exact", "fpt"])
def test_solve_mcpp_triangle(capsys, triangle, mode):
    code, rep = run_json(capsys, "solve-mcpp", "--mode", mode, triangle)
    assert code == 0
    assert rep["weight"] == 3
    assert rep["counts"] == {"arcs": {"0": 1, "1": 1, "2": 1}, "edges": {}}
    assert rep["optimal_flag"] is True
    assert len(rep["walk"]["steps"]) == 3
    assert "wall_time" not in rep


def test_solve_mcpp_naive_triangle(capsys, triangle):
    code, rep = run_json(capsys, "solve-mcpp", "--mode", "naive", triangle)
    assert code == 0
    assert rep["weight"] == 9 and rep["iterations"] == 0


def test_timing_flag_adds_wall_time(capsys, triangle):
    _, rep = run_json(capsys, "solve-mcpp", "--timing", triangle)
    assert rep["wall_time"] >= 0


def test_solve_mcpp_rejects_unconnected(capsys, tmp_path):
    path = tmp_path / "arc.mg"
    path.write_text("v 2\na 0 1 1\n")
    code, rep = run_json(capsys, "solve-mcpp", path)
    assert code == 1
    assert rep["error"] == "no path from 1 to 0"


def test_malformed_file_reports_line(capsys, tmp_path):
    path = tmp_path / "bad.pbs"
    path.write_text("v 3\na 0 1 -1\na 1 7 0\n")
    code, rep = run_json(capsys, "solve-pbs", path)
    assert code == 1
    assert "line 3" in rep["error"]


def test_missing_file(capsys, tmp_path):
    code, rep = run_json(capsys, "solve-pbs", tmp_path / "nope.pbs")
    assert code == 1
    assert "cannot read" in rep["error"]


@pytest.mark.parametrize("argv", [
    ["solve-mcpp", "--mode", "magic", "x.mg"],
    ["solve-pbs", "--arc-cap", "-3", "x.pbs"],
    ["frobnicate"],
    [],
])
def test_usage_errors_exit_2(capsys, argv):
    assert main(argv) == 2
    capsys.readouterr()


def _clique_pipeline(capsys, tmp_path, cg):
    src = tmp_path / "cg.col"
    src.write_text(serialize_colored_graph(cg))
    out = tmp_path / "out.pbs"
    code, rep = run_json(capsys, "reduce", "clique-to-pbs", src, "-o", out)
    assert code == 0
    assert rep["certificate"] == f"{out}.cert.json"
    code, sol = run_json(capsys, "solve-pbs", "--mode", "brute", out)
    assert code == 0 and sol["complete"]
    return out, sol


def test_reduce_then_solve_finds_clique(capsys, tmp_path):
    cg = parse_colored_graph("k 2\nc 1 0\nc 1 1\nc 2 2\nc 2 3\n"
                             "e 0 2\ne 1 3\n")
    out, sol = _clique_pipeline(capsys, tmp_path, cg)
    assert sol["found"] and sol["weight"] < 0
    cert = f"{out}.cert.json"
    sol_path = tmp_path / "sol.json"
    sol_path.write_text(json.dumps(sol))
    code, lifted = run_json(capsys, "lift", cert, sol_path)
    assert code == 0
    assert cg.is_multicolored_clique(lifted["clique"])
    clique_path = tmp_path / "clique.json"
    clique_path.write_text(json.dumps({"clique": lifted["clique"]}))
    code, back = run_json(capsys, "lift", cert, clique_path)
    assert code == 0 and back["weight"] < 0


def test_reduce_rejects_vertex_without_neighbours(capsys, tmp_path):
    src = tmp_path / "cg.col"
    src.write_text("k 2\nc 1 0\nc 1 1\nc 2 2\nc 2 3\ne 0 2\ne 1 2\n")
    code, rep = run_json(capsys, "reduce", "clique-to-pbs", src)
    assert code == 1 and "no neighbour" in rep["error"]


HEXAGON = ("k 3\nc 1 0\nc 1 1\nc 2 2\nc 2 3\nc 3 4\nc 3 5\n"
           "e 0 2\ne 2 4\ne 4 1\ne 1 3\ne 3 5\ne 5 0\n")


def test_reduce_then_solve_without_clique(capsys, tmp_path):
    cg = parse_colored_graph(HEXAGON)
    assert not any(cg.is_multicolored_clique([a, b, c])
                   for a in (0, 1) for b in (2, 3) for c in (4, 5))
    src = tmp_path / "hex.col"
    src.write_text(HEXAGON)
    out = tmp_path / "hex.pbs"
    code, rep = run_json(capsys, "reduce", "clique-to-pbs", src, "-o", out)
    assert code == 0 and rep["pathwidth_upper_bound"] <= 22
    code, sol = run_json(capsys, "solve-pbs", "--no-strict", "--td",
                         rep["arcs"], "--arc-cap", "none", out)
    assert code == 0
    assert sol["complete"] and not sol["found"]


def test_pbs_to_mcpp_pipeline(capsys, tmp_path):
    pbs = tmp_path / "in.pbs"
    code, _ = run_json(capsys, "gen", "pbs", "--form", "reduction",
                       "--zero-arcs", 3, "--seed", 2, "-o", pbs)
    assert code == 0
    code, sol = run_json(capsys, "solve-pbs", "--mode", "brute", pbs)
    out = tmp_path / "out.mg"
    code, rep = run_json(capsys, "reduce", "pbs-to-mcpp", pbs, "-o", out)
    assert code == 0
    assert rep["M"] == rep["m1"] + 3
    cert = f"{out}.cert.json"
    code, mc = run_json(capsys, "solve-mcpp", "--mode", "exact", out)
    assert code == 0
    assert mc["weight"] == rep["W"] - (1 if sol["found"] else 0)
    mc_path = tmp_path / "mc.json"
    mc_path.write_text(json.dumps(mc))
    code, verdict = run_json(capsys, "verify", "mcpp", out, mc_path)
    assert code == 0 and verdict["valid"]
    code, back = run_json(capsys, "lift", cert, mc_path)
    assert code == 0 and back["found"] == sol["found"]
    sel_path = tmp_path / "sel.json"
    sel_path.write_text(json.dumps({"arcs": back["arcs"]}))
    code, fwd = run_json(capsys, "lift", cert, sel_path)
    assert code == 0 and fwd["weight"] == mc["weight"]


def test_reduce_to_stdout_inlines_certificate(capsys, tmp_path):
    pbs = tmp_path / "in.pbs"
    pbs.write_text("v 2\na 0 1 -1\n")
    code, rep = run_json(capsys, "reduce", "pbs-to-mcpp", pbs)
    assert code == 0
    assert parse_mixed_graph(rep["instance_text"]).vertex_count > 2
    assert rep["certificate"]["source"] == "v 2\na 0 1 -1\n"


def test_verify_pbs(capsys, tmp_path):
    pbs = tmp_path / "two.pbs"
    pbs.write_text("v 2\na 0 1 -1\na 1 0 0\n")
    good = tmp_path / "good.json"
    good.write_text(json.dumps({"arcs": [0, 1]}))
    bad = tmp_path / "bad.json"
    bad.write_text(json.dumps([0]))
    code, rep = run_json(capsys, "verify", "pbs", pbs, good)
    assert code == 0 and rep["valid"] and rep["weight"] == -1
    code, rep = run_json(capsys, "verify", "pbs", pbs, bad)
    assert code == 1 and not rep["valid"] and rep["reason"]


def test_verify_bad_json(capsys, tmp_path, triangle):
    sol = tmp_path / "sol.json"
    sol.write_text("{\n\n nope")
    code, rep = run_json(capsys, "verify", "mcpp", triangle, sol)
    assert code == 1 and "line 3" in rep["error"]


def test_params(capsys, tmp_path):
    path = tmp_path / "p4.mg"
    path.write_text("v 4\ne 0 1 1\ne 1 2 1\ne 2 3 1\ne 3 0 1\n")
    code, rep = run_json(capsys, "params", path)
    assert code == 0
    assert rep["tree_depth"] == 3
    assert rep["pathwidth_upper_bound"] == 2 and rep["pathwidth_exact"]
    pbs = tmp_path / "x.pbs"
    pbs.write_text("v 3\na 0 1 -1\na 1 2 0\n")
    code, rep = run_json(capsys, "params", "--kind", "pbs", pbs)
    assert code == 0 and rep["tree_depth"] == 2


def test_gen_mixed_is_strongly_connected(capsys):
    code, rep = run_json(capsys, "gen", "mixed", "--n", 6, "--m", 10,
                         "--seed", 1)
    assert code == 0
    g = parse_mixed_graph(rep["instance_text"])
    assert g.vertex_count == 6 and g.element_count == 10
    assert is_strongly_connected(g)


def test_gen_colored_is_valid(capsys):
    code, rep = run_json(capsys, "gen", "colored", "--k", 3,
                         "--class-size", 2, "--edge-prob", 0.5, "--seed", 7)
    assert code == 0
    cg = parse_colored_graph(rep["instance_text"])
    assert cg == random_colored_graph(3, 2, 0.5, seed=7)
    assert [len(c) for c in cg.classes] == [2, 2, 2]


def test_gen_reduction_form_meets_precondition(capsys):
    code, rep = run_json(capsys, "gen", "pbs", "--form", "reduction",
                         "--zero-arcs", 3)
    assert code == 0
    p = parse_pbs_instance(rep["instance_text"])
    assert sorted(a.weight for a in p.arcs) == [-1, 0, 0, 0]
    adj = underlying_graph(p)
    seen, stack = set(), [next(iter(adj))]
    while stack:
        v = stack.pop()
        if v not in seen:
            seen.add(v)
            stack += adj[v]
    assert seen == set(adj)
    g, _, _ = pbs_to_mcpp(p)
    assert is_strongly_connected(g)


@pytest.mark.parametrize("form", ["any", "restricted"])
def test_gen_pbs_forms(capsys, form):
    code, rep = run_json(capsys, "gen", "pbs", "--form", form, "--m", 8,
                         "--double-pairs", 1, "--forbidden-pairs", 1)
    assert code == 0
    p = parse_pbs_instance(rep["instance_text"])
    assert len(p.double_pairs) == 1 and len(p.forbidden_pairs) == 1
    if form == "restricted":
        (d, e), = p.double_pairs
        (f, g), = p.forbidden_pairs
        assert [p.arcs[i].weight for i in (d, e, f, g)] == [0, 0, -1, -1]
        assert {a.weight for a in p.arcs} <= {-1, 0, 1}


def test_gen_infeasible_params(capsys):
    code, rep = run_json(capsys, "gen", "pbs", "--form", "reduction",
                         "--n", 9, "--zero-arcs", 1)
    assert code == 1 and "error" in rep


def test_gen_writes_file(capsys, tmp_path):
    out = tmp_path / "g.mg"
    code, rep = run_json(capsys, "gen", "mixed", "--seed", 3, "-o", out)
    assert code == 0 and rep["output"] == str(out)
    assert is_strongly_connected(parse_mixed_graph(out.read_text()))


def test_bench(capsys):
    code, rep = run_json(capsys, "bench", "--count", 4, "--n", 4, "--m", 6,
                         "--seed", 5)
    assert code == 0 and rep["all_agree"]
    assert len(rep["runs"]) == 4


@pytest.mark.parametrize("argv", [
    ["gen", "colored", "--seed", "11"],
    ["bench", "--count", "3", "--n", "4", "--m", "6"],
])
def test_output_is_byte_stable(capsys, argv):
    first = run(capsys, *argv)
    second = run(capsys, *argv)
    assert first == second


def test_solve_is_byte_stable(capsys, tmp_path):
    rng = random.Random(1)
    path = tmp_path / "g.mg"
    code, _ = run(capsys, "gen", "mixed", "--seed", rng.randint(0, 99),
                  "-o", path)
    outputs = {run(capsys, "solve-mcpp", "--mode", "fpt", path)[1]
               for _ in range(2)}
    assert len(outputs) == 1


def test_quiet_prints_summary(capsys, triangle):
    code, out = run(capsys, "solve-mcpp", "--quiet", triangle)
    assert code == 0
    assert out.strip() == "weight 3 (exact)"


def test_version(capsys):
    assert main(["--version"]) == 0
    assert capsys.readouterr().out.strip()
