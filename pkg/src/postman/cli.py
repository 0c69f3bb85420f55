"""Command-line entry point.

Every subcommand prints one JSON report (sorted keys) on stdout, or a
one-line summary with ``--quiet``. Exit status: 0 on success, 1 on an
instance error (bad file, failed precondition), 2 on a usage error.
Set ``POSTMAN_LOG=DEBUG`` (or another level name) for diagnostics on
stderr.
"""

from __future__ import annotations

import argparse
import hashlib
import json
import logging
import os
import random
import sys
import time
from dataclasses import dataclass, field
from pathlib import Path
from typing import Any, Callable

from . import __version__
from .generate import (random_colored_graph, random_mixed_graph, random_pbs,
                       random_reduction_input, random_restricted_pbs)
from .graph_core import (InstanceError, parse_colored_graph,
                         parse_mixed_graph, parse_pbs_instance,
                         serialize_colored_graph, serialize_mixed_graph,
                         serialize_pbs_instance, underlying_graph,
                         validate_mcpp_instance)
from .mcpp.oracle import exact_mcpp_oracle
from .mcpp.solution import (McppSolution, extract_closed_walk,
                            verify_mcpp_solution)
from .mcpp.solve import solve_mcpp
from .params import pathwidth_exact, pathwidth_upper_bound, tree_depth_exact
from .pbs.brute import brute_force_negative_pbs
from .pbs.check import check_properly_balanced
from .pbs.fpt import fpt_negative_pbs
from .reductions.clique import (CliqueCertificate, clique_from_pbs_solution,
                                clique_to_pbs, pbs_witness_from_clique)
from .reductions.to_mcpp import (McppCertificate,
                                 mcpp_solution_from_pbs_solution,
                                 pbs_solution_from_mcpp_solution, pbs_to_mcpp)

log = logging.getLogger("postman")


@dataclass
class RunReport:
    """What one command produced; ``wall_time`` only with ``--timing``."""

    command: str
    digest: str | None
    result: dict
    complete: bool = True
    wall_time: float | None = None
    summary: str = ""
    extra: dict = field(default_factory=dict)

    def to_json(self) -> dict:
        out = {"command": self.command, "instance": self.digest,
               "complete": self.complete, **self.result}
        if self.wall_time is not None:
            out["wall_time"] = round(self.wall_time, 6)
        return out


def _read(path: str) -> tuple[str, str]:
    try:
        text = Path(path).read_text(encoding="utf-8")
    except OSError as exc:
        raise InstanceError(f"cannot read {path}: {exc.strerror}") from exc
    return text, "sha256:" + hashlib.sha256(text.encode()).hexdigest()[:16]


def _write(path: str, text: str) -> None:
    try:
        Path(path).write_text(text, encoding="utf-8")
    except OSError as exc:
        raise InstanceError(f"cannot write {path}: {exc.strerror}") from exc


def _arc_cap(value: str):
    if value in ("auto", "none"):
        return None if value == "none" else "auto"
    try:
        n = int(value)
    except ValueError:
        raise argparse.ArgumentTypeError(
            f"expected an integer, 'auto' or 'none', got {value!r}")
    if n < 1:
        raise argparse.ArgumentTypeError("arc cap must be positive")
    return n


def _td(value: str):
    if value == "auto":
        return value
    try:
        n = int(value)
    except ValueError:
        raise argparse.ArgumentTypeError(
            f"expected an integer or 'auto', got {value!r}")
    if n < 0:
        raise argparse.ArgumentTypeError("tree-depth must be non-negative")
    return n


# ---------------------------------------------------------------------------
# subcommands


def cmd_solve_mcpp(args) -> RunReport:
    text, digest = _read(args.instance)
    g = parse_mixed_graph(text)
    validate_mcpp_instance(g)
    kwargs = {}
    if args.mode == "fpt":
        kwargs = {"arc_cap": args.arc_cap, "jobs": args.jobs}
    rep = solve_mcpp(g, args.mode, **kwargs)
    walk = extract_closed_walk(g, rep.solution)
    result = {"mode": args.mode, "weight": rep.weight,
              "optimal_flag": rep.optimal, "iterations": rep.iterations,
              "initial_weight": rep.initial_weight,
              "counts": rep.solution.to_json(),
              "walk": {"start": walk.start, "steps": walk.to_json()}}
    complete = rep.optimal or args.mode != "fpt"
    if not complete:
        result["status"] = "locally optimal under cap"
    return RunReport("solve-mcpp", digest, result, complete,
                     summary=f"weight {rep.weight} ({args.mode})")


def cmd_solve_pbs(args) -> RunReport:
    text, digest = _read(args.instance)
    p = parse_pbs_instance(text)
    if args.mode == "brute":
        cap = None if args.arc_cap in ("auto", None) else args.arc_cap
        sel = brute_force_negative_pbs(p, max_arcs=cap)
        complete = cap is None
    else:
        res = fpt_negative_pbs(p, td=args.td, arc_cap=args.arc_cap,
                               strict=args.strict, jobs=args.jobs)
        sel, complete = res.selection, res.complete
    weight = check_properly_balanced(p, sel).weight if sel else 0
    result = {"mode": args.mode, "found": sel is not None, "weight": weight,
              "arcs": sorted(sel) if sel else []}
    summary = (f"negative PBS of weight {weight}, {len(sel)} arcs"
               if sel else "no negative PBS")
    return RunReport("solve-pbs", digest, result, complete, summary=summary)


def cmd_reduce(args) -> RunReport:
    text, digest = _read(args.instance)
    if args.reduction == "clique-to-pbs":
        cg = parse_colored_graph(text)
        p, cert = clique_to_pbs(cg)
        out_text = serialize_pbs_instance(p)
        sidecar = {**cert.to_json(), "source": text,
                   "target": out_text}
        bound = pathwidth_upper_bound(underlying_graph(p), budget=0,
                                      hints=[cert.decomposition])
        result = {"reduction": args.reduction, "vertices": p.vertex_count,
                  "arcs": len(p.arcs), "double_pairs": len(p.double_pairs),
                  "pathwidth_upper_bound": bound.width,
                  "pathwidth_claim": cert.pathwidth_bound}
    else:
        p = parse_pbs_instance(text)
        g, W, cert = pbs_to_mcpp(p, expand_heavy=args.expand_heavy)
        out_text = serialize_mixed_graph(g)
        sidecar = {**cert.to_json(), "source": text, "target": out_text}
        result = {"reduction": args.reduction, "vertices": g.vertex_count,
                  "elements": g.element_count, "m1": cert.m1, "m2": cert.m2,
                  "M": cert.M, "W": W, "total_weight": g.total_weight()}
    if args.output:
        _write(args.output, out_text)
        cert_path = args.output + ".cert.json"
        _write(cert_path, json.dumps(sidecar, sort_keys=True, indent=1) + "\n")
        result["output"] = args.output
        result["certificate"] = cert_path
    else:
        result["instance_text"] = out_text
        result["certificate"] = sidecar
    return RunReport("reduce", digest, result,
                     summary=f"{args.reduction}: wrote "
                     f"{args.output or 'stdout'}")


def _load_cert(data: dict):
    kind = data.get("reduction")
    if kind == "clique-to-pbs":
        cg = parse_colored_graph(data["source"])
        p = parse_pbs_instance(data["target"])
        return CliqueCertificate.from_json(data, cg, p)
    if kind == "pbs-to-mcpp":
        p = parse_pbs_instance(data["source"])
        g = parse_mixed_graph(data["target"])
        return McppCertificate.from_json(data, p, g)
    raise InstanceError(f"unknown certificate kind {kind!r}")


def _load_json(path: str) -> tuple[Any, str]:
    text, digest = _read(path)
    try:
        return json.loads(text), digest
    except json.JSONDecodeError as exc:
        raise InstanceError(f"{path}: invalid JSON at line {exc.lineno}") \
            from exc


def _mcpp_counts(sol: dict) -> McppSolution:
    """Accept a bare count map or a ``solve-mcpp`` report."""
    for key in ("counts", "solution"):
        if key in sol:
            return McppSolution.from_json(sol[key])
    return McppSolution.from_json(sol)


def cmd_lift(args) -> RunReport:
    data, digest = _load_json(args.certificate)
    cert = _load_cert(data)
    sol, _ = _load_json(args.solution)
    if isinstance(cert, CliqueCertificate):
        if "clique" in sol:
            sel = pbs_witness_from_clique(cert, sol["clique"])
            result = {"direction": "clique->pbs", "arcs": sorted(sel),
                      "weight": check_properly_balanced(cert.instance,
                                                        sel).weight}
        elif "arcs" in sol:
            if not sol.get("found", True):
                raise InstanceError("the PBS solution reports nothing found")
            clique = clique_from_pbs_solution(cert, sol["arcs"])
            result = {"direction": "pbs->clique", "clique": clique}
        else:
            raise InstanceError("solution needs a 'clique' or 'arcs' field")
    else:
        if {"counts", "solution", "edges"} & set(sol):
            mc = _mcpp_counts(sol)
            sel = pbs_solution_from_mcpp_solution(cert, mc)
            weight = check_properly_balanced(cert.instance, sel).weight
            result = {"direction": "mcpp->pbs", "arcs": sorted(sel),
                      "found": weight < 0, "weight": weight}
        elif "arcs" in sol:
            mc = mcpp_solution_from_pbs_solution(cert, sol["arcs"])
            result = {"direction": "pbs->mcpp", "counts": mc.to_json(),
                      "weight": mc.weight(cert.graph)}
        else:
            raise InstanceError(
                "solution needs an 'arcs', 'counts' or 'solution' field")
    return RunReport("lift", digest, result,
                     summary=f"lifted {result['direction']}")


def cmd_verify(args) -> RunReport:
    text, digest = _read(args.instance)
    sol, _ = _load_json(args.solution)
    if args.kind == "mcpp":
        g = parse_mixed_graph(text)
        mc = _mcpp_counts(sol)
        v = verify_mcpp_solution(g, mc)
    else:
        p = parse_pbs_instance(text)
        arcs = sol.get("arcs", []) if isinstance(sol, dict) else sol
        v = check_properly_balanced(p, arcs)
    result = {"kind": args.kind, "valid": v.ok, "reason": v.reason,
              "witness": v.witness, "weight": v.weight}
    rep = RunReport("verify", digest, result,
                    summary="valid" if v.ok else f"invalid: {v.reason}")
    rep.extra["failed"] = not v.ok
    return rep


def cmd_params(args) -> RunReport:
    text, digest = _read(args.instance)
    obj = parse_pbs_instance(text) if args.kind == "pbs" \
        else parse_mixed_graph(text)
    adj = underlying_graph(obj)
    td, _ = tree_depth_exact(adj, cap=args.td_cap)
    pw = pathwidth_upper_bound(adj)
    result = {"tree_depth": td, "pathwidth_upper_bound": pw.width,
              "pathwidth_exact": pw.exact, "pathwidth_source": pw.source,
              "bags": [sorted(b) for b in pw.decomposition.bags]}
    if not pw.exact and len(adj) <= 20:
        result["pathwidth_upper_bound"] = pathwidth_exact(adj)
        result["pathwidth_exact"] = True
    return RunReport("params", digest, result,
                     summary=f"td={td} pw<={result['pathwidth_upper_bound']}")


def cmd_gen(args) -> RunReport:
    if args.n is None:
        args.n = 4 if args.kind == "pbs" and args.form == "reduction" else 6
    if args.kind == "mixed":
        g = random_mixed_graph(args.n, args.m, seed=args.seed,
                               edge_prob=args.edge_prob)
        text = serialize_mixed_graph(g)
    elif args.kind == "colored":
        cg = random_colored_graph(args.k, args.class_size, args.edge_prob,
                                  seed=args.seed)
        text = serialize_colored_graph(cg)
    elif args.form == "reduction":
        text = serialize_pbs_instance(random_reduction_input(
            args.zero_arcs, args.double_pairs, n=args.n, seed=args.seed))
    elif args.form == "restricted":
        text = serialize_pbs_instance(random_restricted_pbs(
            args.n, args.m, seed=args.seed, double_pairs=args.double_pairs,
            forbidden_pairs=args.forbidden_pairs))
    else:
        text = serialize_pbs_instance(random_pbs(
            args.n, args.m, seed=args.seed, double_pairs=args.double_pairs,
            forbidden_pairs=args.forbidden_pairs))
    result = {"kind": args.kind, "seed": args.seed}
    if args.output:
        _write(args.output, text)
        result["output"] = args.output
    else:
        result["instance_text"] = text
    digest = "sha256:" + hashlib.sha256(text.encode()).hexdigest()[:16]
    return RunReport("gen", digest, result,
                     summary=f"generated {args.kind} instance {digest}")


def cmd_bench(args) -> RunReport:
    rng = random.Random(args.seed)
    rows = []
    agree = True
    for i in range(args.count):
        g = random_mixed_graph(args.n, args.m, rng=rng)
        t0 = time.perf_counter()
        fpt = solve_mcpp(g, "fpt", arc_cap=args.arc_cap, jobs=args.jobs)
        t1 = time.perf_counter()
        exact = exact_mcpp_oracle(g).weight(g)
        t2 = time.perf_counter()
        row = {"index": i, "fpt_weight": fpt.weight, "exact_weight": exact,
               "optimal": fpt.optimal, "iterations": fpt.iterations}
        if args.timing:
            row["fpt_time"] = round(t1 - t0, 6)
            row["exact_time"] = round(t2 - t1, 6)
        agree &= fpt.weight == exact
        rows.append(row)
    result = {"seed": args.seed, "n": args.n, "m": args.m, "runs": rows,
              "all_agree": agree}
    rep = RunReport("bench", None, result, all(r["optimal"] for r in rows),
                    summary=f"{args.count} graphs, all agree: {agree}")
    rep.extra["failed"] = not agree
    return rep


# ---------------------------------------------------------------------------
# argument parsing


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--quiet", action="store_true",
                        help="print a one-line summary instead of JSON")
    common.add_argument("--timing", action="store_true",
                        help="include wall-clock times in the report")
    common.add_argument("-o", "--output", help="output file")

    ap = argparse.ArgumentParser(prog="postman", description=__doc__.split(
        "\n")[0])
    ap.add_argument("--version", action="version", version=__version__)
    sub = ap.add_subparsers(dest="command", required=True)

    s = sub.add_parser("solve-mcpp", parents=[common],
                       help="solve a mixed Chinese postman instance")
    s.add_argument("instance")
    s.add_argument("--mode", choices=("exact", "fpt", "naive"),
                   default="exact")
    s.add_argument("--arc-cap", type=_arc_cap, default="auto",
                   help="FPT pattern-size cap: integer, 'auto' (12) or 'none'")
    s.add_argument("--jobs", type=int, default=1)
    s.set_defaults(func=cmd_solve_mcpp)

    s = sub.add_parser("solve-pbs", parents=[common],
                       help="search a negative properly balanced subgraph")
    s.add_argument("instance")
    s.add_argument("--mode", choices=("brute", "fpt"), default="fpt")
    s.add_argument("--arc-cap", type=_arc_cap, default="auto")
    s.add_argument("--jobs", type=int, default=1)
    s.add_argument("--td", type=_td, default="auto",
                   help="tree-depth bound to use instead of computing it")
    s.add_argument("--no-strict", dest="strict", action="store_false",
                   help="skip the FPT weight-restriction check")
    s.set_defaults(func=cmd_solve_pbs)

    s = sub.add_parser("reduce", parents=[common],
                       help="apply a reduction; certificate goes to "
                            "<output>.cert.json")
    s.add_argument("reduction", choices=("clique-to-pbs", "pbs-to-mcpp"))
    s.add_argument("instance")
    s.add_argument("--expand-heavy", action="store_true",
                   help="replace heavy elements by unit paths")
    s.set_defaults(func=cmd_reduce)

    s = sub.add_parser("lift", parents=[common],
                       help="carry a solution across a reduction")
    s.add_argument("certificate")
    s.add_argument("solution", help="JSON with 'clique', 'arcs', "
                                    "'counts' or 'solution'")
    s.set_defaults(func=cmd_lift)

    s = sub.add_parser("verify", parents=[common],
                       help="check a solution certificate")
    s.add_argument("kind", choices=("mcpp", "pbs"))
    s.add_argument("instance")
    s.add_argument("solution")
    s.set_defaults(func=cmd_verify)

    s = sub.add_parser("params", parents=[common],
                       help="tree-depth and pathwidth of an instance")
    s.add_argument("instance")
    s.add_argument("--kind", choices=("mixed", "pbs"), default="mixed")
    s.add_argument("--td-cap", type=int, default=20)
    s.set_defaults(func=cmd_params)

    s = sub.add_parser("gen", parents=[common],
                       help="generate a random instance")
    s.add_argument("kind", choices=("mixed", "pbs", "colored"))
    s.add_argument("--seed", type=int, default=0)
    s.add_argument("--n", type=int, default=None,
                   help="vertices (default 6; 4 for --form reduction)")
    s.add_argument("--m", type=int, default=10)
    s.add_argument("--edge-prob", type=float, default=0.5)
    s.add_argument("--k", type=int, default=3)
    s.add_argument("--class-size", type=int, default=2)
    s.add_argument("--form", choices=("any", "restricted", "reduction"),
                   default="any", help="PBS weight form")
    s.add_argument("--zero-arcs", type=int, default=3)
    s.add_argument("--double-pairs", type=int, default=0)
    s.add_argument("--forbidden-pairs", type=int, default=0)
    s.set_defaults(func=cmd_gen)

    s = sub.add_parser("bench", parents=[common],
                       help="FPT solver against the exact oracle")
    s.add_argument("--seed", type=int, default=0)
    s.add_argument("--count", type=int, default=20)
    s.add_argument("--n", type=int, default=5)
    s.add_argument("--m", type=int, default=8)
    s.add_argument("--arc-cap", type=_arc_cap, default="auto")
    s.add_argument("--jobs", type=int, default=1)
    s.set_defaults(func=cmd_bench)
    return ap


def _configure_logging() -> None:
    level = os.environ.get("POSTMAN_LOG")
    if not level:
        return
    logging.basicConfig(level=getattr(logging, level.upper(), logging.DEBUG),
                        stream=sys.stderr,
                        format="%(levelname)s %(name)s: %(message)s")


def main(argv: list[str] | None = None) -> int:
    _configure_logging()
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code or 0)
    func: Callable[[Any], RunReport] = args.func
    t0 = time.perf_counter()
    try:
        rep = func(args)
    except InstanceError as exc:
        print(json.dumps({"command": args.command, "error": str(exc)},
                         sort_keys=True))
        return 1
    if args.timing:
        rep.wall_time = time.perf_counter() - t0
    if args.quiet:
        print(rep.summary)
    else:
        print(json.dumps(rep.to_json(), sort_keys=True))
    return 1 if rep.extra.get("failed") else 0


if __name__ == "__main__":
    sys.exit(main())
