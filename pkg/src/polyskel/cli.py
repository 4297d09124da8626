"""Command-line interface.

Exit codes: 0 success, 1 domain or input error, 2 indeterminate result,
64 usage error.
"""
from __future__ import annotations

import argparse
import json
import logging
import os
import sys
from pathlib import Path

import numpy as np

from . import families, oracles
from .core import (NON_EDGE, read_vertices, skeleton_json, write_skeleton,
                   write_vertices, make_ledger)
from .edgecheck import METHODS, SkeletonConfig, compute_skeleton, exact_edge_test, verify_pair
from .errors import DomainError, IndeterminateError, ParseError, PolyskelError
from .faces import find_chordal_witnesses, is_chordal, restrict_face
from .families import UGraph, chordal_imset, read_graph
from .rhombus import rhombus_scan

EXIT_OK = 0
EXIT_DOMAIN = 1
EXIT_INDETERMINATE = 2
EXIT_USAGE = 64

log = logging.getLogger("polyskel")


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise UsageError(f"{self.prog}: {message}")


def _open_out(path):
    if path in (None, "-"):
        return sys.stdout, False
    return open(path, "w", encoding="utf-8"), True


def _emit_json(obj, path=None) -> None:
    fh, own = _open_out(path)
    try:
        json.dump(obj, fh, indent=None if own else 2, sort_keys=False)
        fh.write("\n")
    finally:
        if own:
            fh.close()


def _graph_json(g) -> dict:
    if isinstance(g, families.Dag):
        return {"n": g.n, "arcs": [list(a) for a in sorted(g.arcs)]}
    return {"n": g.n, "edges": [list(e) for e in sorted(g.edges)]}


def _default_threads() -> int:
    return max(1, os.cpu_count() or 1)


def _parse_edges(text: str, n: int) -> UGraph:
    edges = []
    for part in filter(None, (p.strip() for p in text.split(","))):
        u, _, v = part.partition("-")
        try:
            edges.append((int(u), int(v)))
        except ValueError:
            raise DomainError(f"cannot parse edge {part!r}; use 'u-v'") from None
    return UGraph(n, frozenset(edges))


def _parse_ints(text: str) -> tuple[int, ...]:
    try:
        return tuple(int(x) for x in text.split(",") if x.strip() != "")
    except ValueError:
        raise DomainError(f"cannot parse integer list {text!r}") from None


# ---------------------------------------------------------------------------
# subcommands


def cmd_gen(args) -> int:
    graph = read_graph(args.graph) if args.graph else None
    vs = families.generate(args.family, n=args.n, m=args.m, k=args.k, graph=graph)
    fh, own = _open_out(args.output)
    try:
        write_vertices(vs, fh)
    finally:
        if own:
            fh.close()
    return EXIT_OK


def cmd_skeleton(args) -> int:
    vs = read_vertices(args.input)
    cfg = SkeletonConfig(method=args.method, threads=args.threads, seed=args.seed,
                         max_iter=args.max_iter)
    led = compute_skeleton(vs, cfg)
    out = skeleton_json(vs, led.edges())
    counts = led.counts()
    out["pairs"] = len(led)
    out["unknown"] = counts["unknown"]
    _emit_json(out, args.output)
    if args.ledger:
        led.write_csv(args.ledger)
    if counts["unknown"]:
        log.warning("%d pairs could not be verified numerically", counts["unknown"])
        return EXIT_INDETERMINATE
    return EXIT_OK


def cmd_rhombus(args) -> int:
    vs = read_vertices(args.input)
    led = rhombus_scan(make_ledger(vs, with_keys=True), vs)
    report = {"pairs": len(led), "marked_nonedge": int(np.count_nonzero(led.status == NON_EDGE)),
              "groups": led.n_groups}
    _emit_json(report, args.output)
    if args.ledger:
        led.write_csv(args.ledger)
    return EXIT_OK


def _certificate_json(verdict) -> object:
    cert = verdict.certificate
    if cert is None:
        return None
    if isinstance(cert, tuple):
        return {"cost": list(cert)}
    return {"weights": {str(i): str(w) for i, w in sorted(cert.weights.items())},
            "t": str(cert.t)}


def cmd_verify(args) -> int:
    vs = read_vertices(args.input)
    a, b = args.pair
    verdict = verify_pair(vs, a, b, method=args.method, seed=args.seed, max_iter=args.max_iter)
    status = {1: "edge", -1: "non-edge", 0: "indeterminate"}[verdict.status.code]
    _emit_json({"pair": [a, b], "verdict": status, "certificate": _certificate_json(verdict)},
               args.output)
    return EXIT_INDETERMINATE if verdict.status.code == 0 else EXIT_OK


def cmd_chordal_witness(args) -> int:
    g, h = read_graph(args.g), read_graph(args.h)
    if not isinstance(g, UGraph) or not isinstance(h, UGraph):
        raise DomainError("chordal-witness needs undirected graphs")
    if g.n != h.n:
        raise DomainError("graphs on different node counts")
    try:
        wit = find_chordal_witnesses(g, h, cap=args.cap)
    except IndeterminateError as exc:
        _emit_json({"verdict": "indeterminate", "reason": str(exc)}, args.output)
        return EXIT_INDETERMINATE
    if wit is not None:
        _emit_json({"verdict": "witnesses", "witnesses": [_graph_json(w) for w in wit]},
                   args.output)
        return EXIT_OK
    # no witnesses: decide exactly on the face of the chordal graph polytope
    if g.n > 6:
        _emit_json({"verdict": "indeterminate",
                    "reason": "no witnesses; exact check limited to n <= 6"}, args.output)
        return EXIT_INDETERMINATE
    vs = families.enum_cgp_vertices(g.n)
    ia, ib = vs.index_of(chordal_imset(g)), vs.index_of(chordal_imset(h))
    face = restrict_face(vs, ia, ib)
    sub = vs.subset(face)
    verdict = exact_edge_test(sub, int(np.searchsorted(face, ia)), int(np.searchsorted(face, ib)))
    if verdict.is_edge:
        _emit_json({"verdict": "edge"}, args.output)
        return EXIT_OK
    _emit_json({"verdict": "indeterminate",
                "reason": "non-edge without witnesses among chordal graphs"}, args.output)
    return EXIT_INDETERMINATE


def _oracle_result(name: str, args) -> dict:
    if name == "spanning-tree":
        t1, t2 = _parse_edges(args.t1, args.n), _parse_edges(args.t2, args.n)
        edge = oracles.spanning_tree_edge(t1, t2)
        wit = None if edge else [_graph_json(w) for w in oracles.spanning_tree_witnesses(t1, t2)]
    elif name == "birkhoff":
        s, w = _parse_ints(args.sigma), _parse_ints(args.omega)
        edge = oracles.birkhoff_edge(s, w)
        wit = None if edge else [list(p) for p in oracles.birkhoff_witnesses(s, w)]
    elif name == "k-assignment":
        def matching(text):
            pairs = [_parse_ints(p.replace("-", ",")) for p in text.split(";") if p.strip()]
            return families.Matching(args.m, args.n, frozenset(tuple(p) for p in pairs))
        m1, m2 = matching(args.m1), matching(args.m2)
        edge = oracles.k_assignment_edge(m1, m2)
        wit = None if edge else [sorted(map(list, w.pairs))
                                 for w in oracles.k_assignment_witnesses(m1, m2)]
    elif name == "stab":
        g = read_graph(args.graph) if args.graph else _parse_edges(args.edges or "", args.n)
        a, b = _parse_ints(args.a), _parse_ints(args.b)
        edge = oracles.stab_edge(g, a, b)
        wit = None if edge else [sorted(s) for s in oracles.stab_witnesses(g, a, b)]
    elif name == "cimtree":
        g, h = read_graph(args.g), read_graph(args.h)
        if not isinstance(g, families.Dag) or not isinstance(h, families.Dag):
            raise DomainError("cimtree needs two DAG files")
        edge = oracles.cimtree_neighbor_test(g, h)
        tri = None if edge else oracles.cimtree_triangle_witnesses(g, h)
        wit = None if tri is None else [_graph_json(d) for d in tri]
    else:  # pragma: no cover - argparse restricts the choices
        raise DomainError(f"unknown oracle {name!r}")
    out = {"oracle": name, "verdict": "edge" if edge else "non-edge"}
    if wit is not None:
        out["witnesses"] = wit
    return out


def cmd_oracle(args) -> int:
    _emit_json(_oracle_result(args.oracle, args), args.output)
    return EXIT_OK


def cmd_audit(args) -> int:
    from . import reports

    if args.audit == "rhombus":
        graph = read_graph(args.graph) if args.graph else None
        vs = families.generate(args.family, n=args.n, m=args.m, k=args.k, graph=graph)
        rep = reports.audit_rhombus(vs, seed=args.seed)
        fh, own = _open_out(args.output)
        try:
            fh.write(f"instance: {vs.family_tag}\n")
            fh.write(f"vertices: {len(vs)}\n")
            fh.write(f"fulfills: {'true' if rep.fulfills else 'false'}\n")
            fh.write(f"pairs: {rep.pairs}\n")
            fh.write(f"pairs with witnesses: {rep.with_witness}\n")
            fh.write(f"violations: {json.dumps([list(p) for p in rep.violations])}\n")
        finally:
            if own:
                fh.close()
        return EXIT_OK
    rows = reports.timing_report(args.families, args.sizes, repeats=args.repeats,
                                 config=SkeletonConfig(threads=args.threads, seed=args.seed))
    fh, own = _open_out(args.output)
    try:
        if args.json:
            json.dump([r.as_dict() for r in rows], fh, indent=2)
            fh.write("\n")
        else:
            fh.write(reports.format_table(rows) + "\n")
    finally:
        if own:
            fh.close()
    return EXIT_OK


# ---------------------------------------------------------------------------


def build_parser() -> argparse.ArgumentParser:
    p = _Parser(prog="polyskel", description="Edge skeletons of 0/1-polytopes.")
    p.add_argument("-v", "--verbose", action="store_true", help="log progress to stderr")
    sub = p.add_subparsers(dest="command", parser_class=_Parser)
    sub.required = True

    g = sub.add_parser("gen", help="write the vertices of a polytope family")
    g.add_argument("family", choices=families.FAMILIES)
    g.add_argument("--n", type=int)
    g.add_argument("--m", type=int)
    g.add_argument("--k", type=int)
    g.add_argument("--graph", help="graph file (stab)")
    g.add_argument("-o", "--output")
    g.set_defaults(func=cmd_gen)

    s = sub.add_parser("skeleton", help="compute all edges of conv(V)")
    s.add_argument("-i", "--input", required=True)
    s.add_argument("--method", choices=METHODS, default="pipeline")
    s.add_argument("--threads", type=int, default=_default_threads())
    s.add_argument("--seed", type=int, default=0)
    s.add_argument("--max-iter", type=int, default=100)
    s.add_argument("-o", "--output")
    s.add_argument("--ledger", help="also write the pair ledger as CSV")
    s.set_defaults(func=cmd_skeleton)

    r = sub.add_parser("rhombus", help="mark pairs with witnesses as non-edges")
    r.add_argument("-i", "--input", required=True)
    r.add_argument("-o", "--output")
    r.add_argument("--ledger")
    r.set_defaults(func=cmd_rhombus)

    v = sub.add_parser("verify", help="decide a single pair")
    v.add_argument("-i", "--input", required=True)
    v.add_argument("--pair", nargs=2, type=int, required=True, metavar=("A", "B"))
    v.add_argument("--method", choices=METHODS, default="pipeline")
    v.add_argument("--seed", type=int, default=0)
    v.add_argument("--max-iter", type=int, default=100)
    v.add_argument("-o", "--output")
    v.set_defaults(func=cmd_verify)

    c = sub.add_parser("chordal-witness", help="witness search for two chordal graphs")
    c.add_argument("--g", required=True)
    c.add_argument("--h", required=True)
    c.add_argument("--cap", type=int, default=20)
    c.add_argument("-o", "--output")
    c.set_defaults(func=cmd_chordal_witness)

    o = sub.add_parser("oracle", help="closed-form adjacency tests")
    o.add_argument("oracle", choices=oracles.ORACLES)
    o.add_argument("--n", type=int)
    o.add_argument("--m", type=int)
    o.add_argument("--t1", help="tree edges, e.g. 0-1,1-2")
    o.add_argument("--t2")
    o.add_argument("--sigma", help="permutation images, e.g. 1,0,2")
    o.add_argument("--omega")
    o.add_argument("--m1", help="matching cells, e.g. 0-0;1-1")
    o.add_argument("--m2")
    o.add_argument("--graph", help="graph file (stab)")
    o.add_argument("--edges", help="graph edges (stab), e.g. 0-1,1-2")
    o.add_argument("--a", help="stable set, e.g. 0,2")
    o.add_argument("--b")
    o.add_argument("--g", help="DAG file (cimtree, v-structure free)")
    o.add_argument("--h", help="DAG file (cimtree)")
    o.add_argument("-o", "--output")
    o.set_defaults(func=cmd_oracle)

    a = sub.add_parser("audit", help="fulfillment audits and timing tables")
    a.add_argument("audit", choices=("rhombus", "timing"))
    a.add_argument("--family", default="cgp", choices=families.FAMILIES)
    a.add_argument("--n", type=int)
    a.add_argument("--m", type=int)
    a.add_argument("--k", type=int)
    a.add_argument("--graph")
    a.add_argument("--families", nargs="+", default=["birkhoff"])
    a.add_argument("--sizes", nargs="+", type=int, default=[4, 5])
    a.add_argument("--repeats", type=int, default=1)
    a.add_argument("--threads", type=int, default=_default_threads())
    a.add_argument("--seed", type=int, default=0)
    a.add_argument("--json", action="store_true")
    a.add_argument("-o", "--output")
    a.set_defaults(func=cmd_audit)
    return p


def run(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except UsageError as exc:
        print(str(exc), file=sys.stderr)
        parser.print_usage(sys.stderr)
        return EXIT_USAGE
    except SystemExit as exc:  # --help
        return int(exc.code or 0)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING,
                        format="%(levelname)s %(name)s: %(message)s")
    try:
        return args.func(args)
    except IndeterminateError as exc:
        print(f"indeterminate: {exc}", file=sys.stderr)
        return EXIT_INDETERMINATE
    except (DomainError, ParseError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_DOMAIN
    except PolyskelError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_DOMAIN


def main() -> None:
    sys.exit(run())


if __name__ == "__main__":
    main()
