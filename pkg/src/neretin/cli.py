"""Command line entry point.

Exit codes: 0 success, 1 suite failure, 2 resource cap, 3 undecided,
64 usage error, 65 unparsable input.
"""

from __future__ import annotations

import argparse
import json
import sys
from pathlib import Path

from . import __version__

EXIT_OK, EXIT_FAIL, EXIT_CAP, EXIT_UNDECIDED, EXIT_USAGE, EXIT_PARSE = 0, 1, 2, 3, 64, 65

CONVENTIONS = {
    "planar_order": "lexicographic order on child-index tuples",
    "addresses": "digit strings (base 36, root is the empty string; dotted decimals when an arity exceeds 36)",
    "permutations": "image lists, position i maps to perm[i], 0-based",
}


class UsageError(Exception):
    pass


class Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        print(f"{self.prog}: error: {message}", file=sys.stderr)
        raise SystemExit(EXIT_USAGE)


def _dump(obj) -> str:
    return json.dumps(obj, indent=2, sort_keys=True) + "\n"


def _emit(args, report: dict) -> None:
    report = dict(report)
    report.setdefault("conventions", CONVENTIONS)
    report["version"] = __version__
    if getattr(args, "seed", None) is not None:
        report["seed"] = args.seed
    text = _dump(report)
    if getattr(args, "out", None):
        Path(args.out).write_text(text)
    else:
        sys.stdout.write(text)


def _read_json(path: str):
    from .errors import ParseError

    try:
        text = sys.stdin.read() if path == "-" else Path(path).read_text()
    except OSError as exc:
        raise ParseError(str(exc)) from exc
    try:
        return json.loads(text)
    except json.JSONDecodeError as exc:
        raise ParseError(f"invalid JSON: {exc}") from exc


def _require(cond: bool, message: str) -> None:
    if not cond:
        raise UsageError(message)


# subcommands

def cmd_explore(args) -> int:
    from .cube import ball, base_vertex
    from .errors import CapExceeded

    _require(args.d >= 2, "d must be at least 2")
    _require(0 <= args.radius <= 6, "radius must be between 0 and 6")
    _require(args.cap > 0, "cap must be positive")
    try:
        b = ball(base_vertex(args.d), args.radius, cap=args.cap, max_height=args.max_height)
    except CapExceeded as exc:
        print(f"cap exceeded: {exc}", file=sys.stderr)
        return EXIT_CAP
    data = b.to_json()
    data.update({"d": args.d, "radius": args.radius, "center": "[root star, id]", "connected": b.is_connected()})
    if args.out:
        out = Path(args.out)
        out.mkdir(parents=True, exist_ok=True)
        if args.format in ("json", "both"):
            (out / "ball.json").write_text(_dump({**data, "conventions": CONVENTIONS, "version": __version__}))
        if args.format in ("dot", "both"):
            (out / "ball.dot").write_text(b.to_dot())
        print(f"{len(b.vertices)} vertices, {len(b.edges)} edges written to {out}")
    elif args.format == "dot":
        sys.stdout.write(b.to_dot())
    else:
        _emit(args, data)
    return EXIT_OK


def cmd_link(args) -> int:
    from .cube import CubeVertex, descending_link
    from .errors import InfeasibleLeafCount
    from .simplicial import complexes_isomorphic, interval_complex, map_is_isomorphism
    from .trees import special_tree

    _require(args.d >= 2, "d must be at least 2")
    _require(1 <= args.h <= 9, "h must be between 1 and 9")
    try:
        x = CubeVertex(special_tree(args.h, args.d))
    except InfeasibleLeafCount as exc:
        print(f"infeasible leaf count: {exc}", file=sys.stderr)
        return EXIT_USAGE
    L = descending_link(x)
    model = interval_complex(args.d, args.h)
    explicit = map_is_isomorphism(L.complex, model, L.phi)
    graph_iso = complexes_isomorphic(L.complex, model)
    ok = explicit and graph_iso
    _emit(args, {
        "d": args.d,
        "h": args.h,
        "descending_link_f_vector": list(L.complex.f_vector()),
        "interval_complex_f_vector": list(model.f_vector()),
        "explicit_isomorphism": explicit,
        "graph_isomorphic": graph_iso,
        "verdict": "PASS" if ok else "FAIL",
    })
    return EXIT_OK if ok else EXIT_FAIL


def cmd_ipq(args) -> int:
    from .errors import SizeExceeded
    from .simplicial import connected_components, homology, interval_complex, is_flag

    _require(args.p >= 1 and args.q >= 0, "need p >= 1 and q >= 0")
    K = interval_complex(args.p, args.q)
    report = {
        "p": args.p,
        "q": args.q,
        "f_vector": list(K.f_vector()),
        "components": connected_components(K),
        "flag": is_flag(K)[0],
    }
    if args.homology_dim is not None:
        try:
            h = homology(K, max_dim=args.homology_dim)
        except SizeExceeded as exc:
            print(f"size exceeded: {exc}", file=sys.stderr)
            return EXIT_CAP
        report["betti"] = h.betti
        report["torsion"] = h.torsion
    if args.format == "complex":
        report["complex"] = K.to_json()
    _emit(args, report)
    return EXIT_OK


def _load_element(path: str):
    from .aaut import AlmostAutomorphism

    return AlmostAutomorphism.from_json(_read_json(path))


def cmd_classify(args) -> int:
    from .aaut import classify
    from .errors import BudgetExceeded

    g = _load_element(args.file)
    _require(args.budget > 0, "budget must be positive")
    try:
        result = classify(g, args.budget)
    except BudgetExceeded as exc:
        _emit(args, {"kind": "BudgetExceeded", "budget": args.budget, "message": str(exc)})
        return EXIT_UNDECIDED
    _emit(args, {**result.to_json(), "budget": args.budget})
    return EXIT_OK


def cmd_parity(args) -> int:
    from .aaut import parity, parity_of_representative
    from .errors import ParityUndefined

    g = _load_element(args.file)
    report = {"d": g.d, "rootArity": g.root_arity,
              "representative_parity": parity_of_representative(g, g.domain)}
    try:
        report["parity"] = parity(g)
    except ParityUndefined as exc:
        report["parity"] = None
        report["undefined_because"] = str(exc)
    _emit(args, report)
    return EXIT_OK


def cmd_fixpoint(args) -> int:
    from .errors import NotMedian
    from .median import Action, MedianGraph, fixed_region

    data = _read_json(args.graph)
    try:
        G = MedianGraph.from_json(data)
    except NotMedian as exc:
        _emit(args, {"valid": False, "violating_triple": list(exc.triple), "message": str(exc)})
        return EXIT_PARSE
    except (KeyError, TypeError, ValueError) as exc:
        from .errors import ParseError

        raise ParseError(f"bad graph JSON: {exc}") from exc
    action = Action.from_json(G, _read_json(args.action)) if args.action else Action(G, [])
    report = fixed_region(G, action)
    _emit(args, {"valid": True, "vertices": G.n, "hyperplanes": len(G.hyperplanes), **report.to_json()})
    return EXIT_OK


def _parse_matrix(F, text: str):
    parts = text.replace(",", " ").split()
    _require(len(parts) == 9, "a matrix needs 9 field-element literals")
    vals = [F.parse(p) for p in parts]
    return [vals[0:3], vals[3:6], vals[6:9]]


def cmd_cremona(args) -> int:
    from . import perm as Pm
    from .cremona.fields import GF, MODULI
    from .cremona.parity import element_parity, parity_suite, pgl2_parity_census
    from .cremona.projective import Linear, QuadraticStd, enumerate_points, induced_permutation

    _require(args.q in MODULI, f"q must be one of {sorted(MODULI)}")
    F = GF(args.q)
    conventions = {**CONVENTIONS, "field": F.name, "modulus": F.modulus_string(),
                   "points": "normalized so the first nonzero coordinate is 1, sorted lexicographically"}
    if args.mode == "census":
        report = pgl2_parity_census(args.q)
    elif args.mode == "suite":
        _require(args.q in (2, 3, 4), "the parity suite supports q in {2, 3, 4}")
        report = parity_suite(args.q, seed=args.seed if args.seed is not None else 0)
    elif args.mode == "points":
        report = {"q": args.q, "P1": [list(p) for p in enumerate_points(F, 1)],
                  "P2": [list(p) for p in enumerate_points(F, 2)]}
    elif args.mode == "std":
        report = element_parity(QuadraticStd(F), F)
    else:
        _require(args.matrix is not None, "--matrix is required for mode matrix")
        try:
            m = Linear(F, _parse_matrix(F, args.matrix))
        except ValueError as exc:
            raise UsageError(str(exc)) from exc
        perm = induced_permutation(m, F)
        report = {"matrix": [list(r) for r in m.matrix], "perm": list(perm), "sign": Pm.sign(perm),
                  "order": Pm.order(perm)}
        if args.q % 2 == 0:
            report["element"] = element_parity(m, F)
    _emit(args, {**report, "conventions": conventions})
    return EXIT_OK


def cmd_verify(args) -> int:
    from .acceptance import SUITES, run_suite

    _require(args.suite in SUITES, f"unknown suite {args.suite!r}; choose from {sorted(SUITES)}")
    seed = args.seed if args.seed is not None else 42
    results = run_suite(args.suite, seed)
    for r in results:
        print(r.line(), file=sys.stderr)
    verdict = "PASS" if all(r.passed for r in results) else "FAIL"
    args.seed = seed
    _emit(args, {"suite": args.suite, "verdict": verdict, "criteria": [r.to_json() for r in results]})
    return EXIT_OK if verdict == "PASS" else EXIT_FAIL


def build_parser() -> Parser:
    parser = Parser(prog="neretin", description="Almost automorphisms of trees, cube complexes and parities.")
    parser.add_argument("--version", action="version", version=__version__)
    sub = parser.add_subparsers(dest="command", parser_class=Parser)
    sub.required = True

    def common(p, seed=True):
        p.add_argument("--out", help="write the report to this path")
        if seed:
            p.add_argument("--seed", type=int, default=None)

    p = sub.add_parser("explore", help="ball around the base vertex of the cube complex")
    p.add_argument("--d", type=int, default=2)
    p.add_argument("--radius", type=int, default=2)
    p.add_argument("--cap", type=int, default=100_000)
    p.add_argument("--max-height", type=int, default=None)
    p.add_argument("--format", choices=("json", "dot", "both"), default="json")
    common(p)
    p.set_defaults(func=cmd_explore)

    p = sub.add_parser("link", help="descending link against the interval complex")
    p.add_argument("--d", type=int, default=2)
    p.add_argument("--h", type=int, required=True)
    common(p)
    p.set_defaults(func=cmd_link)

    p = sub.add_parser("ipq", help="interval complex I(p,q)")
    p.add_argument("--p", type=int, default=2)
    p.add_argument("--q", type=int, required=True)
    p.add_argument("--homology-dim", type=int, default=None)
    p.add_argument("--format", choices=("json", "complex"), default="json")
    common(p)
    p.set_defaults(func=cmd_ipq)

    p = sub.add_parser("classify", help="elliptic or translation, with witness")
    p.add_argument("file", help="element JSON, or - for stdin")
    p.add_argument("--budget", type=int, default=64)
    common(p)
    p.set_defaults(func=cmd_classify)

    p = sub.add_parser("parity", help="parity of an element")
    p.add_argument("file")
    common(p)
    p.set_defaults(func=cmd_parity)

    p = sub.add_parser("fixpoint", help="invariant cube of a median graph action")
    p.add_argument("graph")
    p.add_argument("--action", default=None)
    common(p)
    p.set_defaults(func=cmd_fixpoint)

    p = sub.add_parser("cremona", help="plane maps over small fields")
    p.add_argument("--q", type=int, default=4)
    p.add_argument("--mode", choices=("census", "suite", "points", "std", "matrix"), default="census")
    p.add_argument("--matrix", default=None, help='nine field literals, e.g. "1 0 0 0 01 0 0 0 1"')
    common(p)
    p.set_defaults(func=cmd_cremona)

    p = sub.add_parser("verify", help="run an acceptance suite")
    p.add_argument("suite")
    common(p)
    p.set_defaults(func=cmd_verify)
    return parser


def main(argv=None) -> int:
    from .errors import ParseError

    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except UsageError as exc:
        print(f"usage error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except ParseError as exc:
        print(f"parse error: {exc}", file=sys.stderr)
        return EXIT_PARSE


if __name__ == "__main__":  # pragma: no cover
    sys.exit(main())
