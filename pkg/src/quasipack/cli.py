"""Command-line front end.

Exit codes: 0 success/holds, 1 violated/none, 2 undetermined/budget,
3 usage error, 4 I/O or format error.
"""

from __future__ import annotations

import argparse
import json
import sys
from fractions import Fraction
from pathlib import Path

from . import adapted, constructions, counting, discrepancy, hypercore, layouts, packing
from .errors import BudgetExceeded, CapExceeded, InvalidParameters, PackingFailure, ParseError

SCHEMA = "quasipack/1"
EXIT_OK, EXIT_NO, EXIT_UNDETERMINED, EXIT_USAGE, EXIT_IO = 0, 1, 2, 3, 4


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(EXIT_USAGE, f"{self.prog}: error: {message}\n")


def _rational(text: str) -> Fraction:
    try:
        return Fraction(text)
    except (ValueError, ZeroDivisionError):
        raise argparse.ArgumentTypeError(f"not a rational 'a/b': {text!r}") from None


def _read_text(path) -> str:
    try:
        return Path(path).read_text(encoding="ascii")
    except OSError as exc:
        raise OSError(f"{path}: {exc.strerror or exc}") from exc


def _write_text(path, text: str) -> None:
    try:
        with open(path, "w", encoding="ascii", newline="\n") as fh:
            fh.write(text)
    except OSError as exc:
        raise OSError(f"{path}: {exc.strerror or exc}") from exc


def _graph(path) -> hypercore.KGraph:
    return hypercore.parse(_read_text(path))


def _vertex_list(text: str) -> list[int]:
    try:
        return [int(t) for t in text.split(",") if t.strip()]
    except ValueError:
        raise UsageError(f"bad vertex list {text!r}") from None


def _assignments(items, what) -> list[tuple[int, str]]:
    out = []
    for item in items or ():
        left, sep, right = item.partition("=")
        if not sep:
            raise UsageError(f"{what} must look like 'fvertex=...', got {item!r}")
        try:
            out.append((int(left), right))
        except ValueError:
            raise UsageError(f"bad F-vertex in {item!r}") from None
    return out


def _need_seed(args):
    if args.seed is None:
        raise UsageError(f"'{args.command}' is randomized and needs --seed")


class Report:
    def __init__(self, command: str, as_json: bool):
        self.data: dict = {"schema": SCHEMA, "command": command}
        self.as_json = as_json
        self.lines: list[str] = []

    def add(self, key, value, text=None):
        self.data[key] = value
        if text is not False:
            self.lines.append(text if text is not None else f"{key}: {value}")

    def emit(self, out):
        if self.as_json:
            out.write(json.dumps(self.data, default=str, sort_keys=True) + "\n")
        else:
            for line in self.lines:
                out.write(line.rstrip("\n") + "\n")


# -- subcommands ----------------------------------------------------------------


def cmd_gen(args, rep: Report) -> int:
    c = args.construction
    if c != "complete":
        _need_seed(args)
    if c == "a":
        H, coloring = constructions.gen_A(args.k, args.n, args.seed)
        if args.coloring:
            _write_text(args.coloring, constructions.serialize_coloring(coloring))
            rep.add("coloring", args.coloring)
    elif c == "gnp":
        if args.p is None:
            raise UsageError("gnp needs --p")
        H = constructions.gen_gnp(args.k, args.n, args.p, args.seed)
    elif c == "prop19":
        H, x = constructions.gen_prop19(args.k, args.n, args.seed, p=args.p)
        rep.add("special_vertex", x)
    else:
        H = hypercore.complete(args.n, args.k)
    _write_text(args.out, hypercore.serialize(H))
    rep.add("out", args.out)
    rep.add("edges", len(H.edges))
    rep.add("generator", constructions.GENERATOR)
    return EXIT_OK


def cmd_check_disc(args, rep: Report) -> int:
    H = _graph(args.h)
    A = layouts.parse_antichain(args.i, H.k)
    params = discrepancy.DiscParams(args.p, args.mu, "two_sided" if args.mode == "two-sided" else "lower")
    seeds = []
    single = None
    if args.witness:
        coloring = constructions.parse_coloring(_read_text(args.witness))
        if coloring.k != H.k or coloring.n != H.n:
            raise UsageError("coloring does not match the graph")
        seeds.append(constructions.zero_color_layout(coloring))
    if args.layout:
        single = layouts.parse_layout(_read_text(args.layout))
        seeds.append(single)
    for L in seeds:
        if L.antichain != A:
            raise UsageError(f"witness layout lives on antichain {L.antichain}, not {A}")
    if args.exhaustive:
        try:
            verdict = discrepancy.exhaustive_check(H, A, params, cap=args.cap)
        except CapExceeded as exc:
            rep.add("error", str(exc))
            return EXIT_UNDETERMINED
    else:
        verdict = None
        for L in seeds:
            holds, margin = discrepancy.check_witness(H, L, params)
            if not holds:
                verdict = discrepancy.DiscVerdict(discrepancy.VIOLATED, margin, L)
                break
        if verdict is None and single is not None and not args.search:
            holds, margin = discrepancy.check_witness(H, single, params)
            rep.add("status", "holds", "status holds")
            rep.add("margin", f"{margin.numerator}/{margin.denominator}")
            return EXIT_OK
        if verdict is None:
            _need_seed(args)
            verdict = discrepancy.search_violation(
                H, A, params, budget=args.budget, seed=args.seed, initial=seeds
            )
    rep.add("status", verdict.status, f"status {verdict.status}")
    rep.add("margin", f"{verdict.margin.numerator}/{verdict.margin.denominator}",
            f"margin {verdict.margin.numerator}/{verdict.margin.denominator}")
    if verdict.violated:
        out = args.witness_out or f"{args.h}.witness.layout"
        _write_text(out, layouts.serialize_layout(verdict.witness))
        rep.add("witness_file", out)
        rep.add("cliques", layouts.count_cliques(verdict.witness))
        rep.add("intersect", layouts.intersect_count(H, verdict.witness))
        return EXIT_NO
    return EXIT_OK if verdict.status == discrepancy.SATISFIED else EXIT_UNDETERMINED


def cmd_check_adapted(args, rep: Report) -> int:
    F = _graph(args.f)
    A = layouts.parse_antichain(args.i, F.k)
    J = layouts.parse_antichain(args.j, F.k - 1) if args.j else None
    pins = _vertex_list(args.pins) if args.pins is not None else None
    if pins is not None and J is None and any(set(pins) & set(e) for e in F.edges):
        raise UsageError("--pins on edges of F needs --j")
    try:
        cert = adapted.find_certificate(F, A, J, pins, budget=args.budget, same_order=args.same_order)
    except BudgetExceeded as exc:
        rep.add("status", "budget-exceeded", f"status budget-exceeded ({exc})")
        return EXIT_UNDETERMINED
    if cert is None:
        rep.add("status", "none", "status none (proven)")
        return EXIT_NO
    assert adapted.verify_certificate(F, A, J, cert, same_order=args.same_order)
    text = adapted.serialize_certificate(cert)
    rep.add("status", "certified", "status certified")
    rep.add("certificate", text, text)
    if args.out:
        _write_text(args.out, text)
    return EXIT_OK


def _constraints(args, F, H) -> counting.EmbeddingConstraints:
    pins = [(w, int(y)) for w, y in _assignments(args.pin, "--pin")]
    targets = {w: frozenset(_vertex_list(vs)) for w, vs in _assignments(args.target, "--target")}
    return counting.EmbeddingConstraints(tuple(pins), targets)


def cmd_count(args, rep: Report) -> int:
    F, H = _graph(args.f), _graph(args.h)
    c = _constraints(args, F, H)
    total = counting.count_inj(F, H, c, method=args.method)
    rep.add("count", total)
    if args.gamma is not None:
        if args.alpha is None or args.p is None:
            raise UsageError("--gamma needs --alpha and --p")
        params = counting.EmbedBoundParams(args.alpha, args.p, args.gamma)
        bound = counting.embedding_bound(F, c, params, H.n)
        rep.add("bound", str(bound))
        rep.add("meets_bound", total >= bound)
        return EXIT_OK if total >= bound else EXIT_NO
    return EXIT_OK


def cmd_estimate(args, rep: Report) -> int:
    _need_seed(args)
    F, H = _graph(args.f), _graph(args.h)
    est = counting.estimate_density(F, H, args.samples, args.seed)
    rep.add("estimate", str(est.value))
    rep.add("estimate_float", float(est.value))
    rep.add("stderr", est.stderr)
    rep.add("samples", est.samples)
    rep.add("degenerate", est.degenerate)
    return EXIT_OK


def cmd_pack(args, rep: Report) -> int:
    H, F = _graph(args.h), _graph(args.f)
    try:
        if args.method == "exact":
            P = packing.exact_perfect_packing(H, F, args.budget)
            route = "exact"
        else:
            _need_seed(args)
            result = packing.absorb_pack(
                H, F, seed=args.seed, budget=args.budget, fallback_threshold=args.fallback_threshold
            )
            P, route = result.packing, result.route
            for key, val in result.diagnostics.items():
                rep.add(key, str(val))
    except BudgetExceeded as exc:
        rep.add("status", "budget-exceeded", f"status budget-exceeded ({exc})")
        return EXIT_UNDETERMINED
    except PackingFailure as exc:
        rep.add("status", f"failed-{exc.stage}", f"status failed at stage {exc.stage}: {exc}")
        return EXIT_UNDETERMINED if exc.stage != "divisibility" else EXIT_NO
    rep.add("route", route)
    if P is None:
        reason = "divisibility" if H.n % F.n else "proven-none"
        rep.add("status", "none", f"status none ({reason})")
        return EXIT_NO
    text = packing.serialize_packing(P)
    rep.add("status", "perfect", "status perfect")
    rep.add("packing", text, text)
    if args.out:
        _write_text(args.out, text)
    return EXIT_OK


def cmd_absorb(args, rep: Report) -> int:
    _need_seed(args)
    H, F = _graph(args.h), _graph(args.f)
    B = _vertex_list(args.b)
    found = packing.find_absorbers(H, F, B, budget=args.budget, seed=args.seed, special=args.special)
    rep.add("absorbers", [list(A) for A in found], False)
    for A in found:
        rep.lines.append(" ".join(map(str, A)))
    rep.add("count", len(found))
    return EXIT_OK if found else EXIT_NO


def cmd_grid(args, rep: Report) -> int:
    F = _graph(args.f)
    g = adapted.grid_graph(F, args.special)
    _write_text(args.out, hypercore.serialize(g.graph))
    rep.add("out", args.out)
    rep.add("vertices", g.graph.n)
    rep.add("edges", len(g.graph.edges))
    rep.add("zeroth_row", list(g.zeroth_row), "zeroth_row: " + " ".join(map(str, g.zeroth_row)))
    return EXIT_OK


def cmd_verify_construction(args, rep: Report) -> int:
    _need_seed(args)
    k, n = args.k, args.n
    p = Fraction(k - 1, k)
    ok = True
    rows = []
    for seed in range(args.seed, args.seed + args.seeds):
        if args.construction == "a":
            H, coloring = constructions.gen_A(k, n, seed)
            L = constructions.zero_color_layout(coloring)
            inter = layouts.intersect_count(H, L)
            holds, margin = discrepancy.check_witness(H, L, discrepancy.DiscParams(p, args.mu))
            links = [hypercore.link(H, x).graph.density() for x in range(n)]
            link_ok = all(abs(d - float(p)) <= 0.1 for d in links)
            row = {
                "seed": seed,
                "density": H.density(),
                "zero_intersect": inter,
                "zero_cliques": layouts.count_cliques(L),
                "violated": not holds,
                "links_within_0.1": link_ok,
            }
            ok &= inter == 0 and not holds and abs(H.density() - float(p)) <= 0.08 and link_ok
        else:
            H, x = constructions.gen_prop19(k, n, seed)
            lk = hypercore.link(H, x).graph
            expected, _ = constructions.gen_A(k - 1, n - 1, seed)
            row = {"seed": seed, "special": x, "link_matches": lk.edges == expected.edges}
            if k == 3:
                tri = sum(
                    1 for a, b in lk.edges for c in range(b + 1, lk.n)
                    if (a, c) in lk.edges and (b, c) in lk.edges
                )
                row["link_triangles"] = tri
                ok &= tri == 0
            ok &= row["link_matches"]
        rows.append(row)
        rep.lines.append(" ".join(f"{key}={val}" for key, val in row.items()))
    rep.add("seeds", rows, False)
    rep.add("ok", ok)
    return EXIT_OK if ok else EXIT_NO


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="quasipack", description=__doc__.splitlines()[0])
    parser.add_argument("--json", action="store_true", help="print one JSON object (schema quasipack/1)")
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)

    def common(sp):
        sp.add_argument("--json", action="store_true", default=argparse.SUPPRESS)
        return sp

    g = common(sub.add_parser("gen", help="generate a construction"))
    g.add_argument("--construction", choices=["a", "gnp", "prop19", "complete"], required=True)
    g.add_argument("--k", type=int, required=True)
    g.add_argument("--n", type=int, required=True)
    g.add_argument("--p", type=_rational)
    g.add_argument("--seed", type=int)
    g.add_argument("--out", required=True)
    g.add_argument("--coloring", help="also write the colouring (construction a)")
    g.set_defaults(func=cmd_gen)

    d = common(sub.add_parser("check-disc", help="check or falsify Disc(I, p, mu)"))
    d.add_argument("--h", required=True)
    d.add_argument("--i", required=True, help="antichain, e.g. '1,2|3'; 'e' is the empty set")
    d.add_argument("--p", type=_rational, required=True)
    d.add_argument("--mu", type=_rational, required=True)
    d.add_argument("--mode", choices=["lower", "two-sided"], default="lower")
    d.add_argument("--witness", help="colouring file; tries its zero-colour layout")
    d.add_argument("--layout", help="layout file to check")
    d.add_argument("--search", action="store_true", help="search even when --layout holds")
    d.add_argument("--exhaustive", action="store_true")
    d.add_argument("--cap", type=int, default=1 << 16)
    d.add_argument("--budget", type=int, default=2000)
    d.add_argument("--seed", type=int)
    d.add_argument("--witness-out")
    d.set_defaults(func=cmd_check_disc)

    a = common(sub.add_parser("check-adapted", help="find an adaptedness certificate"))
    a.add_argument("--f", required=True)
    a.add_argument("--i", required=True)
    a.add_argument("--j")
    a.add_argument("--pins", help="comma-separated pinned vertices (adapted-at mode)")
    a.add_argument("--same-order", action="store_true", help="(I,J) mode: one ordering for both parts")
    a.add_argument("--budget", type=int, default=1_000_000)
    a.add_argument("--out")
    a.set_defaults(func=cmd_check_adapted)

    c = common(sub.add_parser("count", help="count labeled copies inj[F -> H]"))
    c.add_argument("--f", required=True)
    c.add_argument("--h", required=True)
    c.add_argument("--pin", action="append", help="fvertex=hvertex")
    c.add_argument("--target", action="append", help="fvertex=v1,v2,...")
    c.add_argument("--method", choices=["auto", "backtrack", "tensor"], default="auto")
    c.add_argument("--alpha", type=_rational)
    c.add_argument("--p", type=_rational)
    c.add_argument("--gamma", type=_rational)
    c.set_defaults(func=cmd_count)

    e = common(sub.add_parser("estimate", help="Monte Carlo estimate of inj[F -> H]/n^f"))
    e.add_argument("--f", required=True)
    e.add_argument("--h", required=True)
    e.add_argument("--samples", type=int, default=100_000)
    e.add_argument("--seed", type=int)
    e.set_defaults(func=cmd_estimate)

    pk = common(sub.add_parser("pack", help="find a perfect F-packing"))
    pk.add_argument("--h", required=True)
    pk.add_argument("--f", required=True)
    pk.add_argument("--method", choices=["exact", "absorb"], default="exact")
    pk.add_argument("--budget", type=int, default=200_000)
    pk.add_argument("--fallback-threshold", type=int, default=16)
    pk.add_argument("--seed", type=int)
    pk.add_argument("--out")
    pk.set_defaults(func=cmd_pack)

    ab = common(sub.add_parser("absorb", help="grid-graph absorbers for a b-set"))
    ab.add_argument("--h", required=True)
    ab.add_argument("--f", required=True)
    ab.add_argument("--b", required=True, help="comma-separated vertices of B")
    ab.add_argument("--special", type=int, default=0)
    ab.add_argument("--budget", type=int, default=20_000)
    ab.add_argument("--seed", type=int)
    ab.set_defaults(func=cmd_absorb)

    gr = common(sub.add_parser("grid", help="build the grid graph F'"))
    gr.add_argument("--f", required=True)
    gr.add_argument("--special", type=int, default=0)
    gr.add_argument("--out", required=True)
    gr.set_defaults(func=cmd_grid)

    v = common(sub.add_parser("verify-construction", help="run the construction checks over seeds"))
    v.add_argument("--construction", choices=["a", "prop19"], default="a")
    v.add_argument("--k", type=int, default=3)
    v.add_argument("--n", type=int, default=40)
    v.add_argument("--seeds", type=int, default=5)
    v.add_argument("--seed", type=int)
    v.add_argument("--mu", type=_rational, default=Fraction(1, 1000))
    v.set_defaults(func=cmd_verify_construction)
    return parser


def run(argv=None, out=None, err=None) -> int:
    out = out or sys.stdout
    err = err or sys.stderr
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code) if exc.code is not None else EXIT_OK
    rep = Report(args.command, getattr(args, "json", False))
    try:
        code = args.func(args, rep)
    except UsageError as exc:
        parser.print_usage(err)
        err.write(f"quasipack {args.command}: error: {exc}\n")
        return EXIT_USAGE
    except InvalidParameters as exc:
        err.write(f"quasipack {args.command}: error: {exc}\n")
        return EXIT_USAGE if not isinstance(exc, ParseError) else EXIT_IO
    except (OSError, ParseError) as exc:
        err.write(f"quasipack {args.command}: error: {exc}\n")
        return EXIT_IO
    rep.data["exit"] = code
    rep.emit(out)
    return code


def main() -> None:
    sys.exit(run())


if __name__ == "__main__":
    main()
