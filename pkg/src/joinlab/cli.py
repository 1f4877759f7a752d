"""joinlab command-line front end.

Exit codes: 0 affirmative, 3 negative finding, 1 input error, 2 resource cap.
"""

from __future__ import annotations

import argparse
import sys
from fractions import Fraction
from typing import Sequence

from . import asymptotics as asy
from . import formats
from .core import FiniteSystem, format_rational
from .errors import CapExceeded, HypothesisFailed, JoinlabError
from .independence import (
    FiniteAbelianGroup,
    TripleLaw,
    check_pairwise_independent,
    find_functional_relation,
    haar_oracle,
    identically_distributed,
    support_growth,
    uniform_law_oracle,
    xor_triple,
)
from .joinings import (
    DIMENSION_CAP,
    Coupling,
    detect_graph_structure,
    enumerate_vertices,
    ergodic_decomposition,
    is_disjoint,
    is_ergodic_joining,
    joining_metric,
    joining_polytope,
    product_joining,
)
from .relative import FACTOR_CAP, enumerate_factors, rel_indep_joining

EXIT_OK, EXIT_INPUT, EXIT_CAP, EXIT_NEGATIVE = 0, 1, 2, 3


class Report:
    """Collects text lines and a JSON document; prints exactly one of them."""

    def __init__(self, command: str):
        self.lines: list[str] = []
        self.doc: dict = {"command": command}

    def line(self, text: str = "") -> None:
        self.lines.append(text)

    def emit(self, as_json: bool, out=None) -> None:
        out = out or sys.stdout
        if as_json:
            out.write(formats.dumps(self.doc) + "\n")
        else:
            out.write("\n".join(self.lines) + "\n")


def fmt(value) -> str:
    if isinstance(value, Fraction):
        return format_rational(value)
    if isinstance(value, float):
        return repr(value)
    return str(value)


def matrix_lines(weights, indent: str = "  ") -> list[str]:
    cells = [[fmt(v) for v in row] for row in weights]
    width = max(len(c) for row in cells for c in row)
    return [indent + "  ".join(c.rjust(width) for c in row) for row in cells]


def component_name(coupling_left: FiniteSystem, coupling_right: FiniteSystem, comp) -> str:
    as_coupling = comp.as_coupling()
    if as_coupling is not None:
        structure = detect_graph_structure(as_coupling)
        if structure.kind != "none":
            if coupling_left == coupling_right:
                for n in range(coupling_left.period()):
                    if coupling_left.power(n) == structure.mapping:
                        return {0: "Δ_Id", 1: "Δ_T"}.get(n, f"Δ_T^{n}")
            return "Δ[" + ",".join(map(str, structure.mapping)) + "]"
    x, y = comp.orbit[0]
    return f"orbit({x},{y})"


# -- subcommands --------------------------------------------------------------

def cmd_disjoint(args, report: Report) -> int:
    left = formats.load_finite(args.left, prune=args.prune_zero)
    right = formats.load_finite(args.right, prune=args.prune_zero)
    disjoint = is_disjoint(left, right, cap=args.cap)
    report.doc["disjoint"] = disjoint
    if disjoint:
        report.line("disjoint")
        return EXIT_OK
    product = product_joining(left, right)
    witness = next(v for v in enumerate_vertices(joining_polytope(left, right), cap=args.cap)
                   if v != product)
    report.line("not disjoint")
    report.line("witness (non-product vertex):")
    report.lines.extend(matrix_lines(witness.weights))
    report.doc["witness"] = witness.to_json()
    return EXIT_NEGATIVE


def _coupling_arg(text: str, left, right) -> Coupling:
    if text == "product":
        return product_joining(left, right)
    coupling = formats.load_coupling(text, prune=False)
    if coupling.left != left or coupling.right != right:
        raise formats.FormatError("coupling file systems differ from LEFT/RIGHT")
    return coupling


def cmd_joinings(args, report: Report) -> int:
    left = formats.load_finite(args.left, prune=args.prune_zero)
    right = formats.load_finite(args.right, prune=args.prune_zero)
    if args.decompose is not None:
        coupling = _coupling_arg(args.decompose, left, right)
        dec = ergodic_decomposition(coupling)
        terms = [(fmt(c.weight), component_name(left, right, c)) for c in dec.components]
        report.line(" + ".join(f"{w} · {name}" for w, name in terms))
        report.doc["decomposition"] = [
            {"weight": w, "name": name, "orbit": [list(cell) for cell in c.orbit]}
            for (w, name), c in zip(terms, dec.components)
        ]
        return EXIT_OK
    if args.metric is not None:
        a = _coupling_arg(args.metric[0], left, right)
        b = _coupling_arg(args.metric[1], left, right)
        d = joining_metric(a, b)
        report.line(fmt(d))
        report.doc["metric"] = fmt(d)
        return EXIT_OK
    vertices = enumerate_vertices(joining_polytope(left, right), cap=args.cap)
    report.line(f"{len(vertices)} vertices")
    report.doc["vertices"] = []
    for k, v in enumerate(vertices):
        ergodic = is_ergodic_joining(v)
        report.line(f"vertex {k}{' (ergodic)' if ergodic else ''}:")
        report.lines.extend(matrix_lines(v.weights))
        report.doc["vertices"].append({**v.to_json(), "ergodic": ergodic})
    return EXIT_OK


def cmd_relative(args, report: Report) -> int:
    left = formats.load_finite(args.left, prune=args.prune_zero)
    right = formats.load_finite(args.right, prune=args.prune_zero)
    pair = formats.load_factor_pair(args.factor_pair, left, right)
    joining = rel_indep_joining(pair)
    differs = joining != product_joining(left, right)
    report.line(f"relatively independent joining over a {pair.target.size}-point factor:")
    report.lines.extend(matrix_lines(joining.weights))
    if pair.is_trivial():
        report.line("trivial factor: equals the product joining")
    elif differs:
        report.line("differs from product: non-disjointness witness")
    else:
        report.line("equals the product joining")
    report.doc.update(joining=joining.to_json(), differs_from_product=differs,
                      trivial_factor=pair.is_trivial())
    return EXIT_OK


def cmd_factors(args, report: Report) -> int:
    system = formats.load_finite(args.system, prune=args.prune_zero)
    factors = enumerate_factors(system, cap=args.factor_cap)
    report.line(f"{len(factors)} factors")
    report.doc["factors"] = []
    for f in factors:
        tag = "itself" if f.target.size == system.size else ("trivial" if f.target.size == 1 else "")
        report.line(f"map {list(f.mapping)} -> perm {list(f.target.perm)} measure "
                    f"[{', '.join(fmt(m) for m in f.target.measure)}]" + (f"  ({tag})" if tag else ""))
        report.doc["factors"].append({"map": list(f.mapping), "target": f.target.to_json()})
    return EXIT_OK


def parse_cylinder(text: str, shift: asy.MarkovShift) -> asy.CylinderSet:
    symbols = list(shift.symbols or [str(i) for i in range(shift.size)])
    if any(len(s) != 1 for s in symbols):
        raise formats.FormatError("cylinder syntax needs single-character alphabet symbols")
    index = {s: i for i, s in enumerate(symbols)}
    words = []
    for word in text.split(","):
        word = word.strip()
        try:
            words.append(tuple(index[c] for c in word))
        except KeyError as exc:
            raise formats.FormatError(f"symbol {exc} not in the alphabet") from exc
    try:
        return asy.CylinderSet(tuple(words))
    except ValueError as exc:
        raise formats.FormatError(str(exc)) from exc


def cmd_mixing(args, report: Report) -> int:
    shift = formats.load_markov(args.markov, allow_float=args.float)
    sets = [parse_cylinder(s, shift) for s in args.sets]
    asy.check_horizon(shift, args.horizon)
    negative = False

    mix = asy.mixing_report(shift, sets[0], sets[1 % len(sets)], args.horizon)
    report.line(f"period {mix.period}; {'mixing' if mix.mixing else 'not mixing'}; "
                f"certificate {fmt(mix.certificate)}")
    report.line(f"target mu(A)mu(B) = {fmt(mix.target)}")
    width = len(str(args.horizon))
    report.line(f"{'n'.rjust(width)}  mu(A ∩ T^-n B)")
    for n, c in enumerate(mix.correlations):
        report.line(f"{str(n).rjust(width)}  {fmt(c)}")
    report.doc["mixing"] = {
        "period": mix.period, "mixing": mix.mixing, "certificate": mix.certificate,
        "target": fmt(mix.target), "correlations": [fmt(c) for c in mix.correlations],
    }
    negative |= not mix.mixing

    if args.ornstein is not None:
        theta = float(args.ornstein) if args.float else formats.to_fraction(args.ornstein)
        orn = asy.ornstein_check(shift, sets[0], sets[1 % len(sets)], theta, args.horizon)
        verdict = "satisfied" if orn.satisfied else "violated"
        report.line(f"ornstein theta={fmt(orn.theta)}: limsup {fmt(orn.limsup)} vs bound "
                    f"{fmt(orn.bound)} -> {verdict} (window max {fmt(orn.window_max)} "
                    f"over n={orn.window_start}..{orn.horizon})")
        report.doc["ornstein"] = {
            "theta": fmt(orn.theta), "bound": fmt(orn.bound), "limsup": fmt(orn.limsup),
            "window_max": fmt(orn.window_max), "satisfied": orn.satisfied,
        }
        negative |= not orn.satisfied

    if args.furstenberg is not None:
        k, n = args.furstenberg
        asy.check_horizon(shift, k * n)
        if len(sets) == 1:
            chosen = sets * (k + 1)
        elif len(sets) == k + 1:
            chosen = sets
        else:
            raise formats.FormatError(f"--furstenberg {k} needs 1 or {k + 1} sets")
        value = asy.furstenberg_average(shift, chosen, n)
        report.line(f"furstenberg k={k} n={n}: {fmt(value)}")
        report.doc["furstenberg"] = {"k": k, "n": n, "value": fmt(value)}

    if args.triple is not None:
        if len(sets) != 3:
            raise formats.FormatError("--triple needs three sets A B C")
        n, m = args.triple
        asy.check_horizon(shift, n + m)
        value = asy.triple_correlation(shift, sets[0], sets[1], sets[2], n, m)
        report.line(f"triple n={n} m={m}: {fmt(value)}")
        report.doc["triple"] = {"n": n, "m": m, "value": fmt(value)}

    return EXIT_NEGATIVE if negative else EXIT_OK


def _symbol(law: TripleLaw, i: int) -> str:
    if law.symbols is None:
        return str(i)
    s = law.symbols[i]
    return s if isinstance(s, str) else "".join(map(str, s))


def cmd_triple(args, report: Report) -> int:
    if args.xor is not None:
        p = formats.to_fraction(args.xor[0])
        m = int(args.xor[1])
        law = xor_triple([1 - p, p], m)
    elif args.law is not None:
        law = formats.load_triple_law(args.law)
    else:
        raise formats.FormatError("give a law file or --xor P M")

    checks = {
        "identical distribution": identically_distributed(law),
        "pairwise independence": check_pairwise_independent(law),
    }
    if args.haar is None:
        checks["functional relation"] = find_functional_relation(law) is not None
    for name, ok in checks.items():
        report.line(f"{name}: {'ok' if ok else 'failed'}")
    report.doc["hypotheses"] = checks

    try:
        if args.uniform_oracle:
            verdict = uniform_law_oracle(law)
            names = ",".join(_symbol(law, s) for s in verdict.support)
            report.line(f"uniform on {{{names}}}: confirmed")
            report.doc["uniform"] = {"support": [_symbol(law, s) for s in verdict.support],
                                     "probability": fmt(verdict.probability)}
        elif args.haar is not None:
            group = FiniteAbelianGroup(tuple(int(n) for n in args.haar.lower().split("x")))
            verdict = haar_oracle(group, law)
            report.line("additive relation: ok")
            report.line(f"H = {{{','.join(map(str, verdict.subgroup))}}}, Haar: confirmed")
            report.doc["haar"] = {"subgroup": list(verdict.subgroup), "probability": fmt(verdict.probability)}
        elif args.growth is not None:
            if args.xor is None:
                raise formats.FormatError("--growth needs --xor (a word-length family)")
            growth = support_growth(lambda k: xor_triple([1 - p, p], k), args.growth)
            report.line("a_m: " + " ".join(map(str, growth.counts)))
            report.line(f"verdict: {growth.verdict}")
            report.doc["growth"] = {"counts": list(growth.counts), "verdict": growth.verdict}
    except HypothesisFailed as exc:
        report.doc["failed"] = list(exc.failed)
        for name in exc.failed:
            if name not in checks:
                report.line(f"{name}: failed")
        return EXIT_INPUT
    return EXIT_OK


# -- parser -------------------------------------------------------------------

def _global_flags(parser: argparse.ArgumentParser, suppress: bool) -> None:
    d = (lambda v: argparse.SUPPRESS) if suppress else (lambda v: v)
    parser.add_argument("--json", action="store_true", default=d(False), help="emit a JSON report")
    parser.add_argument("--float", action="store_true", default=d(False),
                        help="binary64 arithmetic for markov chains (accepts decimals, long horizons)")
    parser.add_argument("--cap", type=int, default=d(DIMENSION_CAP),
                        help="largest n_X*n_Y for polytope computations")
    parser.add_argument("--factor-cap", type=int, default=d(FACTOR_CAP),
                        help="largest state count for factor enumeration")
    parser.add_argument("--seed", type=int, default=d(0), help="reserved for sampled checks")
    parser.add_argument("--prune-zero", action="store_true", default=d(False),
                        help="drop zero-mass states from finite systems when loading")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="joinlab", description=__doc__.splitlines()[0])
    _global_flags(parser, suppress=False)
    sub = parser.add_subparsers(dest="command", required=True)

    def add(name, func, help_text):
        p = sub.add_parser(name, help=help_text)
        _global_flags(p, suppress=True)
        p.set_defaults(func=func)
        return p

    p = add("disjoint", cmd_disjoint, "decide whether two finite systems are disjoint")
    p.add_argument("left")
    p.add_argument("right")

    p = add("joinings", cmd_joinings, "vertices, ergodic decomposition or distance of joinings")
    p.add_argument("left")
    p.add_argument("right")
    g = p.add_mutually_exclusive_group()
    g.add_argument("--vertices", action="store_true", help="list the extreme joinings (default)")
    g.add_argument("--decompose", metavar="COUPLING", help="coupling file, or 'product'")
    g.add_argument("--metric", nargs=2, metavar=("C1", "C2"))

    p = add("relative", cmd_relative, "relatively independent joining over a common factor")
    p.add_argument("left")
    p.add_argument("right")
    p.add_argument("--factor-pair", required=True,
                   help="factor-pair file, inline JSON, 'trivial' or 'identity'")

    p = add("factors", cmd_factors, "list the factors of a finite system")
    p.add_argument("system")

    p = add("mixing", cmd_mixing, "correlations and mixing statistics of a markov shift")
    p.add_argument("markov")
    p.add_argument("--sets", nargs="+", required=True, metavar="WORDS",
                   help="cylinder sets as comma-separated words, e.g. 01,10")
    p.add_argument("--horizon", type=int, default=10)
    p.add_argument("--ornstein", metavar="THETA")
    p.add_argument("--furstenberg", nargs=2, type=int, metavar=("K", "N"))
    p.add_argument("--triple", nargs=2, type=int, metavar=("N", "M"))

    p = add("triple", cmd_triple, "pairwise-independence oracles for triple laws")
    p.add_argument("law", nargs="?")
    p.add_argument("--xor", nargs=2, metavar=("P", "M"), help="XOR triple of Bernoulli(P) words of length M")
    g = p.add_mutually_exclusive_group(required=True)
    g.add_argument("--uniform-oracle", action="store_true")
    g.add_argument("--haar", metavar="GROUP", help="invariant factors, e.g. 4 or 2x2")
    g.add_argument("--growth", type=int, metavar="M")
    return parser


def main(argv: Sequence[str] | None = None, out=None, err=None) -> int:
    out = out or sys.stdout
    err = err or sys.stderr
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return EXIT_INPUT if exc.code else EXIT_OK
    report = Report(args.command)
    try:
        code = args.func(args, report)
    except CapExceeded as exc:
        err.write(f"error: {exc}\n")
        return EXIT_CAP
    except (JoinlabError, ValueError, TypeError) as exc:
        err.write(f"error: {exc}\n")
        if report.lines:
            report.emit(args.json, out)
        return EXIT_INPUT
    report.emit(args.json, out)
    return code


if __name__ == "__main__":
    sys.exit(main())
