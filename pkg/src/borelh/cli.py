"""Command-line interface: ``borelh <command> ...``.

Complexes are read from BCX files (``-`` for standard input) or built from a
construction expression such as ``xab(0,1,2,3)`` or
``attach(wedge(sphere(0,1), free(2)), 2, y1=2, xf=3)``.
"""

from __future__ import annotations

import argparse
import ast
import sys

from .bcx import format_rational, parse_rational, read_bcx, serialize_bcx
from .cohomology import cohomology_table, restriction_image, stabilization_bound
from .corpus import constructor_corpus, corpus_maps, corpus_pairs, strict_pairs
from .errors import BorelError, HypothesisViolation, ScanBoundError
from .exactalg import parse_ring
from .hinv import SUITES, h_invariants, manifold_report, prime_profile, verify_properties
from .tcomplex import (
    AdmissibleComplex,
    AttachmentCochain,
    attach_free_cell,
    free_summand,
    point,
    smash,
    sphere,
    wedge,
    xab,
)

EXIT_FAIL = 1
EXIT_IO = 74


def _attach(c, n, coeffs=None, **kw):
    data = dict(coeffs or {})
    data.update(kw)
    return attach_free_cell(c, AttachmentCochain.of(n, data))


def _suspend(c, l, m):
    return smash(c, sphere(l, m))


BUILDERS = {
    "sphere": sphere,
    "free": free_summand,
    "point": point,
    "wedge": wedge,
    "smash": smash,
    "xab": xab,
    "attach": _attach,
    "suspend": _suspend,
}


def _eval(node):
    if isinstance(node, ast.Constant) and isinstance(node.value, (int, str)) and not isinstance(node.value, bool):
        return node.value
    if isinstance(node, ast.UnaryOp) and isinstance(node.op, ast.USub):
        v = _eval(node.operand)
        if isinstance(v, int):
            return -v
    if isinstance(node, ast.Dict):
        return {_eval(k): _eval(v) for k, v in zip(node.keys, node.values)}
    if isinstance(node, ast.Call) and isinstance(node.func, ast.Name) and node.func.id in BUILDERS:
        args = [_eval(a) for a in node.args]
        kwargs = {k.arg: _eval(k.value) for k in node.keywords if k.arg}
        try:
            return BUILDERS[node.func.id](*args, **kwargs)
        except TypeError as exc:
            raise HypothesisViolation(f"{node.func.id}: {exc}") from None
    raise HypothesisViolation(f"unsupported expression: {ast.unparse(node)}")


def build_expression(expr: str) -> AdmissibleComplex:
    """Evaluate a construction expression using only the whitelisted builders."""
    try:
        tree = ast.parse(expr.strip(), mode="eval")
    except SyntaxError as exc:
        raise HypothesisViolation(f"cannot parse expression: {exc.msg}") from None
    c = _eval(tree.body)
    if not isinstance(c, AdmissibleComplex):
        raise HypothesisViolation("expression does not evaluate to a complex")
    if not c.name:
        c = AdmissibleComplex.build(c.generators, c.diff, c.fragment, expr.replace(" ", ""))
    return c


def load(source: str):
    """Read a BCX file, or build from an expression when ``source`` looks like a call."""
    if "(" in source and not source.endswith(".bcx"):
        return build_expression(source), None
    doc = read_bcx(source)
    return doc.complex, doc.n


def _check_max_degree(c, max_degree):
    if max_degree is None:
        return
    need = stabilization_bound(c) + 3
    if max_degree < need:
        raise ScanBoundError(f"--max-degree {max_degree} is below the guaranteed bound {need} (d_max + 3)")


def _fmt_set(s) -> str:
    return "{" + ",".join(str(p) for p in sorted(s)) + "}"


def format_hreport(r) -> list[str]:
    lines = [f"ell\t{r.ell}", "ring\th_weak\th_strong"]
    lines += [f"{tag}\t{w}\t{s}" for tag, (w, s) in r.rings.items()]
    lines += [
        f"h0\t{r.h0}",
        f"exceptional_primes\t{_fmt_set(r.exceptional_primes)}",
        f"candidate_primes\t{_fmt_set(r.candidate_primes)}",
        f"jump_order\t{r.jump_order}",
    ]
    lines += [f"flag\t{k}\t{'ok' if v else 'FAILED'}" for k, v in r.flags.items()]
    for k, v in r.notes.items():
        lines.append(f"note\t{k}\t{_fmt_set(v) if isinstance(v, frozenset) else v}")
    return lines


def format_manifold(m) -> list[str]:
    fr = format_rational
    lines = [f"n\t{fr(m.n)}", "ring\th_weak\th_strong"]
    lines += [f"{tag}\t{fr(w)}\t{fr(s)}" for tag, (w, s) in m.rings.items()]
    lines += [f"d\t{fr(m.d)}", f"Fr\t{fr(m.Fr)}", f"h_KM\t{fr(m.h_KM)}\t({m.h_KM_source})"]
    return lines


def cmd_build(args):
    c = build_expression(args.expr)
    return 0, serialize_bcx(c, args.n)


def cmd_cohomology(args):
    c, _ = load(args.input)
    c.require_admissible()
    _check_max_degree(c, args.max_degree)
    ring = parse_ring(args.ring)
    hi = args.max_degree if args.max_degree is not None else None
    lines = [f"degree\tH ({args.ring})"]
    for n, grp in cohomology_table(c, ring, hi=hi).items():
        lines.append(f"{n}\t{grp}")
    if c.ell is not None and not c.fragment:
        lines.append("k\tdegree\trestriction")
        top = ((hi if hi is not None else stabilization_bound(c) + 3) - c.ell) // 2
        for k in range(top + 1):
            lines.append(f"{k}\t{c.ell + 2 * k}\t{restriction_image(c, k, ring)}")
    return 0, "\n".join(lines) + "\n"


def cmd_hinv(args):
    c, n_meta = load(args.input)
    c.require_admissible()
    _check_max_degree(c, args.max_degree)
    if args.ring:
        w, s = h_invariants(c, args.ring)
        lines = ["ring\th_weak\th_strong", f"{parse_ring(args.ring).tag}\t{w}\t{s}"]
    else:
        lines = format_hreport(prime_profile(c))
    n = n_meta
    if args.manifold is not None:
        key, _, value = args.manifold.partition("=")
        if key != "n" or not value:
            raise HypothesisViolation("--manifold expects n=p/q")
        try:
            n = parse_rational(value)
        except ValueError as exc:
            raise HypothesisViolation(str(exc)) from None
    if n is not None:
        lines.append("")
        lines += format_manifold(manifold_report(c, n))
    return 0, "\n".join(lines) + "\n"


def cmd_smash(args):
    a, _ = load(args.left)
    b, _ = load(args.right)
    return 0, serialize_bcx(smash(a, b))


def cmd_wedge(args):
    a, _ = load(args.left)
    b, _ = load(args.right)
    return 0, serialize_bcx(wedge(a, b))


def cmd_suspend(args):
    c, n = load(args.input)
    return 0, serialize_bcx(smash(c, sphere(args.l, args.m)), n)


def cmd_attach(args):
    c, n = load(args.input)
    coeffs = {}
    for item in args.coeff:
        gid, _, v = item.partition("=")
        try:
            coeffs[gid] = coeffs.get(gid, 0) + int(v)
        except ValueError:
            raise HypothesisViolation(f"--coeff expects id=integer, got {item!r}") from None
    return 0, serialize_bcx(attach_free_cell(c, AttachmentCochain.of(args.dim, coeffs)), n)


def cmd_dual(args):
    from .dual import duality_check, homological_h

    c, _ = load(args.input)
    c.require_admissible()
    rings = [args.ring] if args.ring else ["z", "q", "f:2", "f:3", "f:5", "f:7"]
    lines = ["ring\th_weak_hom\th_strong_hom"]
    for ring in rings:
        w, s = homological_h(c, ring)
        lines.append(f"{parse_ring(ring).tag}\t{w}\t{s}")
    report = duality_check(c)
    lines += report.lines()
    return (0 if report.passed else EXIT_FAIL), "\n".join(lines) + "\n"


def cmd_verify(args):
    suites = tuple(s.strip() for s in args.suite.split(",")) if args.suite else SUITES
    unknown = set(suites) - set(SUITES)
    if unknown:
        raise HypothesisViolation(f"unknown suites {sorted(unknown)}; choose from {','.join(SUITES)}")
    if args.inputs:
        complexes = [load(p)[0] for p in args.inputs]
        pairs = [(complexes[i], complexes[i + 1]) for i in range(0, len(complexes) - 1, 2)]
        report = verify_properties(complexes, pairs, (), suites)
    else:
        report = verify_properties(constructor_corpus(), corpus_pairs(), corpus_maps(), suites, strict_pairs())
    lines = report.lines()
    failed = sum(not r.passed for r in report.results)
    lines.append(f"summary\t{len(report.results) - failed} passed\t{failed} failed")
    return (0 if report.passed else EXIT_FAIL), "\n".join(lines) + "\n"


def make_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="borelh", description="Borel cohomology and h-invariants of type-SWF models")
    p.add_argument("--output", "-o", help="write the report to this path instead of standard output")
    sub = p.add_subparsers(dest="command", required=True)

    s = sub.add_parser("build", help="evaluate a construction expression to BCX")
    s.add_argument("expr")
    s.add_argument("--n", type=parse_rational, help="formal desuspension to record, as p/q")
    s.set_defaults(func=cmd_build)

    s = sub.add_parser("cohomology", help="degreewise cohomology and restriction images")
    s.add_argument("input")
    s.add_argument("--ring", default="z")
    s.add_argument("--max-degree", type=int)
    s.set_defaults(func=cmd_cohomology)

    s = sub.add_parser("hinv", help="h-invariants and the prime profile")
    s.add_argument("input")
    s.add_argument("--ring")
    s.add_argument("--max-degree", type=int)
    s.add_argument("--manifold", metavar="n=p/q")
    s.set_defaults(func=cmd_hinv)

    for name, func in (("smash", cmd_smash), ("wedge", cmd_wedge)):
        s = sub.add_parser(name, help=f"{name} of two complexes, as BCX")
        s.add_argument("left")
        s.add_argument("right")
        s.set_defaults(func=func)

    s = sub.add_parser("suspend", help="smash with the representation sphere S^{l,m}")
    s.add_argument("input")
    s.add_argument("--l", type=int, default=0)
    s.add_argument("--m", type=int, default=1)
    s.set_defaults(func=cmd_suspend)

    s = sub.add_parser("attach", help="attach a free cell")
    s.add_argument("input")
    s.add_argument("--dim", type=int, required=True)
    s.add_argument("--coeff", action="append", default=[], metavar="id=c")
    s.set_defaults(func=cmd_attach)

    s = sub.add_parser("dual", help="homological h-invariants and duality checks (experimental)")
    s.add_argument("input")
    s.add_argument("--ring")
    s.set_defaults(func=cmd_dual)

    s = sub.add_parser("verify", help="run property suites (default: bundled corpus)")
    s.add_argument("inputs", nargs="*")
    s.add_argument("--suite", help=f"comma-separated subset of {','.join(SUITES)}")
    s.set_defaults(func=cmd_verify)
    return p


def main(argv=None) -> int:
    parser = make_parser()
    args = parser.parse_args(argv)
    try:
        status, text = args.func(args)
    except BorelError as exc:
        print(f"borelh: error: {exc}", file=sys.stderr)
        return exc.exit_code
    except OSError as exc:
        print(f"borelh: error: {exc}", file=sys.stderr)
        return EXIT_IO
    if args.output:
        with open(args.output, "w", encoding="utf-8") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)
    return status


if __name__ == "__main__":
    sys.exit(main())
