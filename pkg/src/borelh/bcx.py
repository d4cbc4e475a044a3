"""
The BCX text format for model complexes.

::

    bcx 1 koszul-left
    meta name sphere(0,1)
    meta n 3/4
    generator t tower 0
    generator x1 free 1
    generator y1 free 2
    diff t x1 1
    diff y1 x1 1

The u-power of a ``diff`` line is implied by the degrees.  ``#`` starts a
comment.  Serialization lists generators in declaration order and entries in
canonical order, so parsing a serialized complex gives back the same complex.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction

from .errors import BcxSyntaxError, ValidationError
from .tcomplex import FREE, KOSZUL_TAG, TOWER, AdmissibleComplex, DiffEntry, Generator, u_power

FORMAT_VERSION = "1"
META_KEYS = ("name", "n", "fragment")


@dataclass(frozen=True)
class BcxDocument:
    complex: AdmissibleComplex
    meta: dict = field(default_factory=dict)

    @property
    def n(self) -> Fraction | None:
        return self.meta.get("n")


def parse_rational(text: str) -> Fraction:
    """Exact rational written as an integer or p/q; decimals are rejected."""
    text = text.strip()
    num, _, den = text.partition("/")
    try:
        value = Fraction(int(num), int(den)) if den else Fraction(int(num))
    except (ValueError, ZeroDivisionError):
        raise ValueError(f"not an exact rational p/q: {text!r}") from None
    return value


def format_rational(x) -> str:
    x = Fraction(x)
    return str(x.numerator) if x.denominator == 1 else f"{x.numerator}/{x.denominator}"


def _int(tok: str, lineno: int, what: str) -> int:
    try:
        return int(tok)
    except ValueError:
        raise BcxSyntaxError(f"{what} must be an integer, got {tok!r}", lineno) from None


def parse_bcx(text: str) -> BcxDocument:
    header_seen = False
    gens: list[Generator] = []
    kinds: dict[str, tuple] = {}
    diff: list[DiffEntry] = []
    meta: dict = {}
    for lineno, raw in enumerate(text.splitlines(), 1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        toks = line.split()
        if not header_seen:
            if len(toks) != 3 or toks[0] != "bcx":
                raise BcxSyntaxError(f"expected header 'bcx {FORMAT_VERSION} {KOSZUL_TAG}'", lineno)
            if toks[1] != FORMAT_VERSION:
                raise BcxSyntaxError(f"unsupported format version {toks[1]!r}", lineno)
            if toks[2] != KOSZUL_TAG:
                raise BcxSyntaxError(f"unsupported sign convention {toks[2]!r}", lineno)
            header_seen = True
            continue
        key = toks[0]
        if key == "generator":
            if len(toks) != 4:
                raise BcxSyntaxError("expected 'generator <id> <tower|free> <degree>'", lineno)
            gid, kind = toks[1], toks[2]
            if kind not in (TOWER, FREE):
                raise BcxSyntaxError(f"generator kind must be tower or free, got {kind!r}", lineno)
            if gid in kinds:
                raise BcxSyntaxError(f"duplicate generator id {gid!r}", lineno)
            deg = _int(toks[3], lineno, "degree")
            kinds[gid] = (kind, deg)
            gens.append(Generator(gid, kind, deg))
        elif key == "diff":
            if len(toks) != 4:
                raise BcxSyntaxError("expected 'diff <source> <target> <coeff>'", lineno)
            src, dst = toks[1], toks[2]
            for gid in (src, dst):
                if gid not in kinds:
                    raise BcxSyntaxError(f"unknown generator {gid!r}", lineno)
            coeff = _int(toks[3], lineno, "coefficient")
            if coeff == 0:
                raise BcxSyntaxError(f"zero coefficient on {src} -> {dst}", lineno)
            (ks, ds), (kt, dt) = kinds[src], kinds[dst]
            if u_power(ds, dt) is None:
                raise BcxSyntaxError(f"parity violation: {src}({ds}) -> {dst}({dt}) has no legal u-power", lineno)
            if ks == FREE and kt == TOWER:
                raise BcxSyntaxError(f"free-to-tower forbidden: {src} -> {dst}", lineno)
            diff.append(DiffEntry(src, dst, coeff))
        elif key == "meta":
            if len(toks) < 3:
                raise BcxSyntaxError("expected 'meta <key> <value>'", lineno)
            mkey, value = toks[1], line.split(None, 2)[2]
            if mkey not in META_KEYS:
                raise BcxSyntaxError(f"unknown meta key {mkey!r}", lineno)
            if mkey == "n":
                try:
                    meta["n"] = parse_rational(value)
                except ValueError as exc:
                    raise BcxSyntaxError(str(exc), lineno) from None
            elif mkey == "fragment":
                if value not in ("true", "false"):
                    raise BcxSyntaxError("fragment must be true or false", lineno)
                meta["fragment"] = value == "true"
            else:
                meta["name"] = value
        else:
            raise BcxSyntaxError(f"unknown directive {key!r}", lineno)
    if not header_seen:
        raise BcxSyntaxError("missing header", 1)
    c = AdmissibleComplex.build(gens, diff, meta.get("fragment", False), meta.get("name", ""))
    if not c.admissible:
        raise ValidationError(c.report)
    return BcxDocument(c, meta)


def serialize_bcx(c: AdmissibleComplex, n=None) -> str:
    lines = [f"bcx {FORMAT_VERSION} {KOSZUL_TAG}"]
    if c.name:
        lines.append(f"meta name {c.name}")
    if n is not None:
        lines.append(f"meta n {format_rational(n)}")
    if c.fragment:
        lines.append("meta fragment true")
    lines += [f"generator {g.id} {g.kind} {g.degree}" for g in c.generators]
    lines += [f"diff {e.source} {e.target} {e.coeff}" for e in c.diff]
    return "\n".join(lines) + "\n"


def read_bcx(path: str) -> BcxDocument:
    if path == "-":
        import sys

        return parse_bcx(sys.stdin.read())
    with open(path, encoding="utf-8") as fh:
        return parse_bcx(fh.read())
