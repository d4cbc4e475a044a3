"""
Algebraic models of finite semi-free circle complexes of type SWF.

A model is a finite list of generators, each either ``tower`` (a fixed cell)
or ``free`` (a free orbit cell), with an integer degree, together with
differential entries ``source -> target`` carrying an integer coefficient.
The power of ``u`` (degree 2) attached to an entry is implied by the degrees::

    j = (deg(source) + 1 - deg(target)) / 2      must be a non-negative integer

The complex represents the free graded Z[u]-module on the generators with the
Z[u]-linear differential ``d(s) = sum coeff * u^j * target``; its cohomology is
the reduced Borel cohomology of the space.  Free generators span a subcomplex
(free-to-tower entries are forbidden) and the tower generators with their
``j = 0`` entries form the fixed complex, whose cohomology must be that of a
sphere S^ell.
"""

from __future__ import annotations

from collections import defaultdict
from dataclasses import dataclass, field
from functools import cached_property
from typing import Iterable, Mapping

from .errors import (
    AttachmentNotClosedError,
    CochainMapError,
    FixedSphereMismatch,
    HypothesisViolation,
    SmashModelError,
    ValidationError,
    WedgeError,
)
from .exactalg import class_functional, cokernel_invariants, kernel_basis_z, rank

TOWER = "tower"
FREE = "free"

# Sign convention for products: d(a.b) = da.b + (-1)^deg(a) a.db
KOSZUL_TAG = "koszul-left"


@dataclass(frozen=True)
class Generator:
    id: str
    kind: str
    degree: int

    @property
    def is_tower(self) -> bool:
        return self.kind == TOWER


@dataclass(frozen=True)
class DiffEntry:
    source: str
    target: str
    coeff: int


def u_power(source_degree: int, target_degree: int):
    """Implied u-exponent of an entry, or None when parity/positivity fails."""
    gap = source_degree + 1 - target_degree
    if gap < 0 or gap % 2:
        return None
    return gap // 2


@dataclass(frozen=True)
class Violation:
    rule: str
    message: str
    generators: tuple = ()

    def __str__(self):
        return f"{self.rule}: {self.message}"


@dataclass
class ValidationReport:
    violations: list = field(default_factory=list)
    ell: int | None = None
    d_max: int | None = None

    @property
    def admissible(self) -> bool:
        return not self.violations

    def rules(self) -> set:
        return {v.rule for v in self.violations}

    def add(self, rule, message, generators=()):
        self.violations.append(Violation(rule, message, tuple(generators)))

    def summary(self) -> str:
        if self.admissible:
            return "admissible"
        return "; ".join(str(v) for v in self.violations)


@dataclass(frozen=True)
class GradedComplex:
    """Generators plus differential entries, in canonical order."""

    generators: tuple
    diff: tuple
    fragment: bool = False
    name: str = field(default="", compare=False)

    @classmethod
    def build(cls, generators: Iterable, diff: Iterable = (), fragment=False, name=""):
        gens = tuple(g if isinstance(g, Generator) else Generator(*g) for g in generators)
        order = {}
        for i, g in enumerate(gens):
            order.setdefault(g.id, i)
        acc = defaultdict(int)
        for e in diff:
            if not isinstance(e, DiffEntry):
                e = DiffEntry(*e)
            acc[(e.source, e.target)] += e.coeff
        big = len(gens)
        keys = sorted(acc, key=lambda st: (order.get(st[0], big), order.get(st[1], big), st))
        entries = tuple(DiffEntry(s, t, acc[(s, t)]) for s, t in keys if acc[(s, t)])
        return cls(gens, entries, fragment, name)

    @cached_property
    def by_id(self) -> dict:
        return {g.id: g for g in self.generators}

    @cached_property
    def position(self) -> dict:
        return {g.id: i for i, g in enumerate(self.generators)}

    def degree(self, gid) -> int:
        return self.by_id[gid].degree

    @cached_property
    def outgoing(self) -> dict:
        """gid -> tuple of (target, coeff, u-power); entries with bad ids/parity skipped."""
        out = defaultdict(list)
        for e in self.diff:
            if e.source in self.by_id and e.target in self.by_id:
                j = u_power(self.degree(e.source), self.degree(e.target))
                if j is not None:
                    out[e.source].append((e.target, e.coeff, j))
        return {k: tuple(v) for k, v in out.items()}

    @property
    def tower_ids(self):
        return [g.id for g in self.generators if g.kind == TOWER]

    @property
    def free_ids(self):
        return [g.id for g in self.generators if g.kind == FREE]

    @property
    def d_max(self):
        return max((g.degree for g in self.generators), default=None)

    @property
    def d_min(self):
        return min((g.degree for g in self.generators), default=None)

    def restricted(self, ids, cls=None, j_zero_only=False):
        """Subcomplex spanned by ``ids`` (entries leaving the set are dropped)."""
        keep = set(ids)
        gens = [g for g in self.generators if g.id in keep]
        diff = []
        for s, outs in self.outgoing.items():
            if s not in keep:
                continue
            for t, c, j in outs:
                if t in keep and (not j_zero_only or j == 0):
                    diff.append(DiffEntry(s, t, c))
        return (cls or GradedComplex).build(gens, diff, fragment=True)

    def delta_squared(self) -> dict:
        """Nonzero coefficients of d(d(g)) keyed by (g, target)."""
        acc = defaultdict(int)
        for s, outs in self.outgoing.items():
            for t, c, _ in outs:
                for t2, c2, _ in self.outgoing.get(t, ()):
                    acc[(s, t2)] += c * c2
        return {k: v for k, v in acc.items() if v}


# ---------------------------------------------------------------------------
# fixed complex


def _ordinary_matrix(sub: GradedComplex, n: int):
    """Matrix (column convention) of the j=0 differential C^n -> C^{n+1}."""
    src = [g.id for g in sub.generators if g.degree == n]
    tgt = [g.id for g in sub.generators if g.degree == n + 1]
    ti = {t: i for i, t in enumerate(tgt)}
    a = [[0] * len(src) for _ in tgt]
    for col, s in enumerate(src):
        for t, c, j in sub.outgoing.get(s, ()):
            if j == 0 and t in ti:
                a[ti[t]][col] += c
    return a, src, tgt


def fixed_complex(c: GradedComplex) -> GradedComplex:
    return c.restricted(c.tower_ids, j_zero_only=True)


def fixed_cohomology(c: GradedComplex) -> dict:
    """Integral cohomology of the fixed complex: degree -> Cokernel-like (free, torsion)."""
    sub = fixed_complex(c)
    degrees = sorted({g.degree for g in sub.generators})
    out = {}
    for n in degrees:
        a_out, src, _ = _ordinary_matrix(sub, n)
        a_in, _, _ = _ordinary_matrix(sub, n - 1)
        dim = len(src)
        r_out = rank(a_out) if a_out and src else 0
        coker = cokernel_invariants(a_in, nrows=dim) if dim else None
        if coker is None:
            continue
        free = coker.free_rank - r_out
        if free or coker.torsion:
            out[n] = (free, list(coker.torsion))
    return out


def sphere_functional(c: GradedComplex, ell: int) -> dict:
    """Coordinate on H^ell of the fixed complex: tower id -> integer weight."""
    sub = fixed_complex(c)
    a_out, src, _ = _ordinary_matrix(sub, ell)
    a_in, _, _ = _ordinary_matrix(sub, ell - 1)
    phi = class_functional(a_in, a_out, len(src))
    if phi is None:
        raise ValidationError(ValidationReport([Violation("fixed-sphere", f"no rank-one class in degree {ell}")]))
    return {g: w for g, w in zip(src, phi) if w}


# ---------------------------------------------------------------------------
# admissible complexes


@dataclass(frozen=True)
class AdmissibleComplex(GradedComplex):
    """Model of the reduced Borel cochains of a type-SWF space."""

    @cached_property
    def report(self) -> ValidationReport:
        return validate(self)

    @property
    def ell(self):
        return self.report.ell

    @property
    def admissible(self) -> bool:
        return self.report.admissible

    def require_admissible(self):
        if not self.report.admissible:
            raise ValidationError(self.report)
        return self

    @cached_property
    def sphere_class(self) -> dict:
        if self.ell is None:
            raise ValidationError(ValidationReport([Violation("fixed-sphere", "complex has no fixed sphere")]))
        return sphere_functional(self, self.ell)

    def relabel(self, mapping: Mapping) -> "AdmissibleComplex":
        gens = [Generator(mapping.get(g.id, g.id), g.kind, g.degree) for g in self.generators]
        diff = [DiffEntry(mapping.get(e.source, e.source), mapping.get(e.target, e.target), e.coeff) for e in self.diff]
        return type(self).build(gens, diff, self.fragment, self.name)


def _check_entries(c: GradedComplex, report: ValidationReport, mirrored=False):
    seen = set()
    for g in c.generators:
        if g.id in seen:
            report.add("duplicate-id", f"generator {g.id!r} declared twice", [g.id])
        seen.add(g.id)
        if g.kind not in (TOWER, FREE):
            report.add("kind", f"generator {g.id!r} has unknown kind {g.kind!r}", [g.id])
    for e in c.diff:
        if e.source not in c.by_id or e.target not in c.by_id:
            report.add("unknown-id", f"entry {e.source}->{e.target} names an unknown generator", [e.source, e.target])
            continue
        if e.coeff == 0:
            report.add("zero-coefficient", f"entry {e.source}->{e.target} has coefficient 0", [e.source, e.target])
        s, t = c.by_id[e.source], c.by_id[e.target]
        j = u_power(s.degree, t.degree)
        if j is None:
            report.add(
                "parity",
                f"entry {e.source}({s.degree})->{e.target}({t.degree}) has no legal u-power",
                [e.source, e.target],
            )
            continue
        if not mirrored and s.kind == FREE and t.kind == TOWER:
            report.add("free-to-tower forbidden", f"entry {e.source}->{e.target}", [e.source, e.target])
        if mirrored and s.kind == TOWER and t.kind == FREE:
            report.add("tower-to-free forbidden", f"entry {e.source}->{e.target}", [e.source, e.target])
        if s.kind == TOWER and t.kind == TOWER and j != 0:
            report.add("tower-u-power", f"tower entry {e.source}->{e.target} has u-power {j}", [e.source, e.target])


def _check_d_squared(c: GradedComplex, report: ValidationReport):
    for (s, t), v in c.delta_squared().items():
        report.add("d-squared", f"d(d({s})) has coefficient {v} on {t}", [s, t])


def _check_fixed_sphere(c: GradedComplex, report: ValidationReport):
    fc = fixed_cohomology(c)
    if len(fc) == 1:
        (n, (free, tors)), = fc.items()
        if free == 1 and not tors:
            report.ell = n
            return
    desc = ", ".join(f"H^{n}={'Z^%d' % f if f else ''}{'+tors' + str(t) if t else ''}" for n, (f, t) in fc.items())
    report.add("fixed-sphere", f"fixed complex cohomology is not Z in one degree ({desc or 'zero'})")


def _check_free_torsion(c: GradedComplex, report: ValidationReport, degrees):
    from .cohomology import cohomology_at

    free = c.restricted(c.free_ids)
    for n in degrees:
        h = cohomology_at(free, n, "z", check=False)
        if h.free_rank or h.torsion:
            report.add("free-not-torsion", f"free part has nonzero cohomology {h} in degree {n}")


def validate(c: GradedComplex) -> ValidationReport:
    """Check every admissibility rule; the report is empty iff ``c`` is admissible."""
    report = ValidationReport(d_max=c.d_max)
    _check_entries(c, report)
    if report.violations:
        return report
    _check_d_squared(c, report)
    if report.violations:
        return report
    if not c.fragment:
        _check_fixed_sphere(c, report)
    elif c.tower_ids:
        fc = fixed_cohomology(c)
        if len(fc) == 1:
            (n, (free, tors)), = fc.items()
            if free == 1 and not tors:
                report.ell = n
    if c.d_max is not None:
        _check_free_torsion(c, report, (c.d_max + 1, c.d_max + 2))
    return report


# ---------------------------------------------------------------------------
# constructors


def _admissible(gens, diff, fragment=False, name="", error=ValidationError) -> AdmissibleComplex:
    c = AdmissibleComplex.build(gens, diff, fragment, name)
    if not c.report.admissible:
        raise error(c.report)
    return c


def sphere(ell: int, h: int) -> AdmissibleComplex:
    """Model of the representation sphere of R^ell + C^h."""
    if ell < 0 or h < 0:
        raise HypothesisViolation("sphere needs ell >= 0 and h >= 0")
    gens = [Generator("t", TOWER, ell)]
    diff = []
    for i in range(1, h + 1):
        gens.append(Generator(f"x{i}", FREE, ell + 2 * i - 1))
        gens.append(Generator(f"y{i}", FREE, ell + 2 * i))
        diff.append(DiffEntry(f"y{i}", f"x{i}", 1))
        if i < h:
            diff.append(DiffEntry(f"y{i}", f"x{i + 1}", 1))
    if h >= 1:
        diff.append(DiffEntry("t", "x1", 1))
    return _admissible(gens, diff, name=f"sphere({ell},{h})")


def free_summand(n: int) -> AdmissibleComplex:
    """Model of a free summand T_+ ^ S^n (a wedge fragment with no fixed part)."""
    if n < 0:
        raise HypothesisViolation("free_summand needs n >= 0")
    gens = [Generator("xf", FREE, n), Generator("yf", FREE, n + 1)]
    return _admissible(gens, [DiffEntry("yf", "xf", 1)], fragment=True, name=f"free({n})")


def point() -> AdmissibleComplex:
    """The base point: the empty wedge fragment."""
    return AdmissibleComplex.build((), (), fragment=True, name="point")


def _fresh(base: str, taken: set) -> str:
    if base not in taken:
        return base
    k = 1
    while f"{base}_{k}" in taken:
        k += 1
    return f"{base}_{k}"


def _carries_sphere(c: AdmissibleComplex) -> bool:
    return bool(c.tower_ids) and bool(fixed_cohomology(c))


def wedge(a: AdmissibleComplex, b: AdmissibleComplex) -> AdmissibleComplex:
    """Reduced wedge sum; ids of ``b`` that collide with ``a`` get a numeric suffix."""
    if _carries_sphere(a) and _carries_sphere(b):
        raise WedgeError("both wedge summands carry a fixed sphere class")
    taken = {g.id for g in a.generators}
    mapping = {}
    for g in b.generators:
        new = _fresh(g.id, taken)
        taken.add(new)
        mapping[g.id] = new
    b2 = b.relabel(mapping)
    fragment = a.fragment and b.fragment
    name = f"wedge({a.name},{b.name})" if a.name and b.name else ""
    return _admissible(a.generators + b2.generators, a.diff + b2.diff, fragment, name)


def smash(a: AdmissibleComplex, b: AdmissibleComplex) -> AdmissibleComplex:
    """Tensor product over Z[u] with the Koszul sign on the second factor."""
    a.require_admissible()
    b.require_admissible()
    gens = []
    for g in a.generators:
        for h in b.generators:
            kind = TOWER if g.kind == TOWER and h.kind == TOWER else FREE
            gens.append(Generator(f"{g.id}.{h.id}", kind, g.degree + h.degree))
    diff = []
    for g in a.generators:
        for h in b.generators:
            src = f"{g.id}.{h.id}"
            for t, c, _ in a.outgoing.get(g.id, ()):
                diff.append(DiffEntry(src, f"{t}.{h.id}", c))
            sign = -1 if g.degree % 2 else 1
            for t, c, _ in b.outgoing.get(h.id, ()):
                diff.append(DiffEntry(src, f"{g.id}.{t}", sign * c))
    name = f"smash({a.name},{b.name})" if a.name and b.name else ""
    return _admissible(gens, diff, a.fragment or b.fragment, name, error=SmashModelError)


@dataclass(frozen=True)
class AttachmentCochain:
    """Borel-cohomological coefficients of the attaching map of a free (n+1)-cell."""

    dim: int
    coefficients: tuple  # of (generator id, int)

    @classmethod
    def of(cls, dim: int, coefficients: Mapping | Iterable):
        items = coefficients.items() if isinstance(coefficients, Mapping) else coefficients
        return cls(dim, tuple((str(g), int(v)) for g, v in items))


def attach_free_cell(a: AdmissibleComplex, cochain: AttachmentCochain, *, correct=True) -> AdmissibleComplex:
    """Attach a free cell along ``cochain``.

    Adds the pair P(n+1), Q(n+2) with d(Q) = u P, adds ``c_g P`` to d(g), and
    cancels each u-divisible P-component of d^2 by a multiple of Q.  With
    ``correct=False`` the cancellation is skipped (used to exhibit that it is
    needed); the result is then returned unvalidated.
    """
    n = cochain.dim
    if n < 2:
        raise HypothesisViolation(f"attachment dimension must be >= 2, got {n}")
    a.require_admissible()
    taken = {g.id for g in a.generators}
    P = _fresh("P", taken)
    Q = _fresh("Q", taken | {P})
    coeffs = defaultdict(int)
    for gid, v in cochain.coefficients:
        if gid not in a.by_id:
            raise HypothesisViolation(f"attachment names unknown generator {gid!r}")
        if u_power(a.degree(gid), n + 1) is None:
            raise HypothesisViolation(
                f"generator {gid!r} of degree {a.degree(gid)} cannot attach to a cell of degree {n + 1}"
            )
        coeffs[gid] += v
    gens = list(a.generators) + [Generator(P, FREE, n + 1), Generator(Q, FREE, n + 2)]
    diff = list(a.diff) + [DiffEntry(Q, P, 1)]
    diff += [DiffEntry(g, P, v) for g, v in coeffs.items() if v]
    if correct:
        for w in a.generators:
            obstruction = sum(c * coeffs.get(t, 0) for t, c, _ in a.outgoing.get(w.id, ()))
            if not obstruction:
                continue
            J = u_power(w.degree + 1, n + 1)  # u-power of the P-component of d^2(w)
            if J is None or J == 0:
                raise AttachmentNotClosedError(
                    f"obstruction {obstruction}*P in d^2({w.id}) is not divisible by u"
                )
            diff.append(DiffEntry(w.id, Q, -obstruction))
    name = a.name and f"attach({a.name},{n},{dict(coeffs)})"
    c = AdmissibleComplex.build(gens, diff, a.fragment, name)
    if correct and not c.report.admissible:
        raise ValidationError(c.report)
    return c


def xab(ell: int, h: int, a: int, b: int) -> AdmissibleComplex:
    """S^{ell,h} wedge a free n-cell, with a free (n+1)-cell attached along (a, b)."""
    n = ell + 2 * h
    if ell < 0 or h < 0:
        raise HypothesisViolation("xab needs ell, h >= 0")
    if n < 2:
        raise HypothesisViolation(f"xab needs ell + 2h >= 2, got {n}")
    base = wedge(sphere(ell, h), free_summand(n))
    top = f"y{h}" if h else "t"
    c = attach_free_cell(base, AttachmentCochain.of(n, {top: a, "xf": b}))
    return AdmissibleComplex.build(c.generators, c.diff, False, f"xab({ell},{h},{a},{b})")


# ---------------------------------------------------------------------------
# cochain maps


@dataclass(frozen=True)
class CochainMap:
    """Degree-preserving Z[u]-map B(source) -> B(target).

    Orientation: a map of complexes B(X') -> B(X) models a space map X -> X'.
    ``entries`` are (source id, target id, coeff) with implied u-power
    (deg(source) - deg(target)) / 2 >= 0.
    """

    source: AdmissibleComplex
    target: AdmissibleComplex
    entries: tuple

    @classmethod
    def of(cls, source, target, entries):
        acc = defaultdict(int)
        for s, t, v in entries:
            acc[(s, t)] += v
        ps, pt = source.position, target.position
        keys = sorted(acc, key=lambda st: (ps.get(st[0], 1 << 30), pt.get(st[1], 1 << 30)))
        return cls(source, target, tuple((s, t, acc[(s, t)]) for s, t in keys if acc[(s, t)]))

    @cached_property
    def images(self) -> dict:
        out = defaultdict(list)
        for s, t, v in self.entries:
            out[s].append((t, v))
        return dict(out)


def validate_map(f: CochainMap) -> ValidationReport:
    report = ValidationReport()
    src, tgt = f.source, f.target
    for s, t, v in f.entries:
        if s not in src.by_id or t not in tgt.by_id:
            report.add("unknown-id", f"map entry {s}->{t} names an unknown generator")
            continue
        gap = src.degree(s) - tgt.degree(t)
        if gap < 0 or gap % 2:
            report.add("parity", f"map entry {s}->{t} is not degree-preserving with a u-power")
        if src.by_id[s].kind == FREE and tgt.by_id[t].kind == TOWER:
            report.add("free-to-tower forbidden", f"map entry {s}->{t}")
    if report.violations:
        return report
    # f d - d f = 0, coefficientwise on (source generator, target generator)
    acc = defaultdict(int)
    for g in src.generators:
        for t, c, _ in src.outgoing.get(g.id, ()):
            for t2, v in f.images.get(t, ()):
                acc[(g.id, t2)] += c * v
        for t, v in f.images.get(g.id, ()):
            for t2, c, _ in tgt.outgoing.get(t, ()):
                acc[(g.id, t2)] -= v * c
    for (s, t), v in acc.items():
        if v:
            report.add("commute", f"(f d - d f)({s}) has coefficient {v} on {t}")
    return report


def fixed_degree(f: CochainMap) -> int:
    """Degree of the induced map on the rank-one fixed cohomology in degree ell."""
    src, tgt = f.source, f.target
    if src.ell is None or tgt.ell is None or src.ell != tgt.ell:
        raise FixedSphereMismatch(f"fixed spheres differ: ell={src.ell} vs ell={tgt.ell}")
    report = validate_map(f)
    if not report.admissible:
        raise CochainMapError(report)
    ell = src.ell
    sub = fixed_complex(src)
    a_out, ids, _ = _ordinary_matrix(sub, ell)
    theta_src = src.sphere_class
    theta_tgt = tgt.sphere_class
    for z in kernel_basis_z(a_out, len(ids)):
        w = sum(theta_src.get(g, 0) * v for g, v in zip(ids, z))
        if w:
            image = defaultdict(int)
            for g, v in zip(ids, z):
                for t, c in f.images.get(g, ()):
                    if tgt.by_id[t].kind == TOWER and tgt.degree(t) == ell:
                        image[t] += v * c
            val = sum(theta_tgt.get(t, 0) * v for t, v in image.items())
            if val % w:
                raise FixedSphereMismatch("fixed-point map is not a multiple of the sphere class")
            return val // w
    raise FixedSphereMismatch("source has no fixed sphere class")


def compose(g: CochainMap, f: CochainMap) -> CochainMap:
    """The composite ``g o f``."""
    if f.target != g.source:
        raise CochainMapError(ValidationReport([Violation("compose", "maps are not composable")]))
    entries = []
    for s, t, v in f.entries:
        for t2, w in g.images.get(t, ()):
            entries.append((s, t2, v * w))
    return CochainMap.of(f.source, g.target, entries)


def identity_map(c: AdmissibleComplex) -> CochainMap:
    return CochainMap.of(c, c, [(g.id, g.id, 1) for g in c.generators])


def projection_map(source: AdmissibleComplex, target: AdmissibleComplex) -> CochainMap:
    """Send each generator of ``source`` to the same-named generator of ``target``, others to 0."""
    entries = [(g.id, g.id, 1) for g in source.generators if g.id in target.by_id]
    f = CochainMap.of(source, target, entries)
    report = validate_map(f)
    if not report.admissible:
        raise CochainMapError(report)
    return f
