"""
Experimental duality at the level of models.

``dualize`` takes the Z[u]-linear dual of a model: generator g becomes g* in
degree -deg(g) and every entry s -> t becomes t* -> s* with the Koszul sign
(-1)^(deg t + 1) and the same power of u.  In the dual the tower generators
span a subcomplex instead of a quotient, so the mirrored rule forbids
tower-to-free entries.

Homological h-invariants are read off the dual through u-localisation: the
class in degree -(ell + 2k) is pushed by a power of u into the periodic range,
where the cohomology of the dual is a single copy of the ring.  The weak
(strong) invariant is the largest k for which this map is nonzero
(surjective).  That the dual models a Spanier-Whitehead dual is an empirical
hypothesis; it is checked here, never relied on by the other modules.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from functools import cached_property, lru_cache
from math import gcd

from .cohomology import _basis, _delta, _positions, _rank, cohomology_at
from .errors import ExperimentalModuleError, ValidationError
from .exactalg import GF, QQ, ZZ, Ring, class_functional, kernel_basis_z, parse_ring
from .tcomplex import (
    DiffEntry,
    Generator,
    GradedComplex,
    AdmissibleComplex,
    ValidationReport,
    _check_d_squared,
    _check_entries,
    fixed_cohomology,
)

CALIBRATION_RANGE = range(5)
CALIBRATION_RINGS = (QQ, GF(2), GF(3))


def validate_coadmissible(c: GradedComplex) -> ValidationReport:
    """Mirrored admissibility: tower part a subcomplex, periodic cohomology a single Z."""
    report = ValidationReport(d_max=c.d_max)
    _check_entries(c, report, mirrored=True)
    if report.violations:
        return report
    _check_d_squared(c, report)
    if report.violations:
        return report
    fc = fixed_cohomology(c)
    if len(fc) == 1 and next(iter(fc.values())) == (1, []):
        report.ell = next(iter(fc))
    else:
        report.add("fixed-sphere", f"fixed complex cohomology is not Z in one degree: {fc}")
        return report
    free = c.restricted(c.free_ids)
    for n in (c.d_max + 1, c.d_max + 2):
        h = cohomology_at(free, n, "z", check=False)
        if not h.is_zero:
            report.add("free-not-torsion", f"free quotient has cohomology {h} in degree {n}")
    return report


@dataclass(frozen=True)
class CoadmissibleComplex(GradedComplex):
    """Dual model: same data as an admissible complex, mirrored structural rules."""

    @cached_property
    def report(self) -> ValidationReport:
        return validate_coadmissible(self)

    @property
    def ell(self):
        """Degree of the fixed sphere class in the dual (minus the original ell)."""
        return self.report.ell

    @property
    def admissible(self) -> bool:
        return self.report.admissible

    def require_admissible(self):
        if not self.report.admissible:
            raise ValidationError(self.report)
        return self


def _dual_data(c: GradedComplex):
    gens = [Generator(g.id + "*", g.kind, -g.degree) for g in c.generators]
    diff = [
        DiffEntry(e.target + "*", e.source + "*", (-1) ** ((c.degree(e.target) + 1) % 2) * e.coeff)
        for e in c.diff
    ]
    return gens, diff


def dualize(c: GradedComplex):
    """Z[u]-linear dual; an admissible input gives a coadmissible output and vice versa."""
    gens, diff = _dual_data(c)
    if isinstance(c, CoadmissibleComplex):
        return AdmissibleComplex.build(gens, diff, False, c.name and f"dual({c.name})")
    return CoadmissibleComplex.build(gens, diff, False, c.name and f"dual({c.name})")


# ---------------------------------------------------------------------------
# localisation map out of a given degree


@dataclass(frozen=True)
class _Stable:
    degree: int  # first periodic degree in the parity of the fixed class
    phi: tuple  # integral coordinate on cocycles of that degree


@lru_cache(maxsize=None)
def _stable(d: CoadmissibleComplex) -> _Stable:
    if not d.admissible:
        raise ExperimentalModuleError(f"dual is not coadmissible: {d.report.summary()}")
    M = d.d_max + 1
    if (M - d.ell) % 2:
        M += 1
    h, h_next = cohomology_at(d, M, "z", check=False), cohomology_at(d, M + 1, "z", check=False)
    if (h.free_rank, h.torsion) != (1, ()) or not h_next.is_zero:
        raise ExperimentalModuleError(f"localised dual is not Z in the parity of {d.ell}: H^{M}={h}, H^{M + 1}={h_next}")
    phi = class_functional([list(r) for r in _delta(d, M - 1)], [list(r) for r in _delta(d, M)], len(_basis(d, M)))
    if phi is None:
        raise ExperimentalModuleError(f"no class functional in stable degree {M}")
    return _Stable(M, tuple(phi))


def _localisation_row(d: CoadmissibleComplex, m: int) -> list[int]:
    """phi o u^N as a functional on degree-m cochains, N chosen to land in the periodic range."""
    st = _stable(d)
    if m > st.degree or (st.degree - m) % 2:
        raise ValueError("degree must lie below the periodic range in the parity of the fixed class")
    pos = _positions(d, st.degree)
    return [st.phi[pos[g]] for g, _ in _basis(d, m)]


@dataclass(frozen=True)
class LocalisationImage:
    degree: int
    ring: Ring
    index: int | None = None
    full: bool | None = None

    @property
    def nonzero(self) -> bool:
        return self.full if self.ring.is_field else self.index != 0

    @property
    def surjective(self) -> bool:
        return self.full if self.ring.is_field else self.index == 1


@lru_cache(maxsize=None)
def localisation_image(d: CoadmissibleComplex, m: int, ring: Ring) -> LocalisationImage:
    """Image of H^m(dual) in the periodic cohomology, as an index over Z or zero/full over a field."""
    row = _localisation_row(d, m)
    if not row:
        return LocalisationImage(m, ring, index=0, full=False)
    a = [list(r) for r in _delta(d, m)]
    if ring.kind == "z":
        idx = 0
        for v in kernel_basis_z(a, len(row)):
            idx = gcd(idx, sum(x * y for x, y in zip(row, v)))
        return LocalisationImage(m, ring, index=abs(idx))
    base = _rank(a, ring)
    return LocalisationImage(m, ring, full=_rank(a + [row], ring) > base)


def _k_range(c: AdmissibleComplex, d: CoadmissibleComplex):
    """k from the top (below which H^{-(ell+2k)} of the dual vanishes) down into the periodic range."""
    st = _stable(d)
    hi = -(-(c.d_max - c.ell) // 2)
    lo = -((st.degree + c.ell) // 2)
    return range(hi, lo - 1, -1)


@lru_cache(maxsize=None)
def _raw_homological_h(c: AdmissibleComplex, ring: Ring) -> tuple:
    d = dualize(c)
    weak = strong = None
    for k in _k_range(c, d):
        img = localisation_image(d, -(c.ell + 2 * k), ring)
        if weak is None and img.nonzero:
            weak = k
        if img.surjective:
            strong = k
            break
    if weak is None or strong is None:
        raise ExperimentalModuleError("localisation map never became surjective")
    return weak, strong


@lru_cache(maxsize=None)
def calibration_offset() -> int:
    """Grading offset pinned by the sphere family; raises if the family disagrees."""
    from .hinv import h_invariants
    from .tcomplex import sphere

    offsets = set()
    for ell in CALIBRATION_RANGE:
        for h in CALIBRATION_RANGE:
            s = sphere(ell, h)
            for ring in CALIBRATION_RINGS:
                offsets.add(h_invariants(s, ring)[0] - _raw_homological_h(s, ring)[0])
    if len(offsets) != 1:
        raise ExperimentalModuleError(f"sphere calibration is inconsistent: offsets {sorted(offsets)}")
    return offsets.pop()


def homological_h(c: AdmissibleComplex, ring="z") -> tuple:
    """(h_weak_hom, h_strong_hom), computed on the dual and calibrated on spheres."""
    c.require_admissible()
    ring = parse_ring(ring)
    off = calibration_offset()
    w, s = _raw_homological_h(c, ring)
    return w + off, s + off


def dual_cohomological_h(c: AdmissibleComplex, ring="q") -> int:
    """Least k' with a nonzero localisation out of degree -ell + 2k' in the dual."""
    c.require_admissible()
    ring = parse_ring(ring)
    d = dualize(c)
    ks = _k_range(c, d)
    for k in range(-ks[0], -ks[-1] + 1):
        if localisation_image(d, -c.ell + 2 * k, ring).nonzero:
            return k - calibration_offset()
    raise ExperimentalModuleError("localisation map is zero throughout")


# ---------------------------------------------------------------------------
# empirical duality report


@dataclass
class DualityReport:
    checks: list = field(default_factory=list)  # (name, passed, detail)
    flags: dict = field(default_factory=dict)

    @property
    def passed(self) -> bool:
        return all(ok for _, ok, _ in self.checks)

    def add(self, name, ok, detail=""):
        self.checks.append((name, bool(ok), detail))

    def summary(self) -> str:
        bad = [f"{n}: {d}" for n, ok, d in self.checks if not ok]
        if bad:
            return "; ".join(bad)
        return f"{len(self.checks)} checks hold"

    def lines(self):
        out = [f"{'PASS' if ok else 'FAIL'}\t{n}\t{d}" for n, ok, d in self.checks]
        out += [f"FLAG\t{k}\t{v}" for k, v in self.flags.items()]
        return out


def duality_check(c: AdmissibleComplex) -> DualityReport:
    from .hinv import candidate_primes, h_invariants, DEFAULT_PRIMES

    c.require_admissible()
    r = DualityReport()
    d = dualize(c)
    r.add("coadmissible", d.admissible, d.report.summary())
    if not d.admissible:
        return r
    primes = sorted(set(DEFAULT_PRIMES) | candidate_primes(c))
    for ring in [QQ] + [GF(p) for p in primes]:
        h = h_invariants(c, ring)[0]
        hw, hs = homological_h(c, ring)
        r.add(f"field[{ring}]", hw == hs == h, f"h_hom=({hw},{hs}), h={h}")
        k = dual_cohomological_h(c, ring)
        r.add(f"dual-shift[{ring}]", h + k == 0, f"{h} + {k}")
    hw_hom, hs_hom = homological_h(c, ZZ)
    zw, zs = h_invariants(c, ZZ)
    r.add("chain[z]", hs_hom <= hw_hom == zw <= zs, f"{hs_hom} <= {hw_hom} = {zw} <= {zs}")
    min_p = min(h_invariants(c, GF(p))[0] for p in primes)
    r.flags["strong_hom_is_min_p"] = hs_hom == min_p
    r.flags["strong_hom"] = hs_hom
    r.flags["min_p"] = min_p
    return r
