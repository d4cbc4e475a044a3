"""
Weak and strong h-invariants, prime profiles, and property checks.

``h_weak`` is the least k with a nonzero restriction to the fixed sphere in
degree ell+2k and ``h_strong`` the least k with a surjective one.  Over Z the
weak invariant equals the characteristic-zero value h^0 and the strong one is
the maximum of h^p over all primes p; only finitely many primes can differ
from h^0 and they are located from the Smith invariants of the cochain
matrices and of the restriction indices.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from functools import lru_cache

from .cohomology import (
    _basis,
    _delta,
    _positions,
    restriction_image,
    scan_limit,
    stabilization_bound,
    stable_tate,
    uct_holds,
)
from .errors import BorelError, InternalInvariantError
from .exactalg import (
    GF,
    QQ,
    ZZ,
    Ring,
    kernel_basis_z,
    lattice_left_inverse,
    matmul,
    parse_ring,
    prime_divisors,
    rank,
    snf_cached,
)
from .tcomplex import (
    TOWER,
    AdmissibleComplex,
    CochainMap,
    _ordinary_matrix,
    fixed_complex,
    fixed_degree,
    smash,
    sphere,
)

DEFAULT_PRIMES = (2, 3, 5, 7)


@lru_cache(maxsize=None)
def _h(c: AdmissibleComplex, ring: Ring) -> tuple:
    weak = strong = None
    for k in range(scan_limit(c) + 1):
        img = restriction_image(c, k, ring)
        if weak is None and img.nonzero:
            weak = k
        if img.surjective:
            strong = k
            break
    if weak is None or strong is None:
        raise InternalInvariantError(f"restriction never became surjective within k <= {scan_limit(c)}")
    return weak, strong


def h_invariants(c: AdmissibleComplex, ring="z") -> tuple:
    """(h_weak, h_strong) over ``ring``; over a field the two coincide."""
    c.require_admissible()
    return _h(c, parse_ring(ring))


def hp(c: AdmissibleComplex, p: int) -> int:
    """h^p for p prime, h^0 for p == 0."""
    return h_invariants(c, QQ if p == 0 else GF(p))[0]


@lru_cache(maxsize=None)
def candidate_primes(c: AdmissibleComplex) -> frozenset:
    """Primes at which h^p may differ from h^0."""
    c.require_admissible()
    primes = set()
    lo = c.d_min - 1
    hi = stabilization_bound(c) + 3
    for n in range(lo, hi + 1):
        a = _delta(c, n)
        if a and a[0]:
            for d in snf_cached(a).invariant_factors:
                primes |= prime_divisors(d)
    for k in range(scan_limit(c) + 1):
        primes |= prime_divisors(restriction_image(c, k, ZZ).index)
    return frozenset(primes)


def rings_for(c: AdmissibleComplex, extra=DEFAULT_PRIMES) -> list:
    ps = sorted(set(extra) | candidate_primes(c))
    return [ZZ, QQ] + [GF(p) for p in ps]


def _sphere_cocycle(c: AdmissibleComplex) -> dict:
    """Integral cocycle of the fixed complex in degree ell on which the sphere coordinate is 1."""
    a_out, ids, _ = _ordinary_matrix(fixed_complex(c), c.ell)
    theta = c.sphere_class
    z, g = [0] * len(ids), 0
    for v in kernel_basis_z(a_out, len(ids)):
        w = sum(theta.get(i, 0) * x for i, x in zip(ids, v))
        if not w:
            continue
        # extended gcd: keep z with theta(z) = g, then fold in v
        s, t, g2 = _egcd(g, w)
        z = [s * a + t * b for a, b in zip(z, v)]
        g = g2
    if abs(g) != 1:
        raise InternalInvariantError("sphere coordinate does not reach 1 on cocycles")
    return {i: g * x for i, x in zip(ids, z) if x}


def _egcd(a: int, b: int) -> tuple:
    x0, x1, y0, y1 = 1, 0, 0, 1
    while b:
        q, a, b = a // b, b, a % b
        x0, x1 = x1, x0 - q * x1
        y0, y1 = y1, y0 - q * y1
    return x0, y0, a


@lru_cache(maxsize=None)
def _jump_class(c: AdmissibleComplex, k: int):
    """Coboundary of the sphere class u^k s in the free (relative) cohomology.

    Returns (alpha, beta): alpha holds the coordinates of the cocycle in a basis
    of free cocycles of degree ell+2k+1 and the columns of beta span the
    coboundaries in the same coordinates.
    """
    n = c.ell + 2 * k
    z = _sphere_cocycle(c)
    x = [z.get(g, 0) if j == k else 0 for g, j in _basis(c, n)]
    y = [sum(a * b for a, b in zip(row, x)) for row in _delta(c, n)]
    free = c.restricted(c.free_ids)
    fpos = _positions(free, n + 1)
    w = [0] * len(fpos)
    for (g, _), v in zip(_basis(c, n + 1), y):
        if c.by_id[g].kind == TOWER:
            if v:
                raise InternalInvariantError("lifted sphere class has a tower component in its coboundary")
        else:
            w[fpos[g]] = v
    K = kernel_basis_z([list(r) for r in _delta(free, n + 1)], len(w))
    if not K:
        return (), ()
    left = lattice_left_inverse(K, len(w))
    alpha = tuple(r[0] for r in matmul(left, [[v] for v in w]))
    d_in = [list(r) for r in _delta(free, n)]
    beta = tuple(tuple(r) for r in matmul(left, d_in)) if d_in and d_in[0] else tuple(() for _ in alpha)
    return alpha, beta


def jump_class_primes(c: AdmissibleComplex, primes) -> frozenset:
    """Primes p (among ``primes``) at which the obstruction class survives reduction mod p.

    With nu = ell + 2 h_strong(Z), h^p reaches h_strong(Z) exactly when the
    coboundary of the fixed class of degree nu-2 is nonzero in
    H^{nu-1}(X, X^T; Z) (x) F_p, that is, when it is not divisible by p.
    """
    zs = h_invariants(c, ZZ)[1]
    if zs == 0:
        return frozenset(primes)
    alpha, beta = _jump_class(c, zs - 1)
    if not alpha:
        return frozenset()
    out = set()
    for p in primes:
        base = [list(r) for r in beta]
        ext = [list(r) + [a] for r, a in zip(beta, alpha)]
        r0 = rank(base, GF(p)) if base and base[0] else 0
        if rank(ext, GF(p)) > r0:
            out.add(p)
    return frozenset(out)


@dataclass(frozen=True)
class HReport:
    ell: int
    h0: int
    rings: dict  # ring tag -> (h_weak, h_strong)
    prime_profile: dict  # p -> h^p for the listed primes; h^p = h0 for every other p
    exceptional_primes: frozenset
    candidate_primes: frozenset
    jump_order: int
    flags: dict = field(default_factory=dict)
    notes: dict = field(default_factory=dict)

    @property
    def z(self):
        return self.rings["z"]

    def h_at(self, p: int) -> int:
        return self.prime_profile.get(p, self.h0)

    @property
    def consistent(self) -> bool:
        return all(self.flags.values())


def prime_profile(c: AdmissibleComplex, extra=DEFAULT_PRIMES) -> HReport:
    c.require_admissible()
    h0 = hp(c, 0)
    zw, zs = h_invariants(c, ZZ)
    cands = candidate_primes(c)
    primes = sorted(set(extra) | cands)
    profile = {p: hp(c, p) for p in primes}
    rings = {"z": (zw, zs), "q": (h0, h0)}
    rings.update({f"f:{p}": (v, v) for p, v in profile.items()})
    exceptional = frozenset(p for p, v in profile.items() if v != h0)
    # order of the cyclic cokernel of the restriction one step below h_strong(Z)
    jump = restriction_image(c, zs - 1, ZZ).index if zs > 0 else 0
    maximisers = {p for p, v in profile.items() if v == zs}
    if jump == 0:
        # h^0 = h_strong(Z); only finitely many (candidate) primes fall short
        bound_ok = h0 == zs and set(primes) - maximisers <= cands
        literal = maximisers == set(primes)
    else:
        bound_ok = bool(maximisers) and maximisers <= prime_divisors(jump) and h0 < zs
        literal = maximisers == prime_divisors(jump)
    flags = {
        "weak_le_strong": all(w <= s for w, s in rings.values()),
        "weak_is_h0": zw == h0,
        "strong_is_max_p": zs == max([h0, *profile.values()]),
        "exceptional_within_candidates": exceptional <= cands,
        "jump_order_bound": bound_ok,
        "jump_class_primes": maximisers == jump_class_primes(c, primes),
    }
    # maximisers equal to the prime divisors of the jump order (all primes when it is 0);
    # this fails whenever the obstruction class is divisible, so it is recorded, not required
    notes = {"jump_order_exact": literal, "maximising_primes": frozenset(maximisers)}
    return HReport(c.ell, h0, rings, profile, exceptional, cands, jump, flags, notes)


# ---------------------------------------------------------------------------
# property harness


@dataclass(frozen=True)
class PropertyResult:
    name: str
    passed: bool
    detail: str = ""

    def line(self) -> str:
        return f"{'PASS' if self.passed else 'FAIL'}\t{self.name}\t{self.detail}"


@dataclass
class PropertyReport:
    results: list = field(default_factory=list)

    @property
    def passed(self) -> bool:
        return all(r.passed for r in self.results)

    def add(self, name, passed, detail=""):
        self.results.append(PropertyResult(name, bool(passed), detail))

    def lines(self):
        return [r.line() for r in self.results]


def _label(c) -> str:
    return c.name or f"<{len(c.generators)} generators>"


def check_stability(report, c, ms=(1, 2), ls=(0, 1)):
    for m in ms:
        for l in ls:
            s = smash(c, sphere(l, m))
            bad = []
            for ring in rings_for(c):
                base, shifted = h_invariants(c, ring), h_invariants(s, ring)
                if shifted != (base[0] + m, base[1] + m):
                    bad.append(f"{ring}: {base}->{shifted}")
            report.add(f"stability[{_label(c)} ^ S({l},{m})]", not bad, "; ".join(bad) or f"shift {m}")


def check_additivity(report, a, b):
    prod = smash(a, b)
    primes = sorted(set(DEFAULT_PRIMES) | candidate_primes(a) | candidate_primes(b) | candidate_primes(prod))
    bad = []
    for ring in [QQ] + [GF(p) for p in primes]:
        lhs = h_invariants(prod, ring)[0]
        rhs = h_invariants(a, ring)[0] + h_invariants(b, ring)[0]
        if lhs != rhs:
            bad.append(f"{ring}: {lhs} != {rhs}")
    report.add(f"additivity[{_label(a)}, {_label(b)}]", not bad, "; ".join(bad) or "fields additive")
    return prod


def check_subadditivity(report, a, b, prod=None):
    prod = prod or smash(a, b)
    lhs = h_invariants(prod, ZZ)[1]
    rhs = h_invariants(a, ZZ)[1] + h_invariants(b, ZZ)[1]
    report.add(f"subadditivity[{_label(a)}, {_label(b)}]", lhs <= rhs, f"h_s(Z): {lhs} <= {rhs}")
    return lhs, rhs


def check_strictness(report, pairs):
    witnesses = []
    for a, b in pairs:
        lhs = h_invariants(smash(a, b), ZZ)[1]
        rhs = h_invariants(a, ZZ)[1] + h_invariants(b, ZZ)[1]
        if lhs < rhs:
            witnesses.append(f"{_label(a)} ^ {_label(b)}: {lhs} < {rhs}")
    report.add("strictness", bool(witnesses), "; ".join(witnesses) or "no strict witness")


def check_monotonicity(report, f: CochainMap):
    """A map B' -> B models X -> X'; nonzero fixed degree gives h_w(B) <= h_w(B')."""
    deg = fixed_degree(f)
    src, tgt = f.source, f.target
    name = f"monotonicity[{_label(src)} -> {_label(tgt)}]"
    if deg == 0:
        report.add(name, True, "fixed degree 0: no constraint")
        return
    bad = []
    rings = sorted(set(rings_for(src)) | set(rings_for(tgt)))
    for ring in rings:
        if ring.kind == "f" and deg % ring.p == 0:
            continue
        ws, ss = h_invariants(src, ring)
        wt, st = h_invariants(tgt, ring)
        if wt > ws:
            bad.append(f"{ring}: weak {wt} > {ws}")
        if abs(deg) == 1 and st > ss:
            bad.append(f"{ring}: strong {st} > {ss}")
    report.add(name, not bad, "; ".join(bad) or f"fixed degree {deg}")


def check_coefficients(report, c):
    r = prime_profile(c)
    report.add(f"weak-h0[{_label(c)}]", r.flags["weak_is_h0"], f"h_w(Z)={r.z[0]}, h^0={r.h0}")
    report.add(
        f"max-p[{_label(c)}]",
        r.flags["strong_is_max_p"] and r.flags["jump_order_bound"] and r.flags["jump_class_primes"],
        f"h_s(Z)={r.z[1]}, max_p h^p={max([r.h0, *r.prime_profile.values()])}, jump order {r.jump_order}, "
        f"maximising primes {sorted(r.notes['maximising_primes'])}",
    )


def check_localization(report, c):
    bad = []
    for ring in [QQ] + [GF(p) for p in sorted(set(DEFAULT_PRIMES) | candidate_primes(c))]:
        st = stable_tate(c, ring)
        want = (1, 0) if c.ell % 2 == 0 else (0, 1)
        if st.dims() != want:
            bad.append(f"{ring}: {st.dims()}")
    report.add(f"localization[{_label(c)}]", not bad, "; ".join(bad) or "rank one in the parity of ell")


def check_uct(report, c):
    bad = []
    primes = sorted(set(DEFAULT_PRIMES[:2]) | candidate_primes(c))
    for n in range(c.d_min - 1, stabilization_bound(c) + 2):
        for p in primes:
            if not uct_holds(c, n, p):
                bad.append(f"n={n}, p={p}")
    report.add(f"uct[{_label(c)}]", not bad, "; ".join(bad) or "holds")


SUITES = ("stability", "additivity", "subadditivity", "strictness", "monotonicity", "coefficients", "localization", "uct", "duality")


def verify_properties(complexes=(), pairs=(), maps=(), suites=SUITES, strict_pairs=None) -> PropertyReport:
    """Run the selected property suites and collect PASS/FAIL lines."""
    unknown = set(suites) - set(SUITES)
    if unknown:
        raise ValueError(f"unknown suites: {sorted(unknown)}")
    report = PropertyReport()
    for c in complexes:
        c.require_admissible()
    if "stability" in suites:
        for c in complexes:
            check_stability(report, c)
    for a, b in pairs:
        prod = None
        if "additivity" in suites:
            prod = check_additivity(report, a, b)
        if "subadditivity" in suites:
            check_subadditivity(report, a, b, prod)
    if "strictness" in suites:
        check_strictness(report, strict_pairs if strict_pairs is not None else pairs)
    if "monotonicity" in suites:
        for f in maps:
            check_monotonicity(report, f)
    for c in complexes:
        if "coefficients" in suites:
            check_coefficients(report, c)
        if "localization" in suites:
            check_localization(report, c)
        if "uct" in suites:
            check_uct(report, c)
    if "duality" in suites:
        from .dual import duality_check

        for c in complexes:
            d = duality_check(c)
            report.add(f"duality[{_label(c)}]", d.passed, d.summary())
    return report


# ---------------------------------------------------------------------------
# manifold conventions


def _frac(x) -> Fraction:
    if isinstance(x, str) and "/" not in x and "." in x:
        raise ValueError("rationals are given exactly as p/q")
    return Fraction(x)


@dataclass(frozen=True)
class ManifoldReport:
    n: Fraction
    ell: int
    rings: dict  # tag -> (h_weak - n, h_strong - n)
    prime_profile: dict  # p -> h^p - n
    h0: Fraction
    d: Fraction
    Fr: Fraction
    h_KM: Fraction
    h_KM_source: str = "dual"


def manifold_report(c: AdmissibleComplex, n) -> ManifoldReport:
    """Shift every space-level invariant by the formal desuspension ``n``."""
    n = _frac(n)
    r = prime_profile(c)
    rings = {tag: (Fraction(w) - n, Fraction(s) - n) for tag, (w, s) in r.rings.items()}
    profile = {p: Fraction(v) - n for p, v in r.prime_profile.items()}
    try:
        from .dual import homological_h

        h_hom0 = homological_h(c, QQ)[0]
        source = "dual"
    except BorelError:  # experimental module rejected this complex
        h_hom0, source = r.h0, "cohomological"
    return ManifoldReport(
        n=n,
        ell=r.ell,
        rings=rings,
        prime_profile=profile,
        h0=Fraction(r.h0) - n,
        d=2 * Fraction(r.z[0]) - 2 * n,
        Fr=2 * Fraction(r.h_at(2)) - 2 * n,
        h_KM=-(Fraction(h_hom0) - n),
        h_KM_source=source,
    )


@dataclass(frozen=True)
class FroyshovResult:
    satisfied: bool
    slack: Fraction


def froyshov_check(h, c1_sq, b2: int) -> FroyshovResult:
    """Test (c1^2 + b2)/8 <= h exactly; slack is h - (c1^2 + b2)/8."""
    if int(b2) != b2 or b2 < 0:
        raise ValueError("b2 must be a non-negative integer")
    slack = _frac(h) - (_frac(c1_sq) + int(b2)) / 8
    return FroyshovResult(slack >= 0, slack)
