"""
Degreewise cohomology of a model complex over Z, Q and F_p.

In degree n the model is the free abelian group on the monomials ``u^j g``
with ``deg(g) + 2j = n`` (:func:`degree_basis`).  Every generator occurs at
most once per degree, and above the top generator degree ``d_max`` every
monomial has ``j >= 1``, so multiplication by u identifies degree n with
degree n+2 and all data are 2-periodic from ``d_max`` on.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from functools import lru_cache
from math import gcd

from .errors import InternalInvariantError
from .exactalg import (
    IntMatrix,
    Ring,
    field_rank,
    kernel_basis_z,
    nullspace,
    parse_ring,
    rank,
    snf_cached,
    transpose,
)
from .tcomplex import AdmissibleComplex, GradedComplex


@dataclass(frozen=True)
class DegreeBasis:
    degree: int
    elements: tuple  # of (generator id, u-power)

    def __len__(self):
        return len(self.elements)

    def label(self, i) -> str:
        g, j = self.elements[i]
        return g if j == 0 else (f"u.{g}" if j == 1 else f"u^{j}.{g}")


@lru_cache(maxsize=None)
def _basis(c: GradedComplex, n: int) -> tuple:
    return tuple(
        (g.id, (n - g.degree) // 2) for g in c.generators if g.degree <= n and (n - g.degree) % 2 == 0
    )


@lru_cache(maxsize=None)
def _positions(c: GradedComplex, n: int) -> dict:
    return {g: i for i, (g, _) in enumerate(_basis(c, n))}


def degree_basis(c: GradedComplex, n: int) -> DegreeBasis:
    return DegreeBasis(n, _basis(c, n))


@lru_cache(maxsize=None)
def _delta(c: GradedComplex, n: int) -> tuple:
    """d: degree n -> degree n+1 in column convention, as a tuple of rows."""
    src = _basis(c, n)
    tpos = _positions(c, n + 1)
    a = [[0] * len(src) for _ in range(len(tpos))]
    for col, (g, _) in enumerate(src):
        for t, coeff, _j in c.outgoing.get(g, ()):
            a[tpos[t]][col] += coeff
    return tuple(tuple(r) for r in a)


def delta(c: GradedComplex, n: int) -> list[list[int]]:
    return [list(r) for r in _delta(c, n)]


def cochain_matrix(c: GradedComplex, n: int) -> IntMatrix:
    """Matrix of d from degree n to n+1; row i is the coboundary of basis monomial i."""
    src, tgt = degree_basis(c, n), degree_basis(c, n + 1)
    rows = [src.label(i) for i in range(len(src))]
    cols = [tgt.label(i) for i in range(len(tgt))]
    return IntMatrix.from_lists(transpose(delta(c, n), ncols=len(src)), rows, cols, ncols=len(cols))


@dataclass(frozen=True)
class CohomologyGroup:
    ring: Ring
    free_rank: int = 0
    torsion: tuple = ()

    @property
    def dim(self) -> int:
        """Dimension over a field (the free rank; fields carry no torsion)."""
        return self.free_rank

    @property
    def is_zero(self) -> bool:
        return not self.free_rank and not self.torsion

    def __str__(self):
        if self.ring.is_field:
            base = {"q": "Q"}.get(self.ring.kind, f"F{self.ring.p}")
            return "0" if not self.free_rank else (base if self.free_rank == 1 else f"{base}^{self.free_rank}")
        parts = []
        if self.free_rank:
            parts.append("Z" if self.free_rank == 1 else f"Z^{self.free_rank}")
        parts += [f"Z/{d}" for d in self.torsion]
        return " + ".join(parts) if parts else "0"


def _require(c, check):
    if check and isinstance(c, AdmissibleComplex):
        c.require_admissible()


def _rank(a, ring: Ring) -> int:
    if not a or not a[0]:
        return 0
    if ring.kind == "f":
        return rank(a, ring)
    return snf_cached(a).rank


def cohomology_at(c: GradedComplex, n: int, ring="z", *, check=True) -> CohomologyGroup:
    ring = parse_ring(ring)
    _require(c, check)
    dim = len(_basis(c, n))
    if dim == 0:
        return CohomologyGroup(ring)
    out, inc = _delta(c, n), _delta(c, n - 1)
    r_out, r_in = _rank(out, ring), _rank(inc, ring)
    free = dim - r_out - r_in
    torsion = ()
    if ring.kind == "z" and inc and inc[0]:
        torsion = tuple(d for d in snf_cached(inc).invariant_factors if d > 1)
    return CohomologyGroup(ring, free, torsion)


def stabilization_bound(c: GradedComplex) -> int:
    """Top generator degree; beyond it every degreewise datum is 2-periodic."""
    return c.d_max if c.d_max is not None else 0


def scan_limit(c: AdmissibleComplex) -> int:
    """Largest k any h-invariant scan needs: ceil((d_max + 3 - ell) / 2)."""
    return max(0, -(-(stabilization_bound(c) + 3 - c.ell) // 2))


def cohomology_table(c: GradedComplex, ring="z", lo=None, hi=None) -> dict:
    lo = c.d_min if lo is None else lo
    hi = stabilization_bound(c) + 3 if hi is None else hi
    if lo is None:
        return {}
    return {n: cohomology_at(c, n, ring) for n in range(lo, hi + 1)}


# ---------------------------------------------------------------------------
# restriction to the fixed sphere


@dataclass(frozen=True)
class RestrictionImage:
    """Image of H^{ell+2k} -> H^{ell+2k}(fixed sphere) = ring.

    Over Z, ``index`` m means the image is mZ (0: zero, 1: surjective).  Over a
    field the image is either zero or everything.
    """

    k: int
    ring: Ring
    index: int | None = None
    full: bool | None = None

    @property
    def nonzero(self) -> bool:
        return self.full if self.ring.is_field else self.index != 0

    @property
    def surjective(self) -> bool:
        return self.full if self.ring.is_field else self.index == 1

    def __str__(self):
        if self.ring.is_field:
            return "full" if self.full else "zero"
        return f"{self.index}Z" if self.index not in (0, 1) else ("0" if self.index == 0 else "Z")


def restriction_row(c: AdmissibleComplex, k: int) -> list[int]:
    """Integral functional on degree ell+2k cochains: the sphere-class coordinate of the tower part."""
    theta = c.sphere_class
    return [theta.get(g, 0) if j == k else 0 for g, j in _basis(c, c.ell + 2 * k)]


@lru_cache(maxsize=None)
def _restriction(c: AdmissibleComplex, k: int, ring: Ring) -> RestrictionImage:
    n = c.ell + 2 * k
    row = restriction_row(c, k)
    a = [list(r) for r in _delta(c, n)]
    if ring.kind == "z":
        vals = [sum(x * y for x, y in zip(row, v)) for v in kernel_basis_z(a, len(row))]
        m = 0
        for v in vals:
            m = gcd(m, v)
        return RestrictionImage(k, ring, index=abs(m))
    # the functional is nonzero on cocycles iff it is not in the row space of d
    base = _rank(a, ring)
    aug = _rank(a + [row], ring)
    return RestrictionImage(k, ring, full=aug > base)


def restriction_image(c: AdmissibleComplex, k: int, ring="z") -> RestrictionImage:
    ring = parse_ring(ring)
    c.require_admissible()
    if c.ell is None:
        raise InternalInvariantError("restriction needs a fixed sphere")
    if k < 0:
        raise ValueError("k must be >= 0")
    return _restriction(c, k, ring)


# ---------------------------------------------------------------------------
# u-action and tower structure over fields


def _field_vectors(a, ring: Ring):
    return [[v % ring.p for v in row] for row in a] if ring.kind == "f" else [list(r) for r in a]


@lru_cache(maxsize=None)
def _kernel(c: GradedComplex, n: int, ring: Ring) -> tuple:
    dim = len(_basis(c, n))
    a = [list(r) for r in _delta(c, n)]
    if not a:
        a = []
    return tuple(tuple(v) for v in nullspace(a, dim, ring))


@lru_cache(maxsize=None)
def u_map_rank(c: GradedComplex, n: int, r: int, ring: Ring) -> int:
    """Rank of multiplication by u^r from H^n to H^{n+2r} over a field."""
    if r == 0:
        return cohomology_at(c, n, ring, check=False).dim
    kern = _kernel(c, n, ring)
    if not kern:
        return 0
    src = _basis(c, n)
    tpos = _positions(c, n + 2 * r)
    shifted = []
    for v in kern:
        w = [0] * len(tpos)
        for x, (g, _) in zip(v, src):
            if x:
                w[tpos[g]] = x
        shifted.append(w)
    bound_rows = transpose([list(r_) for r_ in _delta(c, n + 2 * r - 1)], ncols=len(_basis(c, n + 2 * r - 1)))
    bound_rows = [row for row in bound_rows if any(row)]
    base = field_rank(_field_vectors(bound_rows, ring), ring) if bound_rows else 0
    return field_rank(_field_vectors(bound_rows, ring) + shifted, ring) - base


@dataclass(frozen=True)
class TowerDecomposition:
    ring: Ring
    infinite_start: int
    finite: tuple = ()  # sorted (start degree, length)

    def __str__(self):
        fin = ", ".join(f"{s}:{L}" for s, L in self.finite) or "none"
        return f"infinite tower at {self.infinite_start}; finite towers {fin}"


def tower_decomposition(c: AdmissibleComplex, ring="q") -> TowerDecomposition:
    """Recover the F[u]-module structure from degreewise dimensions and u-ranks."""
    ring = parse_ring(ring)
    if not ring.is_field:
        raise ValueError("tower decomposition needs field coefficients")
    c.require_admissible()
    lo, top = c.d_min, stabilization_bound(c)

    def r(n, a):
        if n < lo:
            return 0
        return u_map_rank(c, n, a, ring)

    infinite, finite = [], []
    for s in range(lo, top + 2):
        a_top = max(0, -(-(top - s) // 2))
        inf = r(s, a_top) - r(s - 2, a_top + 1)
        infinite += [s] * inf
        for L in range(1, a_top + 1):
            cnt = (r(s, L - 1) - r(s - 2, L)) - (r(s, L) - r(s - 2, L + 1))
            if cnt < 0:
                raise InternalInvariantError(f"negative tower count at {s}, length {L}")
            finite += [(s, L)] * cnt
    if len(infinite) != 1:
        raise InternalInvariantError(f"expected exactly one infinite tower, found starts {infinite}")
    for n in range(lo, top + 3):
        covered = sum(1 for s, L in finite if s <= n < s + 2 * L and (n - s) % 2 == 0)
        covered += sum(1 for s in infinite if s <= n and (n - s) % 2 == 0)
        if covered != r(n, 0):
            raise InternalInvariantError(f"towers give dimension {covered} in degree {n}, expected {r(n, 0)}")
    from .hinv import h_invariants

    hF = h_invariants(c, ring)[0]
    if infinite[0] != c.ell + 2 * hF:
        raise InternalInvariantError(
            f"infinite tower starts at {infinite[0]} but ell + 2h = {c.ell + 2 * hF}"
        )
    return TowerDecomposition(ring, infinite[0], tuple(sorted(finite)))


@dataclass(frozen=True)
class StableTate:
    ring: Ring
    even: int
    odd: int
    degrees: tuple = field(default=())

    def dims(self):
        return (self.even, self.odd)


def stable_tate(c: AdmissibleComplex, ring="q") -> StableTate:
    """Dimensions of the u-localised cohomology, read off in the periodic range."""
    ring = parse_ring(ring)
    if not ring.is_field:
        raise ValueError("stable Tate dimensions are reported over fields")
    c.require_admissible()
    n0 = stabilization_bound(c) + 1
    dims = {}
    for n in (n0, n0 + 1):
        h = cohomology_at(c, n, ring).dim
        if u_map_rank(c, n, 1, ring) != h:
            raise InternalInvariantError(f"u is not an isomorphism in stable degree {n}")
        dims[n % 2] = h
    return StableTate(ring, dims[0], dims[1], (n0, n0 + 1))


def uct_holds(c: GradedComplex, n: int, p: int) -> bool:
    """dim_{F_p} H^n = rank H^n(Z) + #{p | torsion of H^n} + #{p | torsion of H^{n+1}}."""
    hp = cohomology_at(c, n, f"f:{p}", check=False)
    hz = cohomology_at(c, n, "z", check=False)
    hz1 = cohomology_at(c, n + 1, "z", check=False)
    expected = hz.free_rank + sum(1 for d in hz.torsion if d % p == 0) + sum(1 for d in hz1.torsion if d % p == 0)
    hq = cohomology_at(c, n, "q", check=False)
    return hp.dim == expected and hq.dim == hz.free_rank
