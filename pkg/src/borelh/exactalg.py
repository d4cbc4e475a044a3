"""
Exact linear algebra over Z, Q and the prime fields F_p.

Matrices are plain lists of lists of Python ints (arbitrary precision);
:class:`IntMatrix` adds row/column labels for reporting.  Unless stated
otherwise a matrix acts on column vectors, so an ``m x n`` matrix is a map
Z^n -> Z^m.

>>> smith_normal_form([[2, 0], [0, 3]]).invariant_factors
[1, 6]
>>> rank([[2]], "f:2")
0
>>> cokernel_invariants([[1, 0], [0, 4]])
Cokernel(free_rank=0, torsion=[4])
"""

from __future__ import annotations

import os
from dataclasses import dataclass, field
from fractions import Fraction
from functools import lru_cache
from math import gcd

from sympy import isprime

from .errors import InternalInvariantError, InvalidRingError

# Transform identities are re-checked on every SNF call when enabled.
CHECK_TRANSFORMS = os.environ.get("BORELH_CHECK", "") not in ("", "0")


def set_check_mode(enabled: bool) -> None:
    global CHECK_TRANSFORMS
    CHECK_TRANSFORMS = bool(enabled)


# ---------------------------------------------------------------------------
# rings


@dataclass(frozen=True, order=True)
class Ring:
    """Coefficient ring tag: ``Z``, ``Q`` or ``F_p``.

    ``kind`` is one of ``"z"``, ``"q"``, ``"f"``; ``p`` is 0 unless ``kind == "f"``.
    """

    kind: str
    p: int = 0

    def __post_init__(self):
        if self.kind not in ("z", "q", "f"):
            raise InvalidRingError(f"unknown ring kind {self.kind!r}")
        if self.kind == "f":
            if not isinstance(self.p, int) or not isprime(self.p):
                raise InvalidRingError(f"F_p needs p prime, got {self.p!r}")
        elif self.p != 0:
            raise InvalidRingError(f"ring {self.kind!r} takes no characteristic")

    @property
    def is_field(self) -> bool:
        return self.kind != "z"

    @property
    def characteristic(self) -> int:
        return self.p

    @property
    def tag(self) -> str:
        return f"f:{self.p}" if self.kind == "f" else self.kind

    def __str__(self):
        return {"z": "Z", "q": "Q"}.get(self.kind, f"F_{self.p}")


ZZ = Ring("z")
QQ = Ring("q")


def GF(p: int) -> Ring:
    return Ring("f", p)


def parse_ring(spec) -> Ring:
    """Accept a :class:`Ring`, or the command-line names ``z``, ``q``, ``f:<p>``."""
    if isinstance(spec, Ring):
        return spec
    if isinstance(spec, int):
        return QQ if spec == 0 else GF(spec)
    s = str(spec).strip().lower()
    if s in ("z", "zz"):
        return ZZ
    if s in ("q", "qq", "f:0"):
        return QQ
    if s.startswith("f:"):
        try:
            p = int(s[2:])
        except ValueError:
            raise InvalidRingError(f"bad prime in ring name {spec!r}") from None
        return GF(p)
    raise InvalidRingError(f"unknown ring {spec!r} (expected z, q or f:<p>)")


# ---------------------------------------------------------------------------
# matrices


@dataclass(frozen=True)
class IntMatrix:
    rows: tuple
    cols: tuple
    entries: tuple  # tuple of row tuples

    def __post_init__(self):
        if len(self.entries) != len(self.rows):
            raise ValueError("entry rows do not match row labels")
        for r in self.entries:
            if len(r) != len(self.cols):
                raise ValueError("entry columns do not match column labels")

    @classmethod
    def from_lists(cls, data, rows=None, cols=None, ncols=None):
        data = [list(map(int, r)) for r in data]
        nr = len(data)
        nc = len(data[0]) if data else (ncols if ncols is not None else len(cols or ()))
        rows = tuple(rows) if rows is not None else tuple(range(nr))
        cols = tuple(cols) if cols is not None else tuple(range(nc))
        return cls(rows, cols, tuple(tuple(r) for r in data))

    @property
    def shape(self):
        return len(self.rows), len(self.cols)

    def __getitem__(self, ij):
        i, j = ij
        return self.entries[self.rows.index(i)][self.cols.index(j)]

    def to_lists(self):
        return [list(r) for r in self.entries]

    def transpose(self) -> "IntMatrix":
        nr, nc = self.shape
        ent = tuple(tuple(self.entries[i][j] for i in range(nr)) for j in range(nc))
        return IntMatrix(self.cols, self.rows, ent)


def as_lists(m) -> list[list[int]]:
    if isinstance(m, IntMatrix):
        return m.to_lists()
    return [list(r) for r in m]


def _shape(a, ncols=None):
    nr = len(a)
    nc = len(a[0]) if nr else (ncols or 0)
    return nr, nc


def identity(n: int) -> list[list[int]]:
    return [[int(i == j) for j in range(n)] for i in range(n)]


def matmul(a, b):
    if not a:
        return []
    inner = len(b)
    nc = len(b[0]) if b else 0
    out = []
    for row in a:
        new = [0] * nc
        for k in range(inner):
            x = row[k]
            if x:
                bk = b[k]
                for j in range(nc):
                    if bk[j]:
                        new[j] += x * bk[j]
        out.append(new)
    return out


def transpose(a, ncols=None):
    nr, nc = _shape(a, ncols)
    return [[a[i][j] for i in range(nr)] for j in range(nc)]


def determinant(a) -> int:
    """Bareiss fraction-free determinant."""
    n = len(a)
    if n == 0:
        return 1
    m = [list(r) for r in a]
    sign, prev = 1, 1
    for k in range(n - 1):
        if m[k][k] == 0:
            for i in range(k + 1, n):
                if m[i][k]:
                    m[k], m[i] = m[i], m[k]
                    sign = -sign
                    break
            else:
                return 0
        for i in range(k + 1, n):
            for j in range(k + 1, n):
                m[i][j] = (m[i][j] * m[k][k] - m[i][k] * m[k][j]) // prev
        prev = m[k][k]
    return sign * m[n - 1][n - 1]


# ---------------------------------------------------------------------------
# Smith normal form


@dataclass(frozen=True)
class SmithForm:
    """``left @ original @ right == diag(invariant_factors)`` padded with zeros."""

    invariant_factors: list
    left_transform: list
    right_transform: list
    shape: tuple = (0, 0)

    @property
    def rank(self) -> int:
        return len(self.invariant_factors)

    def diagonal(self):
        nr, nc = self.shape
        d = [[0] * nc for _ in range(nr)]
        for i, v in enumerate(self.invariant_factors):
            d[i][i] = v
        return d


def _swap_rows(m, i, j):
    m[i], m[j] = m[j], m[i]


def _swap_cols(m, i, j):
    for row in m:
        row[i], row[j] = row[j], row[i]


def _add_row(m, src, dst, q):
    # row[dst] += q * row[src]
    rs, rd = m[src], m[dst]
    for k, v in enumerate(rs):
        if v:
            rd[k] += q * v


def _add_col(m, src, dst, q):
    for row in m:
        v = row[src]
        if v:
            row[dst] += q * v


def smith_normal_form(m, ncols=None) -> SmithForm:
    """Smith normal form with unimodular transforms.

    Pivot is the entry of smallest absolute value in the active block, ties
    broken by (row, column); this keeps the transforms reproducible.
    """
    a = as_lists(m)
    nr, nc = _shape(a, ncols if ncols is not None else (len(m.cols) if isinstance(m, IntMatrix) else None))
    orig = [r[:] for r in a]
    L = identity(nr)
    R = identity(nc)
    t = 0
    while t < min(nr, nc):
        piv = None
        for i in range(t, nr):
            row = a[i]
            for j in range(t, nc):
                v = row[j]
                if v and (piv is None or abs(v) < piv[0]):
                    piv = (abs(v), i, j)
        if piv is None:
            break
        _, pi, pj = piv
        if pi != t:
            _swap_rows(a, t, pi)
            _swap_rows(L, t, pi)
        if pj != t:
            _swap_cols(a, t, pj)
            _swap_cols(R, t, pj)
        while True:
            p = a[t][t]
            for i in range(t + 1, nr):
                if a[i][t]:
                    q = a[i][t] // p
                    _add_row(a, t, i, -q)
                    _add_row(L, t, i, -q)
            for j in range(t + 1, nc):
                if a[t][j]:
                    q = a[t][j] // p
                    _add_col(a, t, j, -q)
                    _add_col(R, t, j, -q)
            # remainders left in row/column t: move the smallest to the pivot
            best = None
            for i in range(t + 1, nr):
                v = a[i][t]
                if v and (best is None or abs(v) < best[0]):
                    best = (abs(v), i, None)
            for j in range(t + 1, nc):
                v = a[t][j]
                if v and (best is None or abs(v) < best[0]):
                    best = (abs(v), None, j)
            if best is not None:
                _, bi, bj = best
                if bi is not None:
                    _swap_rows(a, t, bi)
                    _swap_rows(L, t, bi)
                else:
                    _swap_cols(a, t, bj)
                    _swap_cols(R, t, bj)
                continue
            bad = None
            for i in range(t + 1, nr):
                row = a[i]
                for j in range(t + 1, nc):
                    if row[j] % p:
                        bad = i
                        break
                if bad is not None:
                    break
            if bad is None:
                break
            _add_row(a, bad, t, 1)
            _add_row(L, bad, t, 1)
        if a[t][t] < 0:
            a[t] = [-v for v in a[t]]
            L[t] = [-v for v in L[t]]
        t += 1
    factors = [a[i][i] for i in range(min(nr, nc)) if a[i][i]]
    snf = SmithForm(factors, L, R, (nr, nc))
    if CHECK_TRANSFORMS:
        verify_smith_form(orig, snf)
    return snf


def verify_smith_form(original, snf: SmithForm, check_det: bool = False) -> None:
    a = as_lists(original)
    nr, nc = snf.shape
    prod = matmul(matmul(snf.left_transform, a), snf.right_transform) if nr and nc else []
    if nr and nc and prod != snf.diagonal():
        raise InternalInvariantError("SNF transform identity violated")
    fs = snf.invariant_factors
    for x, y in zip(fs, fs[1:]):
        if x <= 0 or y % x:
            raise InternalInvariantError(f"SNF divisibility chain broken: {fs}")
    if check_det:
        if abs(determinant(snf.left_transform)) != 1 or abs(determinant(snf.right_transform)) != 1:
            raise InternalInvariantError("SNF transform not unimodular")


@lru_cache(maxsize=4096)
def _snf_cached(key: tuple, nc: int) -> SmithForm:
    return smith_normal_form([list(r) for r in key], ncols=nc)


def snf_cached(a, ncols=None) -> SmithForm:
    """Memoised :func:`smith_normal_form`; callers must not mutate the result."""
    nr, nc = _shape(a, ncols)
    return _snf_cached(tuple(tuple(r) for r in a), nc)


# ---------------------------------------------------------------------------
# rank, kernels, cokernels


def _rank_mod_p(a, p: int) -> int:
    m = [[v % p for v in row] for row in a]
    nr, nc = _shape(m)
    r = 0
    for c in range(nc):
        piv = next((i for i in range(r, nr) if m[i][c]), None)
        if piv is None:
            continue
        m[r], m[piv] = m[piv], m[r]
        inv = pow(m[r][c], -1, p)
        pr = [(v * inv) % p for v in m[r]]
        m[r] = pr
        for i in range(nr):
            if i != r and m[i][c]:
                f = m[i][c]
                m[i] = [(x - f * y) % p for x, y in zip(m[i], pr)]
        r += 1
        if r == nr:
            break
    return r


def rank(m, ring="q") -> int:
    """Rank over Q (``ring`` ``z`` or ``q``) or of the mod-p reduction."""
    ring = parse_ring(ring)
    a = as_lists(m)
    if not a or not a[0]:
        return 0
    if ring.kind == "f":
        return _rank_mod_p(a, ring.p)
    return snf_cached(a).rank


@dataclass(frozen=True)
class Cokernel:
    free_rank: int
    torsion: list = field(default_factory=list)

    def __str__(self):
        parts = ["Z"] * self.free_rank + [f"Z/{d}" for d in self.torsion]
        return " + ".join(parts) if parts else "0"


def cokernel_invariants(m, nrows=None) -> Cokernel:
    """Cokernel of ``m: Z^cols -> Z^rows`` as free rank plus torsion factors."""
    a = as_lists(m)
    if isinstance(m, IntMatrix):
        nr, nc = m.shape
    else:
        nr = len(a) if nrows is None else nrows
        nc = len(a[0]) if a else 0
    if nr == 0:
        return Cokernel(0, [])
    if nc == 0:
        return Cokernel(nr, [])
    snf = snf_cached(a)
    return Cokernel(nr - snf.rank, [d for d in snf.invariant_factors if d > 1])


def kernel_basis_z(a, ncols: int) -> list[list[int]]:
    """Saturated Z-basis of ``{x : a x = 0}`` as a list of vectors."""
    if not a or ncols == 0:
        return identity(ncols)
    snf = snf_cached(a, ncols)
    R = snf.right_transform
    return [[R[i][j] for i in range(ncols)] for j in range(snf.rank, ncols)]


def _field_ops(ring: Ring):
    if ring.kind == "f":
        p = ring.p
        return (lambda v: v % p), (lambda v: pow(v, -1, p)), (lambda v: v % p)
    return (lambda v: Fraction(v)), (lambda v: 1 / v), (lambda v: v)


def nullspace(a, ncols: int, ring) -> list[list]:
    """Basis of the kernel of ``a`` over a field (ints mod p, or Fractions over Q)."""
    ring = parse_ring(ring)
    if not ring.is_field:
        raise InvalidRingError("nullspace needs a field; use kernel_basis_z over Z")
    conv, inv, norm = _field_ops(ring)
    m = [[conv(v) for v in row] for row in a]
    nr = len(m)
    pivots = []
    r = 0
    for c in range(ncols):
        piv = next((i for i in range(r, nr) if m[i][c]), None)
        if piv is None:
            continue
        m[r], m[piv] = m[piv], m[r]
        iv = inv(m[r][c])
        m[r] = [norm(x * iv) for x in m[r]]
        for i in range(nr):
            if i != r and m[i][c]:
                f = m[i][c]
                m[i] = [norm(x - f * y) for x, y in zip(m[i], m[r])]
        pivots.append(c)
        r += 1
        if r == nr:
            break
    free = [c for c in range(ncols) if c not in pivots]
    basis = []
    for fc in free:
        v = [conv(0)] * ncols
        v[fc] = conv(1)
        for row, pc in enumerate(pivots):
            v[pc] = norm(-m[row][fc])
        basis.append(v)
    return basis


def field_rank(a, ring) -> int:
    """Rank of a matrix whose entries already live in the field (ints or Fractions)."""
    ring = parse_ring(ring)
    if not a or not a[0]:
        return 0
    if ring.kind == "f":
        return _rank_mod_p(a, ring.p)
    # clear denominators row by row, then use the integral path
    rows = []
    for row in a:
        den = 1
        for v in row:
            if isinstance(v, Fraction):
                den = den * v.denominator // gcd(den, v.denominator)
        rows.append([int(v * den) for v in row])
    return snf_cached(rows).rank


def lattice_left_inverse(basis, dim: int) -> list[list[int]]:
    """Integer matrix sending each vector of a saturated lattice basis to its coordinates.

    ``basis`` is a list of k vectors in Z^dim spanning a saturated sublattice;
    the result is k x dim and maps ``basis[i]`` to the i-th unit vector.
    """
    k = len(basis)
    if k == 0:
        return []
    snf = snf_cached(transpose(basis, ncols=dim), k)  # dim x k
    if snf.invariant_factors != [1] * k:
        raise InternalInvariantError("lattice basis is not saturated")
    # left inverse R D^T L with D = [I_k; 0]
    L, R = snf.left_transform, snf.right_transform
    return matmul(R, [L[i] for i in range(k)])


def class_functional(d_in, d_out, dim: int) -> list[int]:
    """Integral coordinate on a rank-one cohomology group.

    ``d_in`` maps into and ``d_out`` out of a lattice Z^dim (column convention,
    ``d_in`` is ``dim x *`` and ``d_out`` is ``* x dim``).  If ker/im has free
    rank exactly one, return a row vector ``phi`` with ``phi . d_in == 0`` that
    maps the cocycles onto Z.  Returns None if the free rank is not one.
    """
    K = kernel_basis_z(d_out, dim)  # list of saturated kernel vectors
    k = len(K)
    if k == 0:
        return None
    left_inv = lattice_left_inverse(K, dim)
    ncols_in = len(d_in[0]) if d_in and d_in[0] else 0
    if ncols_in:
        coords = matmul(left_inv, d_in)  # k x ncols_in
        snf2 = snf_cached(coords, ncols_in)
        r2 = snf2.rank
        free_rows = [snf2.left_transform[i] for i in range(r2, k)]
    else:
        free_rows = identity(k)
    if len(free_rows) != 1:
        return None
    return matmul([free_rows[0]], left_inv)[0]


def prime_divisors(n: int) -> set[int]:
    from sympy import primefactors

    n = abs(int(n))
    return set(primefactors(n)) if n > 1 else set()
