"""Exact integer and rational linear algebra on lattices in Q^n.

Everything here works with Python ints and :class:`fractions.Fraction`;
there is no floating point anywhere in the package.

A :class:`Lattice` is a full-rank subgroup of Q^n given by generators.
It is stored in a canonical basis (Hermite normal form of the
denominator-cleared generator matrix, divided back), so two lattices
with the same span compare equal regardless of how they were given.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from functools import reduce
from math import gcd, lcm
from typing import Iterable, Sequence

from .errors import LatticeError, NotInLattice, NotSublattice, ZeroVector

IntMatrix = list[list[int]]
RatVector = tuple[Fraction, ...]


# ---------------------------------------------------------------------------
# small helpers

def to_fraction(x) -> Fraction:
    """Parse ints, Fractions and ``"p/q"`` strings. Floats are refused."""
    if isinstance(x, Fraction):
        return x
    if isinstance(x, bool):
        raise TypeError("booleans are not rationals")
    if isinstance(x, int):
        return Fraction(x)
    if isinstance(x, str):
        return Fraction(x.strip())
    raise TypeError(f"expected an exact rational, got {type(x).__name__}: {x!r}")


def rat_vector(v: Iterable) -> RatVector:
    return tuple(to_fraction(x) for x in v)


def dot(u: Sequence, v: Sequence):
    return sum((a * b for a, b in zip(u, v)), Fraction(0))


def common_denominator(values: Iterable[Fraction]) -> int:
    return lcm(*(x.denominator for x in values))


def rational_content(values: Sequence[Fraction]) -> Fraction:
    """gcd of numerators over lcm of denominators; ``x / content`` is primitive integral."""
    num = reduce(gcd, (x.numerator for x in values), 0)
    if num == 0:
        return Fraction(0)
    return Fraction(num, common_denominator(values))


def identity(n: int) -> IntMatrix:
    return [[int(i == j) for j in range(n)] for i in range(n)]


def mat_mul(A, B):
    """Product of two matrices given as nested sequences."""
    Bt = list(zip(*B))
    return [[sum(a * b for a, b in zip(row, col)) for col in Bt] for row in A]


def transpose(A):
    return [list(col) for col in zip(*A)]


def rational_inverse(A) -> list[list[Fraction]]:
    """Inverse of a square rational matrix by Gauss-Jordan elimination."""
    n = len(A)
    M = [[Fraction(x) for x in row] + [Fraction(int(i == j)) for j in range(n)]
         for i, row in enumerate(A)]
    for c in range(n):
        p = next((r for r in range(c, n) if M[r][c] != 0), None)
        if p is None:
            raise LatticeError("matrix is singular")
        M[c], M[p] = M[p], M[c]
        piv = M[c][c]
        M[c] = [x / piv for x in M[c]]
        for r in range(n):
            if r != c and M[r][c] != 0:
                f = M[r][c]
                M[r] = [a - f * b for a, b in zip(M[r], M[c])]
    return [row[n:] for row in M]


def determinant(A) -> Fraction:
    n = len(A)
    M = [[Fraction(x) for x in row] for row in A]
    det = Fraction(1)
    for c in range(n):
        p = next((r for r in range(c, n) if M[r][c] != 0), None)
        if p is None:
            return Fraction(0)
        if p != c:
            M[c], M[p] = M[p], M[c]
            det = -det
        det *= M[c][c]
        for r in range(c + 1, n):
            if M[r][c] != 0:
                f = M[r][c] / M[c][c]
                M[r] = [a - f * b for a, b in zip(M[r], M[c])]
    return det


def rank(A) -> int:
    M = [[Fraction(x) for x in row] for row in A]
    if not M:
        return 0
    rk, cols = 0, len(M[0])
    for c in range(cols):
        p = next((r for r in range(rk, len(M)) if M[r][c] != 0), None)
        if p is None:
            continue
        M[rk], M[p] = M[p], M[rk]
        for r in range(rk + 1, len(M)):
            if M[r][c] != 0:
                f = M[r][c] / M[rk][c]
                M[r] = [a - f * b for a, b in zip(M[r], M[rk])]
        rk += 1
    return rk


def kernel_vector(rows, n: int) -> RatVector | None:
    """A nonzero rational vector orthogonal to ``rows`` when the kernel is 1-dimensional."""
    M = [[Fraction(x) for x in row] for row in rows]
    pivots = []
    rk = 0
    for c in range(n):
        p = next((r for r in range(rk, len(M)) if M[r][c] != 0), None)
        if p is None:
            continue
        M[rk], M[p] = M[p], M[rk]
        piv = M[rk][c]
        M[rk] = [x / piv for x in M[rk]]
        for r in range(len(M)):
            if r != rk and M[r][c] != 0:
                f = M[r][c]
                M[r] = [a - f * b for a, b in zip(M[r], M[rk])]
        pivots.append(c)
        rk += 1
    free = [c for c in range(n) if c not in pivots]
    if len(free) != 1:
        return None
    f = free[0]
    v = [Fraction(0)] * n
    v[f] = Fraction(1)
    for i, c in enumerate(pivots):
        v[c] = -M[i][f]
    return tuple(v)


# ---------------------------------------------------------------------------
# normal forms

def hermite_normal_form(A: Sequence[Sequence[int]]) -> IntMatrix:
    """Row-style Hermite normal form; zero rows are dropped.

    Pivots are positive and entries above each pivot lie in ``[0, pivot)``,
    which makes the result unique for a given row span.
    """
    M = [list(map(int, row)) for row in A]
    if not M:
        return []
    ncols = len(M[0])
    p = 0
    for c in range(ncols):
        if p >= len(M):
            break
        while True:
            nz = [r for r in range(p, len(M)) if M[r][c] != 0]
            if not nz:
                break
            best = min(nz, key=lambda r: (abs(M[r][c]), r))
            M[p], M[best] = M[best], M[p]
            done = True
            for r in range(p + 1, len(M)):
                if M[r][c] != 0:
                    q = M[r][c] // M[p][c]
                    M[r] = [a - q * b for a, b in zip(M[r], M[p])]
                    if M[r][c] != 0:
                        done = False
            if done:
                break
        if M[p][c] == 0:
            continue
        if M[p][c] < 0:
            M[p] = [-x for x in M[p]]
        piv = M[p][c]
        for r in range(p):
            q = M[r][c] // piv
            if q:
                M[r] = [a - q * b for a, b in zip(M[r], M[p])]
        p += 1
    return [row for row in M[:p]]


def smith_normal_form(A: Sequence[Sequence[int]]) -> tuple[IntMatrix, IntMatrix, IntMatrix]:
    """Smith normal form ``(S, U, V)`` with ``U A V = S``.

    ``U`` and ``V`` are unimodular, ``S`` is diagonal with nonnegative
    entries ``s_1 | s_2 | ...``. The pivot at each stage is the nonzero
    entry of smallest absolute value in the remaining block, ties broken
    by lowest row, then lowest column, so the output is deterministic.
    """
    S = [list(map(int, row)) for row in A]
    m = len(S)
    n = len(S[0]) if m else 0
    U = identity(m)
    V = identity(n)

    def swap_rows(i, j):
        S[i], S[j] = S[j], S[i]
        U[i], U[j] = U[j], U[i]

    def swap_cols(i, j):
        for row in S:
            row[i], row[j] = row[j], row[i]
        for row in V:
            row[i], row[j] = row[j], row[i]

    def add_row(dst, src, q):  # row_dst -= q * row_src
        S[dst] = [a - q * b for a, b in zip(S[dst], S[src])]
        U[dst] = [a - q * b for a, b in zip(U[dst], U[src])]

    def add_col(dst, src, q):  # col_dst -= q * col_src
        for row in S:
            row[dst] -= q * row[src]
        for row in V:
            row[dst] -= q * row[src]

    for t in range(min(m, n)):
        while True:
            cands = [(abs(S[i][j]), i, j) for i in range(t, m) for j in range(t, n) if S[i][j]]
            if not cands:
                break
            _, i, j = min(cands)
            swap_rows(t, i)
            swap_cols(t, j)
            piv = S[t][t]
            clean = True
            for i in range(t + 1, m):
                if S[i][t]:
                    add_row(i, t, S[i][t] // piv)
                    clean = clean and S[i][t] == 0
            for j in range(t + 1, n):
                if S[t][j]:
                    add_col(j, t, S[t][j] // piv)
                    clean = clean and S[t][j] == 0
            if not clean:
                continue
            bad = next((i for i in range(t + 1, m)
                        if any(S[i][j] % piv for j in range(t + 1, n))), None)
            if bad is None:
                break
            add_row(t, bad, -1)
        if t < m and t < n and S[t][t] < 0:
            S[t] = [-x for x in S[t]]
            U[t] = [-x for x in U[t]]
    return S, U, V


def invariant_factors(A: Sequence[Sequence[int]]) -> list[int]:
    S, _, _ = smith_normal_form(A)
    return [S[i][i] for i in range(min(len(S), len(S[0]) if S else 0))]


# ---------------------------------------------------------------------------
# lattices

def _triangular_adjugate(H):
    """``(X, det)`` with ``X = det * H^{-1}`` for an upper triangular integer ``H``."""
    n = len(H)
    det = 1
    for i in range(n):
        det *= H[i][i]
    X = [[0] * n for _ in range(n)]
    for j in range(n):
        X[j][j] = det // H[j][j]
        for i in range(j - 1, -1, -1):
            acc = sum(H[i][k] * X[k][j] for k in range(i + 1, j + 1))
            X[i][j] = -acc // H[i][i]
    return X, det


_STANDARD: dict[int, "Lattice"] = {}


class Lattice:
    """A full-rank lattice in Q^n, stored in canonical Hermite basis."""

    __slots__ = ("basis", "_hash", "_adj", "_scale", "_dual")

    def __init__(self, generators: Iterable[Iterable]):
        rows = [rat_vector(g) for g in generators]
        if not rows:
            raise LatticeError("a lattice needs at least one generator")
        n = len(rows[0])
        if any(len(r) != n for r in rows):
            raise LatticeError("generators have inconsistent lengths")
        den = common_denominator(x for r in rows for x in r)
        H = hermite_normal_form([[int(x * den) for x in r] for r in rows])
        if len(H) != n:
            raise LatticeError(f"generators span rank {len(H)}, expected full rank {n}")
        self.basis: tuple[RatVector, ...] = tuple(
            tuple(Fraction(x, den) for x in row) for row in H)
        # B = H/den with H upper triangular, so B^{-1} = den * adj(H) / det(H)
        adj, det = _triangular_adjugate(H)
        g = reduce(gcd, (x for row in adj for x in row), 0)
        g = gcd(g * den, det)
        self._adj = tuple(tuple(x * den // g for x in row) for row in adj)
        self._scale = det // g
        self._hash = hash(self.basis)
        self._dual = None

    @classmethod
    def standard(cls, n: int) -> "Lattice":
        if n not in _STANDARD:
            _STANDARD[n] = cls(identity(n))
        return _STANDARD[n]

    @property
    def _inv(self) -> list[list[Fraction]]:
        return [[Fraction(x, self._scale) for x in row] for row in self._adj]

    @property
    def rank(self) -> int:
        return len(self.basis)

    def coords(self, v: Sequence) -> RatVector:
        """Coordinates of ``v`` in the canonical basis (row convention ``v = x B``)."""
        n = self.rank
        adj = self._adj
        den = lcm(*(x.denominator for x in v))
        w = [x.numerator * (den // x.denominator) for x in v]
        scale = self._scale * den
        return tuple(Fraction(sum(w[i] * adj[i][j] for i in range(n)), scale) for j in range(n))

    def from_coords(self, x: Sequence) -> RatVector:
        n = self.rank
        B = self.basis
        return tuple(sum((x[i] * B[i][j] for i in range(n)), Fraction(0)) for j in range(n))

    def contains(self, v: Sequence) -> bool:
        return all(c.denominator == 1 for c in self.coords(rat_vector(v)))

    def covolume(self) -> Fraction:
        return abs(determinant(self.basis))

    def is_sublattice_of(self, other: "Lattice") -> bool:
        return all(other.contains(b) for b in self.basis)

    def dual(self) -> "Lattice":
        if self._dual is None:
            self._dual = dual_lattice(self)
        return self._dual

    def __eq__(self, other):
        return isinstance(other, Lattice) and self.basis == other.basis

    def __hash__(self):
        return self._hash

    def __repr__(self):
        rows = ", ".join("(" + ", ".join(str(x) for x in r) + ")" for r in self.basis)
        return f"Lattice([{rows}])"


@dataclass(frozen=True)
class FiniteAbelianGroup:
    """Finite abelian group by invariant factors ``d_1 | d_2 | ...``, each > 1."""

    factors: tuple[int, ...] = ()

    def __post_init__(self):
        fs = tuple(int(d) for d in self.factors)
        if any(d <= 1 for d in fs):
            raise ValueError(f"invariant factors must exceed 1: {fs}")
        if any(b % a for a, b in zip(fs, fs[1:])):
            raise ValueError(f"invariant factors must form a divisibility chain: {fs}")
        object.__setattr__(self, "factors", fs)

    @property
    def order(self) -> int:
        out = 1
        for d in self.factors:
            out *= d
        return out

    @property
    def rank(self) -> int:
        return len(self.factors)

    def is_trivial(self) -> bool:
        return not self.factors

    @classmethod
    def from_diagonal(cls, diagonal: Iterable[int]) -> "FiniteAbelianGroup":
        return cls(tuple(d for d in diagonal if d > 1))


def dual_lattice(N: Lattice) -> Lattice:
    """``M = {m : <m, v> in Z for all v in N}``: rows of the inverse transpose."""
    inv = N._inv
    n = N.rank
    return Lattice([[inv[j][i] for j in range(n)] for i in range(n)])


def overlattice_quotient(N: Lattice, N_prime: Lattice) -> FiniteAbelianGroup:
    """Invariant factors of ``N'/N`` for ``N`` contained in ``N'``."""
    rows = []
    for b in N.basis:
        x = N_prime.coords(b)
        if any(c.denominator != 1 for c in x):
            raise NotSublattice(f"generator {tuple(map(str, b))} of N is not in N'")
        rows.append([int(c) for c in x])
    return FiniteAbelianGroup.from_diagonal(invariant_factors(rows))


def primitive_generator(v: Sequence, N: Lattice) -> RatVector:
    """First nonzero lattice point of ``N`` on the ray ``Q>=0 * v``."""
    v = rat_vector(v)
    if all(x == 0 for x in v):
        raise ZeroVector("the zero vector spans no ray")
    c = rational_content(N.coords(v))
    return tuple(x / c for x in v)


def primitive_on_ray(v: Sequence, N: Lattice) -> tuple[RatVector, int]:
    """Return ``(v0, r)`` with ``v0`` primitive on the ray of ``v`` and ``v = r v0``.

    Raises :class:`NotInLattice` (carrying ``v0``) when ``v`` is not in ``N``.
    """
    v = rat_vector(v)
    if all(x == 0 for x in v):
        raise ZeroVector("the zero vector spans no ray")
    c = rational_content(N.coords(v))
    v0 = tuple(x / c for x in v)
    if c.denominator != 1:
        raise NotInLattice(f"{tuple(map(str, v))} is not in the lattice", primitive=v0)
    return v0, int(c)
