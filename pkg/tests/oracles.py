"""Brute-force oracles, deliberately independent of the library's algorithms."""

from __future__ import annotations

import itertools
import math
from fractions import Fraction

import numpy as np
import sympy


def sympy_invariant_factors(A):
    """Nonzero diagonal of the Smith form as computed by sympy."""
    from sympy.matrices.normalforms import smith_normal_form
    S = smith_normal_form(sympy.Matrix(A), domain=sympy.ZZ)
    return [abs(int(S[i, i])) for i in range(min(S.shape)) if S[i, i] != 0]


def _to_sym(x):
    x = Fraction(x)
    return sympy.Rational(x.numerator, x.denominator)


def lattice_basis_inverse(generators):
    """Inverse of a basis of the lattice spanned by ``generators``, via sympy's HNF."""
    from sympy.matrices.normalforms import hermite_normal_form
    n = len(generators[0])
    den = math.lcm(*(Fraction(x).denominator for g in generators for x in g))
    M = sympy.Matrix([[int(Fraction(x) * den) for x in g] for g in generators])
    H = hermite_normal_form(M.T)  # columns span the same lattice as the rows of M
    cols = [H[:, j] for j in range(H.shape[1]) if any(H[:, j])]
    assert len(cols) == n
    basis = sympy.Matrix.hstack(*cols).T / den
    inv = basis.inv()
    return [[Fraction(int(inv[i, j].p), int(inv[i, j].q)) for j in range(n)] for i in range(n)]


def in_lattice(v, generators, inverse=None):
    """Whether ``v`` has integral coordinates in a basis of the lattice."""
    inv = inverse or lattice_basis_inverse(generators)
    n = len(v)
    return all(sum((Fraction(v[i]) * inv[i][j] for i in range(n)), Fraction(0)).denominator == 1
               for j in range(n))


def group_key(r: int, a1: int, a2: int):
    """The subgroup of ``(Z/r)^2`` generated by ``(a1, a2)``, reduced to its own order."""
    g = math.gcd(r, a1, a2)
    r, a1, a2 = r // g, a1 // g, a2 // g
    return r, frozenset(((j * a1) % r, (j * a2) % r) for j in range(r))


_DENSE_CACHE: dict = {}


def mld_cyclic_dense(r: int, a1: int, a2: int, boundary: bool = True) -> Fraction:
    """Memoized on the generated group, see :func:`_mld_cyclic_dense`."""
    key = (group_key(r, a1, a2), boundary)
    if key not in _DENSE_CACHE:
        _DENSE_CACHE[key] = _mld_cyclic_dense(r, a1, a2, boundary)
    return _DENSE_CACHE[key]


def _mld_cyclic_dense(r: int, a1: int, a2: int, boundary: bool = True) -> Fraction:
    """mld of ``1/r(a1, a2)`` by scanning the grid ``(1/r) Z^2``.

    Lattice points of ``N' = Z^2 + Z (a1, a2)/r`` are the grid points
    ``(x, y)/r`` for which ``(x, y) = j (a1, a2) mod r`` for some ``j``;
    this is tested for all ``j`` with numpy. The axis generators of ``N'``
    are found by scanning. With ``boundary`` the pair is the log quotient
    (axis ``i`` gets coefficient ``1 - 1/k_i`` where ``k_i`` is its
    ramification index), otherwise the quotient variety with no boundary.
    The box reaches ``<m, (1, 1)>``, the value at an interior point.
    """

    def member(x, y):
        return any((x - j * a1) % r == 0 and (y - j * a2) % r == 0 for j in range(r))

    ax = min(x for x in range(1, r + 1) if member(x, 0))
    ay = min(y for y in range(1, r + 1) if member(0, y))
    k1, k2 = r // ax, r // ay
    w1, w2 = (Fraction(1, k1), Fraction(1, k2)) if boundary else (Fraction(1), Fraction(1))
    m1, m2 = w1 * Fraction(r, ax), w2 * Fraction(r, ay)
    top = m1 + m2
    X, Y = np.meshgrid(np.arange(1, math.floor(r * top / m1) + 1),
                       np.arange(1, math.floor(r * top / m2) + 1), indexing="ij")
    inside = np.zeros(X.shape, dtype=bool)
    for j in range(r):
        inside |= ((X - j * a1) % r == 0) & ((Y - j * a2) % r == 0)
    D = math.lcm(m1.denominator, m2.denominator)
    vals = np.where(inside, int(m1 * D) * X + int(m2 * D) * Y, np.iinfo(np.int64).max)
    return Fraction(int(vals.min()), r * D)


def slice_points_box(rays, lattice_generators, m, c):
    """Points ``v`` of ``cone(rays)`` with ``0 < <m, v> <= c`` by a grid scan.

    Lattice points lie on ``(1/d) Z^n`` with ``d`` the common denominator of
    the generators. The scan covers the box containing every combination
    ``sum l_i v_i`` with ``<m, v_i> l_i <= c``. Cone membership solves for
    the coefficients with a sympy inverse, so ``rays`` must be independent.
    """
    n = len(rays)
    d = math.lcm(*(Fraction(x).denominator for g in lattice_generators for x in g))
    R = sympy.Matrix([[_to_sym(x) for x in v] for v in rays]).T
    Rinv = R.inv()
    Rinv = [[Fraction(int(Rinv[i, j].p), int(Rinv[i, j].q)) for j in range(n)] for i in range(n)]
    inv = lattice_basis_inverse(lattice_generators)
    pair = lambda u: sum((Fraction(a) * Fraction(b) for a, b in zip(m, u)), Fraction(0))
    box = [Fraction(0)] * n
    for v in rays:
        b = Fraction(c) / pair(v)
        for i in range(n):
            box[i] = max(box[i], abs(Fraction(v[i])) * b)
    ranges = [range(-math.ceil(bx * d), math.ceil(bx * d) + 1) for bx in box]
    out = []
    for pt in itertools.product(*ranges):
        v = tuple(Fraction(x, d) for x in pt)
        if not 0 < pair(v) <= c:
            continue
        lam = [sum((Rinv[i][j] * v[j] for j in range(n)), Fraction(0)) for i in range(n)]
        if any(x < 0 for x in lam) or not in_lattice(v, None, inv):
            continue
        out.append(v)
    return sorted(out, key=lambda v: (pair(v), v))


def cartier_index_by_search(m, basis, bound=10 ** 6) -> int:
    """Least ``l`` with ``l <m, b>`` integral for every basis vector, by counting up."""
    pairings = [sum((Fraction(a) * Fraction(b) for a, b in zip(m, g)), Fraction(0)) for g in basis]
    for l in range(1, bound + 1):
        if all((l * p).denominator == 1 for p in pairings):
            return l
    raise AssertionError("no index below the bound")


def max_finite_order(n: int) -> int:
    """Largest order of a finite-order matrix in ``GL_n(Z)``.

    Such a matrix is a block sum of companion matrices of cyclotomic
    polynomials ``Phi_m`` (degree ``phi(m)``), plus possibly ``-1`` blocks;
    its order is the lcm of the ``m``. Search all multisets of ``m`` with
    total degree at most ``n``.
    """
    degs = {m: sympy.totient(m) for m in range(1, 20 * n + 3)}
    best = 1

    def rec(start, budget, current):
        nonlocal best
        best = max(best, current)
        for m in range(start, len(degs) + 1):
            if degs[m] <= budget:
                rec(m + 1, budget - degs[m], math.lcm(current, m))

    rec(1, n, 1)
    return int(best)


def hilbert_basis_brute(rays, bound):
    """Irreducible elements of ``cone(rays) ∩ Z^2`` with coordinates bounded by ``bound``."""
    (a, b), (c, d) = rays
    det = a * d - b * c

    def inside(x, y):
        # coefficients in the ray basis, scaled by det
        l1 = (x * d - y * c) * (1 if det > 0 else -1)
        l2 = (a * y - b * x) * (1 if det > 0 else -1)
        return l1 >= 0 and l2 >= 0

    pts = [(x, y) for x in range(-bound, bound + 1) for y in range(-bound, bound + 1)
           if (x, y) != (0, 0) and inside(x, y)]
    pset = set(pts)
    irreducible = []
    for p in pts:
        if not any((p[0] - q[0], p[1] - q[1]) in pset for q in pts if q != p):
            irreducible.append(p)
    return sorted(irreducible)


def closure_naive(generators, n):
    """Group closure over pairs ``(g, t)`` with plain Fraction arithmetic."""
    ident = tuple(tuple(int(i == j) for j in range(n)) for i in range(n))

    def mul(x, y):
        g1, t1 = x
        g2, t2 = y
        g = tuple(tuple(sum(g1[i][k] * g2[k][j] for k in range(n)) for j in range(n))
                  for i in range(n))
        t = tuple((t1[i] + sum(g1[i][k] * t2[k] for k in range(n))) % 1 for i in range(n))
        return g, t

    gens = [(tuple(map(tuple, g)), tuple(Fraction(x) % 1 for x in t)) for g, t in generators]
    elems = {(ident, (Fraction(0),) * n)}
    frontier = list(elems)
    while frontier:
        new = []
        for x in frontier:
            for s in gens:
                y = mul(x, s)
                if y not in elems:
                    elems.add(y)
                    new.append(y)
        frontier = new
    return elems


def cyclic_cartier_index(r: int, weights) -> int:
    """Cartier index of the log quotient of ``A^n`` by ``1/r(weights)``.

    The log quotient keeps the functional ``(1, ..., 1)``; it is Cartier
    with multiplier ``l`` when ``l`` times its pairing with each generator
    ``e_i`` and ``a/r`` of the overlattice is integral.
    """
    n = len(weights)
    gens = [tuple(int(i == j) for j in range(n)) for i in range(n)]
    gens.append(tuple(Fraction(a, r) for a in weights))
    return cartier_index_by_search((1,) * n, gens)


def functional_sympy(rays, coefficients):
    """Solve ``<m, v_i> = 1 - b_i`` for all rays with sympy; None if inconsistent."""
    n = len(rays[0])
    m = sympy.symbols(f"m0:{n}")
    eqs = [sum(_to_sym(x) * s for x, s in zip(v, m)) - (1 - _to_sym(b))
           for v, b in zip(rays, coefficients)]
    sol = sympy.linsolve(eqs, m)
    if not sol:
        return None
    (vals,) = sol
    if any(val.free_symbols for val in vals):
        raise AssertionError("rays do not span")
    return tuple(Fraction(int(val.p), int(val.q)) for val in vals)


def content_in(v, inverse) -> Fraction:
    """Largest ``k`` with ``v / k`` in the lattice whose basis inverse is given."""
    n = len(v)
    coords = [sum((Fraction(v[i]) * inverse[i][j] for i in range(n)), Fraction(0))
              for j in range(n)]
    num = math.gcd(*(c.numerator for c in coords))
    den = math.lcm(*(c.denominator for c in coords))
    return Fraction(num, den)


def naive_mul(x, y):
    """Semidirect product of ``(g, t)`` pairs with Fraction torsion reduced mod 1."""
    (g1, t1), (g2, t2) = x, y
    n = len(t1)
    g = tuple(tuple(sum(g1[i][k] * g2[k][j] for k in range(n)) for j in range(n))
              for i in range(n))
    t = tuple((t1[i] + sum(g1[i][k] * t2[k] for k in range(n))) % 1 for i in range(n))
    return g, t


def naive_inverse(x):
    g, t = x
    inv = sympy.Matrix(g).inv()
    n = len(t)
    gi = tuple(tuple(int(inv[i, j]) for j in range(n)) for i in range(n))
    return gi, tuple((-sum(gi[i][k] * t[k] for k in range(n))) % 1 for i in range(n))


def cyclic_subgroup(x):
    n = len(x[1])
    one = (tuple(tuple(int(i == j) for j in range(n)) for i in range(n)), (Fraction(0),) * n)
    out, y = {one}, x
    while y != one:
        out.add(y)
        y = naive_mul(y, x)
    return frozenset(out)
