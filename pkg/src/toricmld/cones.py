"""Pointed rational polyhedral cones and fans.

A :class:`Cone` lives in ``N ⊗ Q`` for a :class:`~toricmld.lattice.Lattice`
``N``. Rays are stored as primitive lattice vectors in ambient
coordinates and sorted lexicographically; facet normals are primitive in
the dual lattice ``M``. Pairings are plain dot products in ambient
coordinates.
"""

from __future__ import annotations

import itertools
from fractions import Fraction
from math import ceil, floor, gcd, lcm
from typing import Iterable, Sequence

from .errors import (CapExceeded, DegenerateCone, NotInterior, NotPrimitive,
                     UnboundedSlice)
from .lattice import (Lattice, RatVector, common_denominator, dot, kernel_vector,
                      primitive_generator, primitive_on_ray, rank, rat_vector,
                      rational_inverse, smith_normal_form)

DEFAULT_HILBERT_CAP = 20000


def _direction_key(v: Sequence[Fraction]) -> tuple:
    """Scale-invariant key: the primitive integer vector on the ray of ``v``."""
    den = lcm(*(x.denominator for x in v))
    w = [x.numerator * (den // x.denominator) for x in v]
    g = gcd(*w)
    return tuple(x // g for x in w)


def _facets_simplicial(rays):
    inv = rational_inverse(rays)
    n = len(rays)
    return [tuple(inv[i][j] for i in range(n)) for j in range(n)]


def _facets_double_description(rays, n):
    """Facet normals of ``cone(rays)`` via the double description method.

    Seeds with a simplicial subcone on ``n`` independent rays, then adds the
    remaining rays one at a time, combining adjacent normals across the new
    hyperplane. Adjacency is the combinatorial test on zero sets.
    """
    chosen = []
    for i in range(len(rays)):
        if rank([rays[j] for j in chosen + [i]]) == len(chosen) + 1:
            chosen.append(i)
        if len(chosen) == n:
            break
    normals = _facets_simplicial([rays[i] for i in chosen])
    # zero set of each normal, in terms of processed ray indices
    zeros = [frozenset(chosen[k] for k in range(n) if k != j) for j in range(n)]
    processed = list(chosen)
    for i in range(len(rays)):
        if i in chosen:
            continue
        r = rays[i]
        vals = [dot(u, r) for u in normals]
        pos = [k for k, s in enumerate(vals) if s > 0]
        neg = [k for k, s in enumerate(vals) if s < 0]
        zer = [k for k, s in enumerate(vals) if s == 0]
        new_normals = [normals[k] for k in pos + zer]
        new_zeros = [zeros[k] | {i} if vals[k] == 0 else zeros[k] for k in pos + zer]
        for p in pos:
            for q in neg:
                common = zeros[p] & zeros[q]
                if len(common) < n - 2:
                    continue
                if any(common <= zeros[s] for s in range(len(normals)) if s not in (p, q)):
                    continue
                if rank([rays[j] for j in common]) != n - 2:
                    continue
                a, b = vals[p], vals[q]
                u = tuple(a * x - b * y for x, y in zip(normals[q], normals[p]))
                new_normals.append(u)
                new_zeros.append(common | {i})
        normals, zeros = new_normals, new_zeros
        processed.append(i)
    return normals


class Cone:
    """A pointed, full-dimensional rational polyhedral cone.

    Parameters
    ----------
    generators : iterable of rational vectors
        Any generating set; it is reduced to the extremal rays, each
        replaced by its primitive generator in ``lattice``.
    lattice : Lattice, optional
        Defaults to the standard lattice ``Z^n``.
    """

    def __init__(self, generators: Iterable[Iterable], lattice: Lattice | None = None):
        gens = [rat_vector(g) for g in generators]
        if not gens:
            raise DegenerateCone("a cone needs at least one generator")
        n = len(gens[0])
        if lattice is None:
            lattice = Lattice.standard(n)
        if lattice.rank != n:
            raise DegenerateCone("generator length differs from the lattice rank")
        self.lattice = lattice
        self.dim = n
        if any(all(x == 0 for x in g) for g in gens):
            gens = [g for g in gens if any(x != 0 for x in g)]
        # drop repeated directions
        seen = {}
        for g in gens:
            seen.setdefault(_direction_key(g), g)
        gens = list(seen.values())
        if rank(gens) != n:
            raise DegenerateCone("cone is not full-dimensional")
        if len(gens) == n:
            normals = _facets_simplicial(gens)
        else:
            normals = _facets_double_description(gens, n)
        if rank(normals) != n:
            raise DegenerateCone("cone is not pointed")
        M = lattice.dual()
        normals = {_direction_key(u): primitive_generator(u, M) for u in normals}
        self.facet_normals: tuple[RatVector, ...] = tuple(sorted(normals.values()))
        # keep extremal generators only
        extremal = []
        for g in gens:
            tight = [u for u in self.facet_normals if dot(u, g) == 0]
            if rank(tight) == n - 1:
                extremal.append(primitive_generator(g, lattice))
        self.rays: tuple[RatVector, ...] = tuple(sorted(extremal))
        self._ray_lookup = {_direction_key(v): i for i, v in enumerate(self.rays)}
        self._cosets = None

    # -- basic queries ------------------------------------------------------

    @property
    def is_simplicial(self) -> bool:
        return len(self.rays) == self.dim

    def contains(self, v: Sequence) -> bool:
        return all(dot(u, v) >= 0 for u in self.facet_normals)

    def relint_contains(self, v: Sequence) -> bool:
        return relint_contains(self, v)

    def ray_index(self, v: Sequence) -> int:
        """Index of the ray through ``v`` (any positive multiple); ``KeyError`` otherwise."""
        return self._ray_lookup[_direction_key(rat_vector(v))]

    def facet_rays(self, u: Sequence) -> tuple[RatVector, ...]:
        return tuple(v for v in self.rays if dot(u, v) == 0)

    def with_lattice(self, lattice: Lattice) -> "Cone":
        """Same cone, rays re-normalized as primitive vectors of ``lattice``."""
        if lattice.rank != self.dim:
            raise DegenerateCone("generator length differs from the lattice rank")
        # the facet directions do not depend on the lattice
        out = object.__new__(Cone)
        out.lattice = lattice
        out.dim = self.dim
        M = lattice.dual()
        out.facet_normals = tuple(sorted(primitive_generator(u, M) for u in self.facet_normals))
        out.rays = tuple(sorted(primitive_generator(v, lattice) for v in self.rays))
        out._ray_lookup = {_direction_key(v): i for i, v in enumerate(out.rays)}
        out._cosets = None
        return out

    def __eq__(self, other):
        return (isinstance(other, Cone) and self.lattice == other.lattice
                and self.rays == other.rays)

    def __hash__(self):
        return hash((self.lattice, self.rays))

    def __repr__(self):
        rays = ", ".join("(" + ", ".join(map(str, v)) + ")" for v in self.rays)
        return f"Cone([{rays}])"

    # -- fundamental parallelepiped (simplicial cones) ----------------------

    def parallelepiped(self):
        """Cosets of the sublattice spanned by the rays, for a simplicial cone.

        Returns ``(det, reps)`` where each rep is an integer vector ``L`` with
        ``0 <= L_i < det``; the lattice points of the cone are exactly
        ``sum((L_i/det + k_i) * ray_i)`` over reps and ``k >= 0``.
        """
        if self._cosets is not None:
            return self._cosets
        if not self.is_simplicial:
            raise DegenerateCone("parallelepiped decomposition needs a simplicial cone")
        n = self.dim
        C = [[int(x) for x in self.lattice.coords(v)] for v in self.rays]
        S, U, _ = smith_normal_form(C)
        diag = [S[i][i] for i in range(n)]
        det = 1
        for d in diag:
            det *= d
        reps = [tuple([0] * n)]
        for i, s in enumerate(diag):
            if s == 1:
                continue
            step = [(det // s) * U[i][j] % det for j in range(n)]
            grown = []
            for L in reps:
                cur = list(L)
                for _ in range(s):
                    grown.append(tuple(cur))
                    cur = [(a + b) % det for a, b in zip(cur, step)]
            reps = grown
        self._cosets = (det, reps)
        return self._cosets


class Fan:
    """A collection of maximal cones sharing an ambient lattice."""

    def __init__(self, cones: Iterable[Cone]):
        self.cones: tuple[Cone, ...] = tuple(cones)
        if not self.cones:
            raise ValueError("a fan needs at least one cone")
        self.lattice = self.cones[0].lattice
        if any(c.lattice != self.lattice for c in self.cones):
            raise ValueError("all cones of a fan must share the lattice")
        rays = {}
        for c in self.cones:
            for v in c.rays:
                rays.setdefault(_direction_key(v), v)
        self.rays: tuple[RatVector, ...] = tuple(sorted(rays.values()))

    @property
    def dim(self) -> int:
        return self.lattice.rank

    def is_valid(self) -> bool:
        """Pairwise check that cones meet along a common face."""
        return all(_meet_in_face(a, b)
                   for a, b in itertools.combinations(self.cones, 2))

    def support_contains(self, v: Sequence) -> bool:
        return any(c.contains(v) for c in self.cones)

    def __repr__(self):
        return f"Fan({list(self.cones)!r})"


def _intersection_rays(a: Cone, b: Cone) -> list[RatVector]:
    n = a.dim
    H = list(a.facet_normals) + list(b.facet_normals)
    if n == 1:
        return list(a.rays) if a.rays == b.rays else []
    found = {}
    for sub in itertools.combinations(H, n - 1):
        k = kernel_vector(sub, n)
        if k is None:
            continue
        for cand in (k, tuple(-x for x in k)):
            if all(dot(u, cand) >= 0 for u in H):
                found.setdefault(_direction_key(cand), cand)
    return list(found.values())


def _is_face(cone: Cone, rays_of_subcone: list) -> bool:
    tight = [u for u in cone.facet_normals
             if all(dot(u, v) == 0 for v in rays_of_subcone)]
    smallest_face = [v for v in cone.rays if all(dot(u, v) == 0 for u in tight)]
    keys = {_direction_key(v) for v in rays_of_subcone}
    return all(_direction_key(v) in keys for v in smallest_face)


def _meet_in_face(a: Cone, b: Cone) -> bool:
    inter = _intersection_rays(a, b)
    # every extremal ray of the intersection that is a ray of a face must show up
    return _is_face(a, inter) and _is_face(b, inter)


# ---------------------------------------------------------------------------
# operations

def dual_cone(sigma: Cone) -> Cone:
    """The dual cone in ``M ⊗ Q``, generated by the facet normals of ``sigma``."""
    return Cone(sigma.facet_normals, sigma.lattice.dual())


def relint_contains(sigma: Cone, v: Sequence) -> bool:
    v = rat_vector(v)
    return all(dot(u, v) > 0 for u in sigma.facet_normals)


def _sort_key(m):
    return lambda v: (dot(m, v), v)


def slice_lattice_points(sigma: Cone, m: Sequence, c) -> list[RatVector]:
    """All ``v`` in ``sigma ∩ N`` with ``0 < <m, v> <= c``.

    Ordered by ``<m, v>`` then lexicographically. ``m`` must be strictly
    positive on every ray so the slice is bounded.
    """
    m = rat_vector(m)
    c = Fraction(c)
    weights = [dot(m, v) for v in sigma.rays]
    if any(w <= 0 for w in weights):
        raise UnboundedSlice("functional is not strictly positive on every ray")
    if c <= 0:
        return []
    if sigma.is_simplicial:
        pts = _slice_simplicial(sigma, weights, c)
    else:
        pts = _slice_box_scan(sigma, m, weights, c)
    pts.sort(key=_sort_key(m))
    return pts


def _slice_simplicial(sigma, weights, c):
    det, reps = sigma.parallelepiped()
    n = sigma.dim
    rays = sigma.rays
    out = []
    for L in reps:
        base = [Fraction(x, det) for x in L]
        start = sum((b * w for b, w in zip(base, weights)), Fraction(0))
        budget = c - start
        if budget < 0:
            continue

        def rec(i, k, left):
            if i == n:
                lam = [b + kk for b, kk in zip(base, k)]
                if any(x for x in lam):
                    out.append(tuple(sum((lam[j] * rays[j][t] for j in range(n)), Fraction(0))
                                     for t in range(n)))
                return
            top = floor(left / weights[i])
            for kk in range(top + 1):
                rec(i + 1, k + [kk], left - kk * weights[i])

        rec(0, [], budget)
    return out


def _slice_box_scan(sigma, m, weights, c):
    """Bounding box of the slice polytope in the lattice basis, then a scan."""
    N = sigma.lattice
    n = sigma.dim
    verts = [tuple([Fraction(0)] * n)] + [
        tuple(x * c / w for x in N.coords(v)) for v, w in zip(sigma.rays, weights)]
    lo = [floor(min(p[i] for p in verts)) for i in range(n)]
    hi = [ceil(max(p[i] for p in verts)) for i in range(n)]
    # pair everything in lattice coordinates with integers
    phi = [[int(dot(b, u)) for b in N.basis] for u in sigma.facet_normals]
    m_coords = [dot(b, m) for b in N.basis]
    den = common_denominator(m_coords)
    mu = [int(x * den) for x in m_coords]
    cap = c * den
    out = []
    for x in itertools.product(*(range(a, b + 1) for a, b in zip(lo, hi))):
        val = sum(a * b for a, b in zip(mu, x))
        if val <= 0 or val > cap:
            continue
        if all(sum(a * b for a, b in zip(f, x)) >= 0 for f in phi):
            out.append(N.from_coords(x))
    return out


def hilbert_basis(sigma: Cone, N: Lattice | None = None, cap: int = DEFAULT_HILBERT_CAP):
    """Minimal generating set of the monoid ``sigma ∩ N``.

    Candidates are the monoid points of degree at most the sum of the ray
    degrees (a bound covering the parallelepiped of every simplicial piece),
    where the degree is the sum of the facet normals. Reducible candidates
    are then pruned.
    """
    if N is not None and N != sigma.lattice:
        sigma = sigma.with_lattice(N)
    f = tuple(sum(col, Fraction(0)) for col in zip(*sigma.facet_normals))
    bound = sum((dot(f, v) for v in sigma.rays), Fraction(0))
    cands = slice_lattice_points(sigma, f, bound)
    if len(cands) > cap:
        raise CapExceeded(f"{len(cands)} Hilbert basis candidates exceed the cap {cap}", cap)
    pool = set(cands)
    basis = []
    for v in cands:  # ascending degree
        dv = dot(f, v)
        if any(dot(f, h) < dv and tuple(a - b for a, b in zip(v, h)) in pool for h in basis):
            continue
        basis.append(v)
    return sorted(basis)


def star_subdivision(sigma: Cone, v: Sequence) -> Fan:
    """Insert the ray through ``v``: one maximal cone ``cone(F, v)`` per facet ``F``."""
    v = rat_vector(v)
    if not relint_contains(sigma, v):
        raise NotInterior(f"{tuple(map(str, v))} is not in the relative interior")
    _, r = primitive_on_ray(v, sigma.lattice)
    if r != 1:
        raise NotPrimitive(f"{tuple(map(str, v))} is {r} times a lattice point")
    cones = [Cone(list(sigma.facet_rays(u)) + [v], sigma.lattice)
             for u in sigma.facet_normals]
    return Fan(cones)
