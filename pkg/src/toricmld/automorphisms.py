"""Fan automorphisms and finite outer-toric groups.

An outer toric automorphism of ``X_sigma`` is a pair ``(g, t)``: a lattice
automorphism ``g`` permuting the cones of the fan, and a torus element
``t``. Only torsion points ``t ∈ (N ⊗ Q)/N`` are representable, which is
exactly what finite groups need. Everything is expressed in the
coordinates of the canonical basis of ``N``: ``g`` is an integer matrix
acting on coordinate columns, ``t`` a vector of fractions in ``[0, 1)``.

Composition is the semidirect law ``(g1, t1)(g2, t2) = (g1 g2, t1 + g1 t2)``.
"""

from __future__ import annotations

import itertools
from collections import deque
from dataclasses import dataclass
from fractions import Fraction
from typing import Iterable, Sequence

from .cones import Cone, Fan, relint_contains
from .errors import (CapExceeded, DegenerateCone, NotInterior, NotPrimitive, OrderCapExceeded,
                     OutOfRange, VerificationFailure)
from .lattice import (Lattice, common_denominator, determinant, hermite_normal_form, identity,
                      overlattice_quotient, primitive_on_ray, rank, rat_vector, rational_inverse,
                      smith_normal_form)

IntMat = tuple[tuple[int, ...], ...]

# Largest order of a finite-order element of GL_n(Z).
_MAX_ORDER = {1: 2, 2: 6, 3: 6, 4: 12, 5: 12, 6: 30}

DEFAULT_GROUP_CAP = 10_000


def _matmul(A, B) -> IntMat:
    return tuple(tuple(sum(a * b for a, b in zip(row, col)) for col in zip(*B)) for row in A)


def _matvec(A, x):
    return tuple(sum((a * b for a, b in zip(row, x)), Fraction(0)) for row in A)


def _identity(n) -> IntMat:
    return tuple(tuple(row) for row in identity(n))


def _reduce_mod1(t) -> tuple[Fraction, ...]:
    return tuple(x - (x.numerator // x.denominator) for x in t)


@dataclass(frozen=True)
class FanAutomorphism:
    """A unimodular integer matrix acting on lattice coordinates (columns)."""

    matrix: IntMat

    @property
    def dim(self) -> int:
        return len(self.matrix)

    def __mul__(self, other: "FanAutomorphism") -> "FanAutomorphism":
        return FanAutomorphism(_matmul(self.matrix, other.matrix))

    def is_identity(self) -> bool:
        return self.matrix == _identity(self.dim)

    def apply_coords(self, x):
        return _matvec(self.matrix, x)

    def ambient_matrix(self, N: Lattice):
        """The same map on ambient column vectors: ``B^T G B^{-T}``."""
        B = N.basis
        n = N.rank
        Bt = [[B[j][i] for j in range(n)] for i in range(n)]
        Bt_inv = rational_inverse(Bt)
        G = [[Fraction(x) for x in row] for row in self.matrix]
        left = [[sum((Bt[i][k] * G[k][j] for k in range(n)), Fraction(0)) for j in range(n)]
                for i in range(n)]
        return tuple(tuple(sum((left[i][k] * Bt_inv[k][j] for k in range(n)), Fraction(0))
                           for j in range(n)) for i in range(n))


def _rays_and_cones(sigma):
    if isinstance(sigma, Fan):
        return sigma.lattice, sigma.rays, [c.rays for c in sigma.cones]
    return sigma.lattice, sigma.rays, [sigma.rays]


def fan_automorphisms(sigma: Cone | Fan) -> list[FanAutomorphism]:
    """All lattice automorphisms permuting the rays and mapping cones to cones.

    Each candidate is determined by where ``n`` independent rays go, so the
    search runs over injective assignments of those rays.
    """
    N, rays, cone_rays = _rays_and_cones(sigma)
    n = N.rank
    if rank(rays) != n:
        raise DegenerateCone("fan automorphisms need full-dimensional support")
    X = [tuple(int(c) for c in N.coords(v)) for v in rays]
    ray_index = {x: i for i, x in enumerate(X)}
    cone_sets = {frozenset(ray_index[tuple(int(c) for c in N.coords(v))] for v in cr)
                 for cr in cone_rays}
    base = []
    for i in range(len(X)):
        if rank([X[j] for j in base + [i]]) == len(base) + 1:
            base.append(i)
        if len(base) == n:
            break
    A_inv = rational_inverse([[X[base[j]][i] for j in range(n)] for i in range(n)])
    found = {}
    for image in itertools.permutations(range(len(X)), n):
        Bm = [[X[image[j]][i] for j in range(n)] for i in range(n)]
        G = [[sum((Bm[i][k] * A_inv[k][j] for k in range(n)), Fraction(0)) for j in range(n)]
             for i in range(n)]
        if any(x.denominator != 1 for row in G for x in row):
            continue
        Gi = tuple(tuple(int(x) for x in row) for row in G)
        if abs(determinant(Gi)) != 1:
            continue
        perm = []
        for x in X:
            y = tuple(sum(a * b for a, b in zip(row, x)) for row in Gi)
            if y not in ray_index:
                break
            perm.append(ray_index[y])
        else:
            if all(frozenset(perm[i] for i in c) in cone_sets for c in cone_sets):
                found[Gi] = FanAutomorphism(Gi)
    ident = _identity(n)
    return sorted(found.values(), key=lambda g: (g.matrix != ident, g.matrix))


def max_order_table(n: int) -> int:
    """Maximal order of a finite-order element of ``GL_n(Z)``, for ``1 <= n <= 6``."""
    if n not in _MAX_ORDER:
        raise OutOfRange(f"order table covers dimensions 1..6, got {n}")
    return _MAX_ORDER[n]


def element_order(g: FanAutomorphism) -> int:
    n = g.dim
    cap = max_order_table(n) if n in _MAX_ORDER else 10 ** 6
    ident = _identity(n)
    power = g.matrix
    for k in range(1, cap + 1):
        if power == ident:
            return k
        power = _matmul(power, g.matrix)
    raise OrderCapExceeded(f"element order exceeds k({n}) = {cap}")


@dataclass(frozen=True)
class OuterToricElement:
    g: FanAutomorphism
    t: tuple[Fraction, ...]

    def __post_init__(self):
        object.__setattr__(self, "t", _reduce_mod1(rat_vector(self.t)))

    @classmethod
    def identity(cls, n: int) -> "OuterToricElement":
        return cls(FanAutomorphism(_identity(n)), (0,) * n)

    @classmethod
    def make(cls, g: Sequence[Sequence[int]], t: Sequence) -> "OuterToricElement":
        return cls(FanAutomorphism(tuple(tuple(int(x) for x in row) for row in g)), t)

    @property
    def dim(self) -> int:
        return self.g.dim

    def __mul__(self, other: "OuterToricElement") -> "OuterToricElement":
        shifted = self.g.apply_coords(other.t)
        return OuterToricElement(self.g * other.g, tuple(a + b for a, b in zip(self.t, shifted)))

    def inverse(self) -> "OuterToricElement":
        inv = rational_inverse(self.g.matrix)
        G = tuple(tuple(int(x) for x in row) for row in inv)
        t = _matvec(G, self.t)
        return OuterToricElement(FanAutomorphism(G), tuple(-x for x in t))

    def in_torus(self) -> bool:
        return self.g.is_identity()

    def sort_key(self):
        return (not self.g.is_identity(), self.g.matrix, self.t)


class OuterToricGroup:
    """A finite group of outer toric automorphisms.

    The group is stored as a transversal of its image ``H`` in the fan
    automorphisms together with its torus part ``A = G ∩ T``. Torsion is
    packed as integers modulo a common denominator ``D``, and ``A`` is kept
    as the HNF basis of the lattice ``D Z^n + sum Z (D a)``. Elements are
    enumerated only on request.
    """

    def __init__(self, elements: Iterable[OuterToricElement], generators=(), dim=None):
        elements = list(elements)
        self.generators = tuple(generators)
        D = common_denominator(c for x in elements + list(self.generators) for c in x.t)
        dim = dim if dim is not None else elements[0].dim
        one = _identity(dim)
        transversal: dict = {}
        for x in sorted(elements, key=OuterToricElement.sort_key):
            transversal.setdefault(x.g.matrix, _pack(x, D)[1])
        torus = [_pack(x, D)[1] for x in elements if x.g.matrix == one]
        self._setup(D, dim, transversal, _torus_generators(torus, dim, D))

    @classmethod
    def _from_parts(cls, D, dim, transversal, torus_basis, generators) -> "OuterToricGroup":
        G = cls.__new__(cls)
        G.generators = tuple(generators)
        G._setup(D, dim, transversal, torus_basis)
        return G

    def _setup(self, D, dim, transversal, torus_basis):
        self.denominator = D
        self._dim = dim
        self.transversal = dict(transversal)
        self.torus_basis = [list(b) for b in torus_basis]
        self.torus_order = D ** dim // _prod(b[i] for i, b in enumerate(self.torus_basis))
        self._packed = None
        self._elements = None

    @property
    def order(self) -> int:
        return len(self.transversal) * self.torus_order

    @property
    def dim(self) -> int:
        return self._dim

    def torus_points(self) -> list[tuple[int, ...]]:
        """Packed torsion of the torus part (multiply by ``1/D`` for the points)."""
        D, B = self.denominator, self.torus_basis
        ranges = [range(D // b[i]) for i, b in enumerate(B)]
        return sorted(tuple(sum(c * b[j] for c, b in zip(cs, B)) % D for j in range(self.dim))
                      for cs in itertools.product(*ranges))

    def in_torus_part(self, t_packed) -> bool:
        """Membership of a packed torsion vector in ``A`` by reduction against the HNF."""
        rest = list(t_packed)
        for i, b in enumerate(self.torus_basis):
            q, rem = divmod(rest[i], b[i])
            if rem:
                return False
            rest = [x - q * y for x, y in zip(rest, b)]
        return True

    @property
    def packed(self) -> frozenset:
        if self._packed is None:
            D, A = self.denominator, self.torus_points()
            self._packed = frozenset(
                (G, tuple((a + b) % D for a, b in zip(t, s)))
                for G, t in self.transversal.items() for s in A)
        return self._packed

    @property
    def elements(self) -> tuple[OuterToricElement, ...]:
        if self._elements is None:
            D = self.denominator
            self._elements = tuple(sorted(
                (OuterToricElement(FanAutomorphism(G), tuple(Fraction(a, D) for a in t))
                 for G, t in self.packed), key=OuterToricElement.sort_key))
        return self._elements

    def pack(self, x: OuterToricElement):
        """Packed form of ``x``, or None when its torsion needs a larger denominator."""
        if any(self.denominator % c.denominator for c in x.t):
            return None
        return _pack(x, self.denominator)

    def __contains__(self, x) -> bool:
        p = self.pack(x)
        if p is None or p[0] not in self.transversal:
            return False
        t = self.transversal[p[0]]
        return self.in_torus_part([a - b for a, b in zip(p[1], t)])

    def __iter__(self):
        return iter(self.elements)

    def __len__(self):
        return self.order

    def torus_part(self) -> list[OuterToricElement]:
        """Kernel of the projection to the fan-automorphism part."""
        one, D = FanAutomorphism(_identity(self.dim)), self.denominator
        return [OuterToricElement(one, tuple(Fraction(a, D) for a in t))
                for t in self.torus_points()]

    def projection(self) -> list[FanAutomorphism]:
        ident = _identity(self.dim)
        return [FanAutomorphism(G) for G in
                sorted(self.transversal, key=lambda G: (G != ident, G))]


def _prod(xs) -> int:
    out = 1
    for x in xs:
        out *= x
    return out


def _pack(x: OuterToricElement, D: int):
    return x.g.matrix, tuple(int(c * D) for c in x.t)


def _mul_packed(x, y, D: int):
    (G1, t1), (G2, t2) = x, y
    return (_matmul(G1, G2),
            tuple((a + sum(g * b for g, b in zip(row, t2))) % D for a, row in zip(t1, G1)))


def _inv_packed(x, D: int):
    G, t = x
    Gi = tuple(tuple(int(c) for c in row) for row in rational_inverse([list(r) for r in G]))
    return Gi, tuple((-sum(g * b for g, b in zip(row, t))) % D for row in Gi)


def group_closure(generators: Sequence[OuterToricElement], cap: int = DEFAULT_GROUP_CAP,
                  dim: int | None = None) -> OuterToricGroup:
    """The group generated by ``generators``, by Schreier's lemma.

    A breadth-first search over the image ``H`` in the fan automorphisms
    builds a transversal ``u``; the Schreier elements ``u_h s u_{hs}^-1``
    lie in the torus and generate the torus part ``A``, so ``|G| = |H| |A|``
    without listing ``G``. Torsion is carried as integers modulo a common
    denominator ``D``, which is exact because every ``g`` is integral.
    """
    generators = list(generators)
    if dim is None:
        if not generators:
            raise ValueError("need the dimension when there are no generators")
        dim = generators[0].dim
    D = common_denominator(c for x in generators for c in x.t)
    gens = [_pack(x, D) for x in generators]
    one = _identity(dim)
    transversal = {one: (0,) * dim}
    queue = deque([one])
    schreier = []
    while queue:
        h = queue.popleft()
        u = (h, transversal[h])
        for s in gens:
            y = _mul_packed(u, s, D)
            if y[0] not in transversal:
                transversal[y[0]] = y[1]
                if len(transversal) > cap:
                    raise CapExceeded(f"group order exceeds the cap {cap}", cap)
                queue.append(y[0])
            else:
                z = _mul_packed(y, _inv_packed((y[0], transversal[y[0]]), D), D)
                if z[0] != one:
                    raise VerificationFailure("Schreier element left the torus")
                if any(z[1]):
                    schreier.append(z[1])
    G = OuterToricGroup._from_parts(D, dim, transversal, _torus_generators(schreier, dim, D),
                                    generators)
    if G.order > cap:
        raise CapExceeded(f"group order {G.order} exceeds the cap {cap}", cap)
    return G


def is_abelian(elements: Sequence[OuterToricElement]) -> bool:
    return all(a * b == b * a for a, b in itertools.combinations(elements, 2))


def is_normal(subgroup: Sequence[OuterToricElement], group: OuterToricGroup) -> bool:
    members = set(subgroup)
    for g in group:
        gi = g.inverse()
        if any(g * h * gi not in members for h in subgroup):
            return False
    return True


@dataclass(frozen=True)
class JordanReport:
    a_order: int
    a_invariant_factors: tuple[int, ...]
    index: int
    rank_a: int

    def as_dict(self):
        return {"A_order": self.a_order, "A_invariant_factors": list(self.a_invariant_factors),
                "index": self.index, "rank_A": self.rank_a}


def _torus_generators(points: Sequence[Sequence[int]], n: int, D: int) -> list[list[int]]:
    """HNF basis of ``D Z^n + sum Z t`` for packed points ``t``, grown one point at a time."""
    basis = [[D if i == j else 0 for j in range(n)] for i in range(n)]
    for row in points:
        # HNF rows are upper triangular with positive pivots
        rest = list(row)
        for i, b in enumerate(basis):
            q, rem = divmod(rest[i], b[i])
            if rem:
                break
            rest = [x - q * y for x, y in zip(rest, b)]
        if any(rest):
            basis = hermite_normal_form(basis + [list(row)])
    return basis


def jordan_report(G: OuterToricGroup, n: int | None = None,
                  aut_order: int | None = None) -> JordanReport:
    """The torus part ``A = G ∩ T`` and its index in ``G``.

    ``A`` lies in the maximal torus by construction. Normality and
    commutativity are checked on generators: ``s a s^-1`` for generators
    ``s`` of ``G`` and a basis ``a`` of ``A``, in packed arithmetic. Pass
    ``aut_order = |Aut_Σ(M)|`` to have the index bound checked.
    """
    n = n or G.dim
    D = G.denominator
    basis = G.torus_basis
    group = overlattice_quotient(Lattice.standard(n),
                                 Lattice([[Fraction(x, D) for x in b] for b in basis]))
    if group.order != G.torus_order:
        raise VerificationFailure("torus part order disagrees with its lattice")
    one = _identity(n)
    a_gens = [(one, tuple(x % D for x in b)) for b in basis]
    if any(_mul_packed(a, b, D) != _mul_packed(b, a, D)
           for a, b in itertools.combinations(a_gens, 2)):
        raise VerificationFailure("torus part is not abelian")
    for s in G.generators:
        s = _pack(s, D)
        si = _inv_packed(s, D)
        for a in a_gens:
            c = _mul_packed(_mul_packed(s, a, D), si, D)
            if c[0] != one or not G.in_torus_part(c[1]):
                raise VerificationFailure("torus part is not normal")
    index = G.order // G.torus_order
    if index != len(G.projection()):
        raise VerificationFailure("index differs from the size of the image")
    if group.rank > n:
        raise VerificationFailure(f"torus part has rank {group.rank} > {n}")
    if aut_order is not None and index > aut_order:
        raise VerificationFailure(f"index {index} exceeds |Aut_Σ(M)| = {aut_order}")
    return JordanReport(G.torus_order, group.factors, index, group.rank)


def fixing_subtorus(sigma: Cone, v: Sequence):
    """One-parameter subgroup fixing the exceptional divisor of ``star(sigma, v)`` pointwise.

    This is the kernel of ``T_N -> T_{N/Zv}``, generated by ``v`` itself.
    """
    v = rat_vector(v)
    if not relint_contains(sigma, v):
        raise NotInterior(f"{tuple(map(str, v))} is not in the relative interior")
    _, r = primitive_on_ray(v, sigma.lattice)
    if r != 1:
        raise NotPrimitive(f"{tuple(map(str, v))} is not primitive")
    return v


def fixes_exceptional_torus(t: Sequence, v: Sequence, N: Lattice) -> bool:
    """Whether the torsion point ``t`` (ambient coordinates) lies in ``(Q v + N)/N``.

    Equivalently ``t`` maps to zero in the torus of ``N/Zv``, which acts on
    the exceptional divisor.
    """
    x_v = [int(c) for c in N.coords(rat_vector(v))]
    x_t = N.coords(rat_vector(t))
    # complete v to a basis: x_v V = (±1, 0, ..., 0)
    _, _, V = smith_normal_form([x_v])
    y = [sum((x_t[i] * V[i][j] for i in range(len(x_t))), Fraction(0)) for j in range(len(x_t))]
    return all(c.denominator == 1 for c in y[1:])
