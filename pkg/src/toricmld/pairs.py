"""Toric pairs: log discrepancy functionals, mld, klt, Cartier index, class groups.

For a toric pair ``(X_sigma, B)`` with ``B = sum b_i D_i`` the log
discrepancy of the toric valuation ``E_v`` (``v`` primitive in ``N``) is
``<m, v>`` where ``m`` is the unique functional with ``<m, v_i> = 1 - b_i``
on the primitive ray generators. The functional exists exactly when
``K_X + B`` is Q-Cartier.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from typing import Iterable, Sequence

from .cones import Cone, relint_contains, slice_lattice_points
from .errors import NotInCone, NotKlt, NotQGorenstein
from .lattice import (Lattice, RatVector, common_denominator, dot, rank, rat_vector,
                      rational_inverse, smith_normal_form, to_fraction)


class ToricPair:
    """An affine toric variety with a torus-invariant boundary.

    ``boundary`` is aligned with ``cone.rays`` (which are sorted). Use
    :meth:`from_rays` to give coefficients in the order rays were listed.
    Coefficients must lie in ``[0, 1)``.
    """

    def __init__(self, cone: Cone, boundary: Sequence | None = None):
        if boundary is None:
            boundary = [0] * len(cone.rays)
        coeffs = tuple(to_fraction(b) for b in boundary)
        if len(coeffs) != len(cone.rays):
            raise ValueError(f"{len(coeffs)} boundary coefficients for {len(cone.rays)} rays")
        for b in coeffs:
            if not 0 <= b < 1:
                raise ValueError(f"boundary coefficient {b} outside [0, 1)")
        self.cone = cone
        self.boundary: tuple[Fraction, ...] = coeffs
        self._functional: RatVector | None = None
        self._functional_error: str | None = None

    @classmethod
    def from_rays(cls, rays: Iterable, boundary: Sequence | None = None,
                  lattice: Lattice | None = None) -> "ToricPair":
        rays = [rat_vector(v) for v in rays]
        cone = Cone(rays, lattice)
        if len(cone.rays) != len(rays):
            raise ValueError("every listed ray must be a distinct extremal ray")
        if boundary is None:
            return cls(cone)
        if len(boundary) != len(rays):
            raise ValueError(f"{len(boundary)} boundary coefficients for {len(rays)} rays")
        aligned = [Fraction(0)] * len(rays)
        for v, b in zip(rays, boundary):
            aligned[cone.ray_index(v)] = to_fraction(b)
        return cls(cone, aligned)

    @property
    def lattice(self) -> Lattice:
        return self.cone.lattice

    @property
    def dim(self) -> int:
        return self.cone.dim

    def coefficient(self, ray: Sequence) -> Fraction:
        return self.boundary[self.cone.ray_index(ray)]

    @property
    def functional(self) -> RatVector:
        return logdisc_functional(self)

    def __repr__(self):
        return f"ToricPair({self.cone!r}, boundary={[str(b) for b in self.boundary]})"


@dataclass(frozen=True)
class ClassGroupPresentation:
    """``Cl(X)`` as ``Z^rho ⊕ torsion`` with the degree of each Cox variable."""

    num_variables: int
    free_rank: int
    torsion: tuple[int, ...]
    gradings: tuple[tuple[tuple[int, ...], tuple[int, ...]], ...] = field(repr=False)

    def degree(self, j: int):
        return self.gradings[j]

    def degree_of(self, exponents: Sequence[int]):
        """Degree of the monomial with the given exponent vector."""
        free = [0] * self.free_rank
        tors = [0] * len(self.torsion)
        for e, (f, t) in zip(exponents, self.gradings):
            free = [a + e * b for a, b in zip(free, f)]
            tors = [a + e * b for a, b in zip(tors, t)]
        return tuple(free), tuple(x % d for x, d in zip(tors, self.torsion))

    def as_dict(self):
        return {
            "variables": self.num_variables,
            "free_rank": self.free_rank,
            "torsion": list(self.torsion),
            "gradings": [{"free": list(f), "torsion": list(t)} for f, t in self.gradings],
        }


def solve_functional(cone: Cone, coefficients: Sequence) -> RatVector:
    """The functional with ``<m, v_i> = 1 - coefficients[i]``, no range checks.

    Coefficients may be negative here (sub-boundaries), which the crepant
    pullback to a subdivision needs.
    """
    rays = cone.rays
    targets = [1 - to_fraction(b) for b in coefficients]
    n = cone.dim
    if len(rays) == n:
        idx = list(range(n))
    else:
        idx = []
        for i in range(len(rays)):
            if rank([rays[j] for j in idx + [i]]) == len(idx) + 1:
                idx.append(i)
            if len(idx) == n:
                break
    inv = rational_inverse([rays[i] for i in idx])
    # m solves R m = t for the chosen rows R; m = R^{-1} t
    m = tuple(sum((inv[r][c] * targets[idx[c]] for c in range(n)), Fraction(0))
              for r in range(n))
    for v, t in zip(rays, targets):
        if dot(m, v) != t:
            raise NotQGorenstein("K_X + B is not Q-Cartier: no linear functional fits the rays")
    return m


def logdisc_functional(P: ToricPair) -> RatVector:
    """The Q-Gorenstein functional ``m``; cached on the pair."""
    if P._functional is None:
        if P._functional_error is not None:
            raise NotQGorenstein(P._functional_error)
        try:
            P._functional = solve_functional(P.cone, P.boundary)
        except NotQGorenstein as exc:
            P._functional_error = str(exc)
            raise
    return P._functional


def log_discrepancy(P: ToricPair, v: Sequence) -> Fraction:
    """``<m, v>`` for a nonzero lattice point ``v`` of the cone."""
    v = rat_vector(v)
    if all(x == 0 for x in v):
        raise NotInCone("the origin is not a valuation")
    if not P.lattice.contains(v) or not P.cone.contains(v):
        raise NotInCone(f"{tuple(map(str, v))} is not a lattice point of the cone")
    return dot(logdisc_functional(P), v)


def is_klt(P: ToricPair) -> bool:
    try:
        logdisc_functional(P)
    except NotQGorenstein:
        return False
    return all(b < 1 for b in P.boundary)


def mld(P: ToricPair, method: str = "auto") -> tuple[Fraction, RatVector]:
    """Minimal log discrepancy at the torus-fixed point and a primitive witness.

    The minimum runs over lattice points in the relative interior; ties go
    to the lexicographically smallest point. ``method="slice"`` always
    scans the slice ``0 < <m, v> <= <m, sum v_i>``; ``"auto"`` uses the
    parallelepiped cosets for simplicial cones.
    """
    if method not in ("auto", "slice"):
        raise ValueError(f"unknown method {method!r}")
    if not is_klt(P):
        raise NotKlt("pair is not klt (K_X + B is not Q-Cartier)")
    m = logdisc_functional(P)
    cone = P.cone
    if cone.is_simplicial and method == "auto":
        return _mld_simplicial(cone, m, P.boundary)
    c0 = dot(m, [sum(col, Fraction(0)) for col in zip(*cone.rays)])
    best = None
    for v in slice_lattice_points(cone, m, c0):
        if relint_contains(cone, v):
            best = (dot(m, v), v)
            break  # slice order is (value, lex)
    return best


def _mld_simplicial(cone: Cone, m, boundary):
    """Exhaustive over the cosets of the ray sublattice.

    Inside one coset ``L/det + Z^n`` (in ray coordinates) the interior point
    minimizing ``<m, .>`` takes coordinate ``L_i/det`` when positive and 1
    otherwise, because every ray weight ``1 - b_i`` is positive.
    """
    det, reps = cone.parallelepiped()
    weights = [1 - b for b in boundary]
    D = common_denominator(weights)
    w = [int(x * D) for x in weights]
    best_val = None
    best_reps = []
    for L in reps:
        val = 0
        for l, wi in zip(L, w):
            val += (l or det) * wi
        if best_val is None or val < best_val:
            best_val, best_reps = val, [L]
        elif val == best_val:
            best_reps.append(L)
    n = cone.dim
    rays = cone.rays
    pts = []
    for L in best_reps:
        lam = [Fraction(l or det, det) for l in L]
        pts.append(tuple(sum((lam[j] * rays[j][t] for j in range(n)), Fraction(0))
                         for t in range(n)))
    return Fraction(best_val, det * D), min(pts)


def cartier_index(P: ToricPair) -> int:
    """Least ``l >= 1`` with ``l * m`` integral on ``N``."""
    m = logdisc_functional(P)
    return common_denominator(dot(m, g) for g in P.lattice.basis)


def class_group(sigma: Cone, N: Lattice | None = None) -> ClassGroupPresentation:
    """Cokernel of ``M -> Z^k``, ``m -> (<m, v_i>)_i``, with Cox variable degrees."""
    if N is not None and N != sigma.lattice:
        sigma = sigma.with_lattice(N)
    n = sigma.dim
    k = len(sigma.rays)
    P = [[int(x) for x in sigma.lattice.coords(v)] for v in sigma.rays]
    S, U, _ = smith_normal_form(P)
    diag = [S[i][i] if i < n else 0 for i in range(k)]
    tors_rows = [i for i in range(k) if diag[i] > 1]
    free_rows = [i for i in range(k) if diag[i] == 0]
    gradings = tuple(
        (tuple(U[i][j] for i in free_rows),
         tuple(U[i][j] % diag[i] for i in tors_rows))
        for j in range(k))
    return ClassGroupPresentation(
        num_variables=k,
        free_rank=len(free_rows),
        torsion=tuple(diag[i] for i in tors_rows),
        gradings=gradings,
    )

