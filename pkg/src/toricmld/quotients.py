"""Finite torus subgroups as overlattices, and log quotients of toric pairs.

A finite subgroup ``F`` of the torus ``T_N`` is the same thing as an
overlattice ``N' ⊇ N`` with ``F ≅ N'/N``; the quotient of ``X_sigma`` by
``F`` is ``X_sigma`` again, but with ``sigma`` read in ``N'``. Only
abelian quotients are representable: a nonabelian Galois factorization
is seen here through its abelian towers.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from typing import Sequence

from .cones import Cone, dual_cone, hilbert_basis, relint_contains, DEFAULT_HILBERT_CAP
from .errors import (LatticeMismatch, NotInLattice, NotInterior, NotInUpstairsLattice,
                     NotQGorenstein, NotSublattice, VerificationFailure)
from .lattice import (FiniteAbelianGroup, Lattice, RatVector, dot, identity,
                      overlattice_quotient, primitive_on_ray, rat_vector)
from .pairs import ToricPair, cartier_index, logdisc_functional, mld


class TorusSubgroup:
    """The finite subgroup ``N'/N`` of the torus ``T_N``."""

    def __init__(self, base: Lattice, overlattice: Lattice):
        if not base.is_sublattice_of(overlattice):
            raise NotSublattice("the base lattice is not contained in the overlattice")
        self.base = base
        self.overlattice = overlattice
        self._group: FiniteAbelianGroup | None = None

    @property
    def group(self) -> FiniteAbelianGroup:
        if self._group is None:
            self._group = overlattice_quotient(self.base, self.overlattice)
        return self._group

    @classmethod
    def from_weights(cls, r: int, weights: Sequence[int]) -> "TorusSubgroup":
        """The cyclic group generated by ``(a_1/r, ..., a_n/r)`` acting on ``Z^n``."""
        if r < 1:
            raise ValueError("r must be a positive integer")
        n = len(weights)
        base = Lattice.standard(n)
        over = Lattice(identity(n) + [[Fraction(a, r) for a in weights]])
        return cls(base, over)

    @classmethod
    def trivial(cls, N: Lattice) -> "TorusSubgroup":
        return cls(N, N)

    @property
    def order(self) -> int:
        return self.group.order

    def __repr__(self):
        return f"TorusSubgroup({self.base!r} ⊆ {self.overlattice!r}, factors={self.group.factors})"


def cyclic_quotient(r: int, weights: Sequence[int]) -> ToricPair:
    """``A^n / (1/r)(a_1, ..., a_n)`` as a boundary-free pair on the orthant in ``N'``.

    The weights need not be coprime to ``r``; the group they generate is used.
    """
    F = TorusSubgroup.from_weights(r, weights)
    n = len(weights)
    cone = Cone(identity(n), F.overlattice)
    return ToricPair(cone)


def ramification_indices(cone: Cone, F: TorusSubgroup) -> tuple[list[RatVector], list[int]]:
    """Downstairs primitive generators and the index ``r_i`` of each ray."""
    down, idx = [], []
    for v in cone.rays:
        v_prime, r = primitive_on_ray(v, F.overlattice)
        down.append(v_prime)
        idx.append(r)
    return down, idx


def log_quotient(P: ToricPair, F: TorusSubgroup) -> ToricPair:
    """The log quotient of ``P`` by ``F``: same cone read in ``N'``.

    Each ray with ``v_i = r_i v_i'`` gets coefficient ``1 - (1 - b_i)/r_i``,
    which keeps the functional unchanged (the pullback identity).
    """
    if P.lattice != F.base:
        raise LatticeMismatch("the pair's lattice is not the subgroup's base lattice")
    down_cone = P.cone.with_lattice(F.overlattice)
    coeffs = [Fraction(0)] * len(down_cone.rays)
    for v, b in zip(P.cone.rays, P.boundary):
        v_prime, r = primitive_on_ray(v, F.overlattice)
        coeffs[down_cone.ray_index(v_prime)] = 1 - (1 - b) / r
    Q = ToricPair(down_cone, coeffs)
    try:
        m = logdisc_functional(P)
    except NotQGorenstein:
        return Q
    if logdisc_functional(Q) != m:
        raise VerificationFailure("log quotient changed the log discrepancy functional")
    return Q


def quotient_ld_check(P: ToricPair, F: TorusSubgroup, v: Sequence, Q: ToricPair | None = None):
    """Compare ``a_E`` upstairs with ``a_{E_Y}`` downstairs for the toric valuation ``v``.

    Returns ``(upstairs, downstairs, r)`` with ``v = r v'`` and ``v'``
    primitive in ``N'``; raises :class:`VerificationFailure` unless
    ``downstairs == upstairs / r``. ``Q`` may pass an already computed
    ``log_quotient(P, F)``.
    """
    v = rat_vector(v)
    if not relint_contains(P.cone, v):
        raise NotInterior(f"{tuple(map(str, v))} is not in the relative interior")
    try:
        _, r_up = primitive_on_ray(v, P.lattice)
    except NotInLattice as exc:
        raise NotInUpstairsLattice(str(exc)) from None
    if r_up != 1:
        raise NotInUpstairsLattice(f"{tuple(map(str, v))} is not primitive in N")
    if Q is None:
        Q = log_quotient(P, F)
    v_prime, r = primitive_on_ray(v, F.overlattice)
    up = dot(logdisc_functional(P), v)
    down = dot(logdisc_functional(Q), v_prime)
    if down != up / r:
        raise VerificationFailure(f"quotient law fails at {v}: {down} != {up}/{r}")
    return up, down, r


@dataclass
class TowerStage:
    lattice: Lattice
    pair: ToricPair
    mld: Fraction
    witness: RatVector
    cartier_index: int

    @property
    def boundary(self):
        return self.pair.boundary


class QuotientTower:
    """Successive log quotients along ``N_0 ⊆ N_1 ⊆ ... ⊆ N_k``."""

    def __init__(self, stages: list[TowerStage]):
        self.stages = stages

    @property
    def lattices(self):
        return [s.lattice for s in self.stages]

    @property
    def mlds(self):
        return [s.mld for s in self.stages]

    def __len__(self):
        return len(self.stages)


def quotient_tower(lattices: Sequence[Lattice], base: ToricPair) -> QuotientTower:
    """Build the tower of log quotients and check it against the one-step quotient."""
    lattices = list(lattices)
    if not lattices or lattices[0] != base.lattice:
        lattices = [base.lattice] + lattices
    if not all(a.is_sublattice_of(b) for a, b in zip(lattices, lattices[1:])):
        raise LatticeMismatch("the lattices do not form an increasing chain")

    def stage(L, P):
        value, witness = mld(P)
        return TowerStage(L, P, value, witness, cartier_index(P))

    stages = [stage(lattices[0], base)]
    P = base
    for lo, hi in zip(lattices, lattices[1:]):
        P = log_quotient(P, TorusSubgroup(lo, hi))
        stages.append(stage(hi, P))
    direct = log_quotient(base, TorusSubgroup(lattices[0], lattices[-1]))
    if direct.cone != P.cone or direct.boundary != P.boundary:
        raise VerificationFailure("stagewise quotient differs from the one-step quotient")
    return QuotientTower(stages)


def invariant_monoid(P: ToricPair, F: TorusSubgroup, cap: int = DEFAULT_HILBERT_CAP):
    """Exponents of the minimal monomial generators of ``K[sigma^vee ∩ M]^F``.

    The invariants are the characters in the dual of ``N'``, so this is the
    Hilbert basis of ``sigma^vee ∩ M''`` with ``M'' = (N')^*``.
    """
    if P.lattice != F.base:
        raise LatticeMismatch("the pair's lattice is not the subgroup's base lattice")
    down = P.cone.with_lattice(F.overlattice)
    return hilbert_basis(dual_cone(down), cap=cap)
