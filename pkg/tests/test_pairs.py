from fractions import Fraction as F

import pytest
from hypothesis import given, strategies as st

from oracles import cartier_index_by_search, mld_cyclic_dense
from strategies import overlattices, simplicial_rays
from toricmld.cones import Cone, relint_contains, slice_lattice_points, star_subdivision
from toricmld.errors import NotInCone, NotKlt, NotQGorenstein
from toricmld.lattice import Lattice, identity, primitive_generator, primitive_on_ray, rational_inverse
from toricmld.pairs import (ToricPair, cartier_index, class_group, is_klt, log_discrepancy,
                            logdisc_functional, mld, solve_functional)
from toricmld.quotients import cyclic_quotient

Z2 = Cone(identity(2))
A1 = Cone([[1, 0], [1, 2]])
THIRD = Lattice(identity(2) + [[F(1, 3), F(1, 3)]])
HALF = Lattice(identity(2) + [[F(1, 2), F(1, 2)]])
SQUARE = Cone([[1, 0, 1], [0, 1, 1], [-1, 0, 1], [0, -1, 1]])


def test_functional_examples():
    assert logdisc_functional(ToricPair(Z2)) == (1, 1)
    assert logdisc_functional(ToricPair(A1)) == (1, 0)
    P = ToricPair.from_rays([[1, 0], [0, 1]], ["1/2", 0])
    assert logdisc_functional(P) == (F(1, 2), 1)


def test_boundary_alignment_follows_listed_rays():
    P = ToricPair.from_rays([[1, 0], [0, 1]], ["1/2", 0])
    assert P.coefficient((1, 0)) == F(1, 2)
    assert P.coefficient((0, 3)) == 0


def test_boundary_must_be_below_one():
    with pytest.raises(ValueError):
        ToricPair.from_rays([[1, 0], [0, 1]], [1, 0])
    with pytest.raises(ValueError):
        ToricPair(Z2, ["-1/2", 0])


def test_log_discrepancy_examples():
    assert log_discrepancy(ToricPair(Z2), (1, 1)) == 2
    assert log_discrepancy(ToricPair(A1), (1, 1)) == 1
    assert log_discrepancy(ToricPair(Cone(identity(2), THIRD)), (F(1, 3), F(1, 3))) == F(2, 3)
    with pytest.raises(NotInCone):
        log_discrepancy(ToricPair(Z2), (-1, 1))
    with pytest.raises(NotInCone):
        log_discrepancy(ToricPair(Z2), (F(1, 2), 1))


def test_mld_examples():
    assert mld(ToricPair(Z2)) == (2, (1, 1))
    assert mld(ToricPair(Cone(identity(2), THIRD))) == (F(2, 3), (F(1, 3), F(1, 3)))
    assert mld(ToricPair(A1)) == (1, (1, 1))
    assert mld(ToricPair(Z2, ["1/2", "1/2"])) == (1, (1, 1))
    assert mld(ToricPair(Cone(identity(3))))[0] == 3


def test_non_simplicial_mld():
    value, witness = mld(ToricPair(SQUARE))
    assert (value, witness) == (1, (0, 0, 1))


def test_not_q_gorenstein():
    P = ToricPair(SQUARE, ["1/2", 0, 0, 0])
    assert not is_klt(P)
    with pytest.raises(NotQGorenstein):
        logdisc_functional(P)
    with pytest.raises(NotKlt):
        mld(P)
    with pytest.raises(NotQGorenstein):
        cartier_index(P)


def test_klt_examples():
    assert is_klt(ToricPair(Z2))
    assert is_klt(ToricPair(A1, ["1/3", "2/3"]))


def test_cartier_index_examples():
    assert cartier_index(ToricPair(Z2)) == 1
    assert cartier_index(ToricPair(Cone(identity(2), THIRD))) == 3
    assert cartier_index(ToricPair(Cone(identity(2), HALF))) == 1


def test_class_group_examples():
    cl = class_group(Z2)
    assert (cl.num_variables, cl.free_rank, cl.torsion) == (2, 0, ())
    cl = class_group(A1)
    assert (cl.free_rank, cl.torsion) == (0, (2,))
    assert [cl.degree(j) for j in range(2)] == [((), (1,)), ((), (1,))]
    cl = class_group(SQUARE)
    assert (cl.num_variables, cl.free_rank, cl.torsion) == (4, 1, (2,))


@st.composite
def pairs(draw, dims=(2, 3)):
    n = draw(st.sampled_from(dims))
    rays = draw(simplicial_rays(n, -2, 2))
    N = draw(overlattices(n, 4))
    cone = Cone(rays, N)
    boundary = [F(draw(st.integers(0, 3)), 4) for _ in range(n)]
    return ToricPair(cone, boundary)


def _interior_points(P, c):
    m = logdisc_functional(P)
    return [v for v in slice_lattice_points(P.cone, m, c) if relint_contains(P.cone, v)]


@given(pairs())
def test_mld_is_minimal(P):
    value, witness = mld(P)
    m = logdisc_functional(P)
    assert relint_contains(P.cone, witness)
    assert primitive_on_ray(witness, P.lattice)[1] == 1
    assert log_discrepancy(P, witness) == value
    pts = _interior_points(P, value + 1)
    assert pts and min(sum(a * b for a, b in zip(m, v)) for v in pts) == value


@given(pairs(), st.integers(1, 5))
def test_log_discrepancy_scales(P, r):
    value, witness = mld(P)
    assert log_discrepancy(P, tuple(r * x for x in witness)) == r * value


@given(st.integers(1, 20), st.integers(0, 19), st.integers(0, 19))
def test_mld_of_quotient_variety_matches_dense_scan(r, a1, a2):
    P = cyclic_quotient(r, [a1 % r, a2 % r])
    assert mld(P)[0] == mld_cyclic_dense(r, a1 % r, a2 % r, boundary=False)


@given(pairs())
def test_star_subdivision_is_crepant(P):
    m = logdisc_functional(P)
    _, w = mld(P)
    # a second interior point: witness plus the first ray
    for v in (w, primitive_generator(tuple(a + b for a, b in zip(w, P.cone.rays[0])), P.lattice)):
        fan = star_subdivision(P.cone, v)
        new_coeff = 1 - sum(a * b for a, b in zip(m, v))
        for c in fan.cones:
            coeffs = [new_coeff if c.ray_index(v) == i else P.coefficient(u)
                      for i, u in enumerate(c.rays)]
            assert solve_functional(c, coeffs) == m


@given(pairs())
def test_cartier_index_matches_search(P):
    m = logdisc_functional(P)
    assert cartier_index(P) == cartier_index_by_search(m, P.lattice.basis)


@given(pairs(), st.lists(st.integers(-3, 3), min_size=3, max_size=3))
def test_class_group_kills_exactly_the_characters(P, e):
    cone = P.cone
    cl = class_group(cone)
    n, k = cone.dim, len(cone.rays)
    assert k - n == cl.free_rank
    zero = ((0,) * cl.free_rank, (0,) * len(cl.torsion))
    M = cone.lattice.dual()
    for m in M.basis:
        assert cl.degree_of([sum(a * b for a, b in zip(m, v)) for v in cone.rays]) == zero
    # a degree-zero exponent vector comes from a character of N
    e = e[:k]
    if cl.degree_of(e) == zero:
        pairing = [[sum(a * b for a, b in zip(u, v)) for u in M.basis] for v in cone.rays]
        x = [sum(inv_ij * ej for inv_ij, ej in zip(row, e)) for row in rational_inverse(pairing)]
        assert all(c.denominator == 1 for c in x)
    order = 1
    for d in cl.torsion:
        order *= d
    if cl.free_rank == 0:
        # the torsion order is the index of the ray sublattice
        assert order == cone.parallelepiped()[0]
