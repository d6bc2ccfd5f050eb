"""Hypothesis strategies for small exact objects."""

from fractions import Fraction

from hypothesis import strategies as st

from toricmld.lattice import Lattice, determinant, identity


def int_matrices(rows, cols, lo=-6, hi=6):
    return st.lists(st.lists(st.integers(lo, hi), min_size=cols, max_size=cols),
                    min_size=rows, max_size=rows)


@st.composite
def unimodular(draw, n):
    """Products of elementary matrices and signed permutations."""
    M = [row[:] for row in identity(n)]
    for _ in range(draw(st.integers(0, 6))):
        i = draw(st.integers(0, n - 1))
        j = draw(st.integers(0, n - 1))
        if i == j:
            M[i] = [-x for x in M[i]]
        else:
            k = draw(st.integers(-2, 2))
            M[i] = [a + k * b for a, b in zip(M[i], M[j])]
    return M


@st.composite
def overlattices(draw, n, max_den=6):
    """``Z^n`` plus one or two extra rational generators."""
    extra = draw(st.lists(
        st.lists(st.builds(Fraction, st.integers(0, max_den - 1), st.integers(1, max_den)),
                 min_size=n, max_size=n), min_size=1, max_size=2))
    return Lattice(identity(n) + extra)


def simplicial_rays(n, lo=-3, hi=3):
    """``n`` independent integer vectors; they span a pointed simplicial cone."""
    return int_matrices(n, n, lo, hi).filter(lambda rows: determinant(rows) != 0)
