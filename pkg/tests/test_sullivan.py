from fractions import Fraction as Q

from hypothesis import given, settings
from hypothesis import strategies as st

from adelweil.exactalg import QMatrix
from adelweil.simplicial import (
    boundary_simplex_sset, disjoint_points, standard_simplex_sset,
)
from adelweil.sullivan import (
    cochain_complex, cohomology, integrate_map, sparse_nullspace,
    sullivan_basis, verify_de_rham,
)


@settings(max_examples=20)
@given(st.lists(
    st.lists(st.tuples(st.integers(min_value=0, max_value=4),
                       st.integers(min_value=-3, max_value=3)),
             max_size=4),
    max_size=4))
def test_sparse_nullspace_matches_dense_rank(raw_rows):
    order = {i: i for i in range(5)}
    rows = [{lab: Q(v) for lab, v in row if v} for row in raw_rows]
    rows = [r for r in rows if r]
    basis = sparse_nullspace(rows, order)
    dense = QMatrix([[Q(dict(row).get(j, 0)) for j in range(5)]
                     for row in [list(r.items()) for r in rows]]
                    or [[Q(0)] * 5])
    assert len(basis) == 5 - dense.rank()
    for _, vec in basis:
        for row in rows:
            total = sum(c * vec.get(lab, Q(0)) for lab, c in row.items())
            assert total == 0


def test_constant_family_basis_on_the_interval():
    S = standard_simplex_sset(1)
    weight0 = sullivan_basis(S, 0, 0)
    assert len(weight0) == 1
    u = weight0[0]
    assert u.is_compatible() and u.d().is_zero()


def test_families_are_compatible_and_d_squares_to_zero():
    S = boundary_simplex_sset(2)
    for q in (0, 1):
        for w in range(3):
            for u in sullivan_basis(S, q, w):
                assert u.is_compatible()
                assert u.d().d().is_zero()


def test_integration_commutes_with_the_differential():
    S = boundary_simplex_sset(2)
    for q in (0, 1):
        for w in range(1, 4):
            for u in sullivan_basis(S, q, w):
                assert integrate_map(u.d()) == \
                    integrate_map(u).coboundary()


def test_cochain_cohomology_of_the_circle_model():
    ranks = cohomology(cochain_complex(boundary_simplex_sset(2)))
    assert ranks == [1, 1, 0]


def test_cochain_cohomology_of_two_points():
    ranks = cohomology(cochain_complex(disjoint_points(2)))
    assert ranks == [2, 0]


def test_comparison_on_small_spaces():
    for S in (standard_simplex_sset(1), disjoint_points(2),
              boundary_simplex_sset(2)):
        res = verify_de_rham(S)
        assert res["ok"], res
        assert res["sullivan_ranks"] == res["cochain_ranks"]


def test_multiplicativity_defects_are_solved_coboundaries():
    res = verify_de_rham(boundary_simplex_sset(2))
    assert res["multiplicativity_ok"]
    assert res["multiplicativity_pairs"] > 0
