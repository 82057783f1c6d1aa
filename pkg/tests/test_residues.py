from fractions import Fraction as Q

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from adelweil.dgforms import InvariantPolynomial
from adelweil.errors import (
    DegreeError, IdentityFailed, MembershipNotFound, NotSimple, ParseError,
    PrecisionExhausted,
)
from adelweil.exactalg import MultiPoly, RingMatrix, TruncatedSeries
from adelweil.residues import (
    GeneralizedFraction, LocalZeroData, coordinate_change_check,
    gauss_bonnet_local, local_invariant, residue_general, residue_monomial,
    simple_zero_invariant,
)

from strategies import fractions, polys

V1 = ("f",)
V2 = ("f1", "f2")
f = MultiPoly.var(V1, "f")
f1, f2 = MultiPoly.variables(V2)
one2 = MultiPoly.const(V2, 1)
P1 = InvariantPolynomial.elementary(1, 1)
P2 = InvariantPolynomial.elementary(2, 2)


def test_fraction_construction_guards():
    with pytest.raises(ParseError):
        GeneralizedFraction(V1, f, (MultiPoly.const(V1, 1) + f,))
    with pytest.raises(ParseError):
        GeneralizedFraction(V1, f, (MultiPoly.zero(V1),))
    with pytest.raises(ParseError):
        GeneralizedFraction(V2, one2, (f1,))


def test_monomial_residue_reads_one_coefficient():
    gf = GeneralizedFraction(V2, f1 * 3 + f1 * f2 ** 2 * 5,
                             (f1 ** 2, f2 ** 3))
    assert residue_monomial(gf) == 5
    assert residue_monomial(GeneralizedFraction(V2, one2, (f1, f2))) == 1
    assert residue_monomial(GeneralizedFraction(V1, -f, (f ** 2,))) == -1


def test_permuted_slots_flip_the_sign():
    assert residue_general(GeneralizedFraction(V2, one2, (f2, f1))) == -1
    assert residue_general(GeneralizedFraction(V2, one2, (f1, f2))) == 1


def test_unit_factors_are_divided_out():
    u_times_f = (MultiPoly.const(V1, 1) + f) * f
    assert residue_general(GeneralizedFraction(
        V1, MultiPoly.const(V1, 1), (u_times_f,))) == 1
    # 1/((1+f) f^2): expand (1+f)^-1 = 1 - f + .., coefficient of f is -1
    u_times_f2 = (MultiPoly.const(V1, 1) + f) * f ** 2
    assert residue_general(GeneralizedFraction(
        V1, MultiPoly.const(V1, 1), (u_times_f2,))) == -1


def test_general_path_agrees_with_known_lengths():
    assert residue_general(GeneralizedFraction(V2, one2, (f1, f1 + f2)),
                           stability=True) == 1
    assert gauss_bonnet_local((f,), V1) == (1, 1)
    assert gauss_bonnet_local((f1 ** 2, f2 ** 3), V2) == (6, 6)
    assert gauss_bonnet_local((f1 ** 2 - f2 ** 3, f2 ** 2), V2,
                              stability=True) == (4, 4)


def test_membership_search_respects_the_cap():
    gf = GeneralizedFraction(V2, one2, (f1 ** 2 - f2 ** 3, f2 ** 2))
    with pytest.raises(MembershipNotFound):
        residue_general(gf, cap=1)


def test_series_numerator_precision_is_honest():
    num = TruncatedSeries.from_poly(f, 2)
    gf = GeneralizedFraction(V1, num, (f ** 3,))
    with pytest.raises(PrecisionExhausted):
        residue_general(gf)
    wide = GeneralizedFraction(V1, TruncatedSeries.from_poly(f, 9), (f ** 3,))
    assert residue_general(wide) == 0


DENOMS = (f1 + f2 ** 2, f2 ** 3)


@settings(max_examples=15)
@given(polys(V2, max_degree=3, max_terms=3),
       polys(V2, max_degree=3, max_terms=3), fractions(), fractions())
def test_residue_is_linear_in_the_numerator(g, h, alpha, beta):
    combo = g * alpha + h * beta
    lhs = residue_general(GeneralizedFraction(V2, combo, DENOMS))
    rhs = alpha * residue_general(GeneralizedFraction(V2, g, DENOMS)) + \
        beta * residue_general(GeneralizedFraction(V2, h, DENOMS))
    assert lhs == rhs


UNITS = (one2, one2 + f1, one2 + f1 * f2, MultiPoly.const(V2, 2) + f2)


@settings(max_examples=15)
@given(st.sampled_from(UNITS), polys(V2, max_degree=2, max_terms=3))
def test_unit_rescaling_of_a_denominator(u, g):
    plain = residue_general(GeneralizedFraction(V2, g, DENOMS))
    scaled = residue_general(GeneralizedFraction(
        V2, g * u, (DENOMS[0] * u, DENOMS[1])))
    assert scaled == plain


def test_weighted_model_invariant():
    zd = LocalZeroData(V1, 1, (f ** 2,), RingMatrix([[-f]]))
    assert local_invariant(P1, zd) == 1


def test_chart_pair_of_reduced_zeros():
    zd0 = LocalZeroData(V1, 1, (f,),
                        RingMatrix([[MultiPoly.const(V1, -1)]]))
    zdi = LocalZeroData(V1, 1, (f,),
                        RingMatrix([[MultiPoly.const(V1, 0)]]))
    assert local_invariant(P1, zd0) == 1
    assert local_invariant(P1, zdi) == 0
    assert simple_zero_invariant(P1, zd0) == 1
    assert simple_zero_invariant(P1, zdi) == 0


def test_closed_form_matches_residue_with_scaling():
    zdc = LocalZeroData(V1, 1, (f * 3,),
                        RingMatrix([[MultiPoly.const(V1, 5)]]))
    assert simple_zero_invariant(P1, zdc) == Q(-5, 3)
    assert local_invariant(P1, zdc) == Q(-5, 3)


def test_closed_form_matches_residue_in_two_variables():
    lift = RingMatrix([[MultiPoly.const(V2, 7), MultiPoly.const(V2, 0)],
                       [MultiPoly.const(V2, 0), MultiPoly.const(V2, 11)]])
    zd = LocalZeroData(V2, 2, (f1 * 2, f2 * 3), lift)
    assert simple_zero_invariant(P2, zd) == local_invariant(P2, zd) == \
        Q(77, 6)


def test_closed_form_refuses_degenerate_zeros():
    zd = LocalZeroData(V1, 1, (f ** 2,), RingMatrix([[-f]]))
    with pytest.raises(NotSimple):
        simple_zero_invariant(P1, zd)


def test_invariant_degree_must_match_dimension():
    zd = LocalZeroData(V1, 1, (f,), RingMatrix([[MultiPoly.const(V1, 1)]]))
    with pytest.raises(DegreeError):
        local_invariant(InvariantPolynomial.power_of_trace(1, 2), zd)


@settings(max_examples=15)
@given(polys(V1, max_degree=2, max_terms=2))
def test_lift_changes_inside_the_ideal_are_invisible(p):
    zd = LocalZeroData(V1, 1, (f ** 2,),
                       RingMatrix([[-f + f ** 2 * p]]))
    assert local_invariant(P1, zd) == 1


def test_stability_recomputation_agrees():
    zd = LocalZeroData(V2, 2, (f1 ** 2 - f2 ** 3, f2 ** 2),
                       RingMatrix([[f1, MultiPoly.zero(V2)],
                                   [MultiPoly.zero(V2), f2]]))
    assert local_invariant(P2, zd, stability=True) == \
        local_invariant(P2, zd)


def test_coordinate_change_on_the_weighted_model():
    zd = LocalZeroData(V1, 1, (f ** 2,), RingMatrix([[-f]]))
    assert coordinate_change_check(P1, zd, {"f": f + f ** 2})


LINEAR_PARTS = ((1, 0, 0, 1), (1, 1, 0, 1), (2, 1, 1, 1), (0, 1, -1, 0))


@settings(max_examples=8)
@given(st.sampled_from(LINEAR_PARTS),
       polys(V2, max_degree=2, max_terms=2, min_degree=2),
       polys(V2, max_degree=2, max_terms=2, min_degree=2))
def test_coordinate_change_invariance(linear, tail1, tail2):
    a, b, c, d = linear
    change = {"f1": f1 * a + f2 * b + tail1, "f2": f1 * c + f2 * d + tail2}
    lift = RingMatrix([[MultiPoly.const(V2, 7), MultiPoly.const(V2, 1)],
                       [MultiPoly.const(V2, 0), MultiPoly.const(V2, 11)]])
    zd = LocalZeroData(V2, 2, (f1 * 2 + f2 ** 2, f2 * 3), lift)
    assert coordinate_change_check(P2, zd, change, precision=8)
