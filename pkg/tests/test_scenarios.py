from fractions import Fraction as Q

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from adelweil.adelic import Chain, localization_check, whitney_check
from adelweil.dgforms import InvariantPolynomial
from adelweil.errors import (
    DegreeMismatch, ParseError, PoleAtInfinityUnhandled, RepeatedWeights,
)
from adelweil.exactalg import MultiPoly, RatFunc
from adelweil.scenarios import (
    bott_sum, canonical_invariant, curve_adelic_integral, curve_chain_rows,
    projective_space_scenario, rational_roots, residue_at, scenario_to_json,
    whitney_scenario,
)

W1 = (Q(-1), Q(0))
W2 = (Q(-1), Q(0), Q(1))
V = ("f",)
f = MultiPoly.var(V, "f")


def test_degenerate_weighted_model_data():
    scn = projective_space_scenario(1, W1, 1, degenerate_variant=True)
    rep = bott_sum(scn)
    assert rep["total"] == 1 and rep["matches"] is True
    zd = scn.zeros["p0"]
    assert [x.render() for x in zd.a] == ["f^2"]
    assert zd.lift.rows[0][0].render() == "-f"


def test_reduced_zero_pair_data():
    scn = projective_space_scenario(1, W1, 1)
    rep = bott_sum(scn)
    assert sorted(r["value"] for r in rep["rows"]) == [0, 1]
    assert rep["total"] == 1
    assert scn.zeros["p0"].lift.rows[0][0].render() == "-1"


def test_fixed_point_sums_match_chern_numbers():
    for d in (1, 2, 3):
        rep = bott_sum(projective_space_scenario(1, W1, d))
        assert rep["total"] == d and rep["matches"] is True
    assert bott_sum(projective_space_scenario(1, W1, "tangent"))["total"] == 2
    for d in (1, 2):
        rep = bott_sum(projective_space_scenario(2, W2, d))
        assert rep["total"] == d * d and rep["matches"] is True
    rep = bott_sum(projective_space_scenario(2, W2, "tangent"))
    assert rep["total"] == 3 and rep["matches"] is True


@settings(max_examples=10)
@given(st.lists(st.integers(min_value=-6, max_value=6), min_size=2,
                max_size=2, unique=True))
def test_totals_do_not_depend_on_the_weights(ws):
    weights = tuple(Q(w) for w in ws)
    assert bott_sum(projective_space_scenario(1, weights, 3))["total"] == 3


def test_weight_scaling_leaves_the_sum_fixed():
    base = bott_sum(projective_space_scenario(2, W2, "tangent"))["total"]
    scaled = bott_sum(projective_space_scenario(
        2, tuple(3 * w for w in W2), "tangent"))["total"]
    assert base == scaled == 3


def test_scenario_guards():
    with pytest.raises(RepeatedWeights):
        projective_space_scenario(1, (Q(1), Q(1)), 1)
    with pytest.raises(DegreeMismatch):
        bott_sum(projective_space_scenario(1, W1, 1),
                 InvariantPolynomial.power_of_trace(1, 2))
    with pytest.raises(ParseError):
        projective_space_scenario(1, W1, "mystery")


def test_canonical_invariant_choice():
    assert canonical_invariant(
        projective_space_scenario(1, W1, 1)).render() == "c1"
    assert canonical_invariant(
        projective_space_scenario(2, W2, 1)).render() == "c1^2"
    assert canonical_invariant(
        projective_space_scenario(2, W2, "tangent")).render() == "c2"


def test_rational_root_extraction():
    roots, leftover = rational_roots((f - MultiPoly.const(V, 2)) ** 3)
    assert roots == [(Q(2), 3)] and leftover == 0
    roots, leftover = rational_roots(f * f + MultiPoly.const(V, 1))
    assert roots == [] and leftover == 2


def test_classical_residues_at_points():
    g = RatFunc(MultiPoly.const(V, 1), f * f - MultiPoly.const(V, 1))
    assert residue_at(g, Q(1)) == Q(1, 2)
    assert residue_at(g, Q(-1)) == Q(-1, 2)
    assert residue_at(g, Q(5)) == 0


def test_curve_totals_equal_the_degree():
    assert curve_adelic_integral(projective_space_scenario(1, W1, 0)) == 0
    assert curve_adelic_integral(projective_space_scenario(1, W1, 1)) == 1
    assert curve_adelic_integral(projective_space_scenario(1, W1, 3)) == 3


def test_curve_total_is_section_independent():
    scn = projective_space_scenario(1, W1, 3)
    scn.curve["section"] = (f - MultiPoly.const(V, 2)) ** 3
    assert [r["residue"] for r in curve_chain_rows(scn)] == [3]
    scn.curve["section"] = f * f - f
    rows = curve_chain_rows(scn)
    assert [r["residue"] for r in rows] == [1, 1, 1]
    assert rows[-1]["chain"][-1] == "inf"
    assert curve_adelic_integral(scn) == 3


def test_pole_at_infinity_needs_a_chart():
    scn = projective_space_scenario(1, W1, 3)
    scn.curve["section"] = f
    scn.curve["infinity_chart"] = False
    with pytest.raises(PoleAtInfinityUnhandled):
        curve_adelic_integral(scn)
    scn.curve["infinity_chart"] = True
    assert curve_adelic_integral(scn) == 3


def test_irrational_sections_are_refused():
    scn = projective_space_scenario(1, W1, 2)
    scn.curve["section"] = f * f - MultiPoly.const(V, 2)
    with pytest.raises(ParseError):
        curve_chain_rows(scn)


def test_localization_on_the_shipped_charts():
    for bundle in (1, 3, "tangent"):
        scn = projective_space_scenario(1, W1, bundle)
        assert localization_check(scn.chart, Chain(("q1", "inf")))
        assert localization_check(scn.chart, Chain(("x0", "q1")))
    scn = projective_space_scenario(1, W1, 1, degenerate_variant=True)
    assert localization_check(scn.chart, Chain(("q1", "inf")))


def test_whitney_scenario_verifies():
    scn = whitney_scenario()
    sub, quot, mixing, chain = scn.whitney
    assert whitney_check(sub, quot, mixing, chain)["ok"]


def test_serialization_carries_all_sections():
    js = scenario_to_json(projective_space_scenario(1, W1, 1))
    assert js["zeros"][0]["a"] == ["f"] and js["expected"] == "1"
    assert "chart" in js and "curve" in js
    assert "whitney" in scenario_to_json(whitney_scenario())
