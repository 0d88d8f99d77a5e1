"""Click curves, Myerson and GSP payments, VCG externalities."""

from fractions import Fraction

from oracles import riemann_myerson
from richads import fixtures
from richads.exact import int_opt_exhaustive
from richads.model import truthful_profile
from richads.pricing import (
    BidThresholds,
    bid_thresholds,
    bpb_rule,
    greedy_bpb_rule,
    greedy_value_rule,
    gsp_cpc_from_curve,
    gsp_prices,
    max_value_rule,
    mixture_rule,
    myerson_from_curve,
    myerson_payment,
    vcg_payments,
)

MONOTONE_RULES = [
    bpb_rule(),
    max_value_rule(),
    mixture_rule(),
    mixture_rule(Fraction(1, 2)),
    greedy_bpb_rule(),
    greedy_value_rule(),
]


def test_fx2_bpb_curve_shape():
    inst = fixtures.fx2()
    rep = truthful_profile(inst)
    curve = bid_thresholds(inst, rep, "a", bpb_rule())
    assert curve.thresholds == (Fraction(0), Fraction(7, 4), Fraction(3))
    assert curve.intervals == (
        (Fraction(0), Fraction(7, 4)),
        (Fraction(7, 4), Fraction(3)),
        (Fraction(3), Fraction(7, 2)),
    )
    assert curve.interval_clicks == (Fraction(4, 7), Fraction(4, 7), Fraction(1))


def test_fx2_myerson_payments():
    inst = fixtures.fx2()
    rep = truthful_profile(inst)
    out = myerson_payment(inst, rep, mixture_rule())
    assert out.payments == {"a": Fraction(13, 7), "b": Fraction(0)}
    assert out.cpc["a"] == Fraction(13, 7)  # one expected click
    assert out.cpc["b"] is None


def test_fx2_myerson_matches_integration_oracle():
    inst = fixtures.fx2()
    rep = truthful_profile(inst)
    approx = riemann_myerson(inst, rep, "a", mixture_rule(), steps=20000)
    assert abs(approx - float(Fraction(13, 7))) <= 1e-3


def test_fx3_myerson_payments():
    inst = fixtures.fx3()
    rep = truthful_profile(inst)
    out = myerson_payment(inst, rep, mixture_rule())
    assert out.payments == {
        "a": Fraction(1001, 1500),
        "b": Fraction(2, 3),
        "c": Fraction(0),
        "d": Fraction(1000001, 3000),
    }


def test_fx2_vcg_payments():
    inst = fixtures.fx2()
    rep = truthful_profile(inst)
    out = vcg_payments(inst, rep)
    assert out.payments == {"a": Fraction(0), "b": Fraction(3, 2)}
    assert out.mixture.branches[0][1].entries == {
        "a": ("ax1", Fraction(1)),
        "b": ("bx1", Fraction(1)),
    }


def test_fx6b_vcg_charges_the_displaced_value():
    inst = fixtures.fx6b()
    rep = truthful_profile(inst)
    out = vcg_payments(inst, rep)
    assert out.payments == {"a": Fraction(0), "b": Fraction(1, 2)}


def test_vcg_with_exhaustive_solver_agrees():
    inst = fixtures.fx2()
    rep = truthful_profile(inst)
    assert vcg_payments(inst, rep, exact_solver=int_opt_exhaustive).payments == {
        "a": Fraction(0),
        "b": Fraction(3, 2),
    }


def test_fx4_gsp_at_truth():
    inst = fixtures.fx4()
    rep = truthful_profile(inst)
    out = gsp_prices(inst, rep, mixture_rule(Fraction(1, 2)))
    # b pays the tie threshold 1 on the space branch and 1/M on the
    # max-value branch, half weight each
    assert out.payments == {"a": Fraction(0), "b": Fraction(101, 200)}


def test_fx4_gsp_underbid_clears_the_threshold():
    inst = fixtures.fx4()
    rep = truthful_profile(inst)
    rep = rep.replace("b", Fraction(1, 2), rep.subsets["b"])
    out = gsp_prices(inst, rep, mixture_rule(Fraction(1, 2)))
    # the space branch now serves b's small ad above a zero threshold;
    # only the max-value branch still charges 1/M
    assert out.payments["b"] == Fraction(1, 200)


def test_payments_individually_rational(small_corpus):
    for inst in small_corpus[:60]:
        rep = truthful_profile(inst)
        for rule in (mixture_rule(), mixture_rule(Fraction(1, 2))):
            for priced in (myerson_payment(inst, rep, rule), gsp_prices(inst, rep, rule)):
                for adv in inst.advertisers:
                    p = priced.payments[adv.adv_id]
                    x = priced.mixture.clicks(inst, adv.adv_id)
                    assert 0 <= p <= rep.bids[adv.adv_id] * x
                    if x > 0:
                        assert priced.cpc[adv.adv_id] == p / x
                    else:
                        assert priced.cpc[adv.adv_id] is None


def test_curves_nondecreasing(small_corpus):
    for inst in small_corpus[:40]:
        rep = truthful_profile(inst)
        for rule in MONOTONE_RULES:
            for adv in inst.advertisers:
                curve = bid_thresholds(inst, rep, adv.adv_id, rule)
                for left, right in zip(curve.interval_clicks, curve.interval_clicks[1:]):
                    assert left <= right


def test_zero_bid_pays_nothing():
    inst = fixtures.fx2()
    rep = truthful_profile(inst)
    rep = rep.replace("a", Fraction(0), rep.subsets["a"])
    for priced in (
        myerson_payment(inst, rep, mixture_rule()),
        gsp_prices(inst, rep, mixture_rule()),
    ):
        assert priced.payments["a"] == 0
        assert priced.cpc["a"] is None
    curve = bid_thresholds(inst, rep, "a", bpb_rule())
    assert curve.intervals == () and curve.interval_clicks == ()


def test_myerson_from_curve_arithmetic():
    curve = BidThresholds(
        adv_id="a",
        rule_name="bpb",
        cap=Fraction(2),
        thresholds=(Fraction(0), Fraction(1)),
        intervals=((Fraction(0), Fraction(1)), (Fraction(1), Fraction(2))),
        interval_clicks=(Fraction(1), Fraction(2)),
    )
    assert myerson_from_curve(curve, Fraction(2), Fraction(2)) == 1
    assert myerson_from_curve(curve, Fraction(1, 2), Fraction(1)) == 0
    assert gsp_cpc_from_curve(curve, Fraction(2), Fraction(2)) == 1
    assert gsp_cpc_from_curve(curve, Fraction(2), Fraction(0)) == 0
    assert gsp_cpc_from_curve(curve, Fraction(1, 2), Fraction(1)) == 0


def test_priced_outcome_serialization():
    inst = fixtures.fx2()
    rep = truthful_profile(inst)
    out = myerson_payment(inst, rep, mixture_rule())
    doc = out.to_dict()
    assert doc["rule"] == "myerson"
    assert doc["payments"] == {"a": "13/7", "b": "0"}
    assert [b["probability"] for b in doc["branches"]] == ["2/3", "1/3"]
    assert doc["branches"][0]["entries"]["a"] == {"ad": "ax2", "weight": "1"}
