"""Pricing: bid threshold curves, Myerson payments, GSP prices, VCG.

A rule's click curve for one advertiser is piecewise constant in their bid;
its breakpoints can only sit where the bid ties another ad's bang-per-buck
or value. Payments integrate that curve (Myerson), look up the lowest bid
preserving the current clicks (GSP), or charge externalities at an exact
optimum (VCG). Every payment is computed and asserted in exact rationals.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from typing import Callable, Mapping

from . import exact, heuristics, monotone
from .model import (
    Allocation,
    Instance,
    Mixture,
    NonMonotoneClickCurveError,
    Outcome,
    ReportProfile,
    as_mixture,
    effective_values,
)

# --- allocation rule descriptors -----------------------------------------


@dataclass(frozen=True)
class AllocationRule:
    """A named allocation rule, possibly a two-branch mixture.

    `p` is the probability of the first branch for mixtures; `cardinality`
    caps how many advertisers the greedy variants may serve.
    """

    name: str
    p: Fraction | None = None
    cardinality: int | None = None


def bpb_rule() -> AllocationRule:
    return AllocationRule("bpb")


def max_value_rule() -> AllocationRule:
    return AllocationRule("max-value")


def mixture_rule(p: Fraction = monotone.TRUTHFUL_MIX_P) -> AllocationRule:
    return AllocationRule("mixture", p=Fraction(p))


def greedy_bpb_rule(cardinality: int | None = None) -> AllocationRule:
    return AllocationRule("greedy-bpb", cardinality=cardinality)


def greedy_value_rule(cardinality: int | None = None) -> AllocationRule:
    return AllocationRule("greedy-value", cardinality=cardinality)


def randomized_greedy_rule(
    p: Fraction = heuristics.RANDOMIZED_GREEDY_P, cardinality: int | None = None
) -> AllocationRule:
    return AllocationRule("randomized-greedy", p=Fraction(p), cardinality=cardinality)


def rule_branches(rule: AllocationRule) -> tuple[tuple[Fraction, str], ...]:
    """(probability, branch name) pairs; branch names key the dispatch below."""
    if rule.name == "mixture":
        return ((rule.p, "bpb"), (1 - rule.p, "max-value"))
    if rule.name == "randomized-greedy":
        return ((rule.p, "greedy-bpb"), (1 - rule.p, "max-value"))
    if rule.name in ("bpb", "max-value", "greedy-bpb", "greedy-value"):
        return ((Fraction(1), rule.name),)
    raise ValueError(f"unknown allocation rule {rule.name!r}")


def branch_allocate(
    inst: Instance, rep: ReportProfile, branch: str, cardinality: int | None = None
) -> Allocation:
    if branch == "bpb":
        return monotone.bpb_allocation(inst, rep)
    if branch == "max-value":
        return monotone.max_value_allocation(inst, rep)
    if branch == "greedy-bpb":
        return heuristics.greedy_by_bpb(inst, rep, cardinality)
    if branch == "greedy-value":
        return heuristics.greedy_by_value(inst, rep, cardinality)
    raise ValueError(f"unknown branch {branch!r}")


def rule_allocate(inst: Instance, rep: ReportProfile, rule: AllocationRule) -> Outcome:
    branches = rule_branches(rule)
    if len(branches) == 1:
        return branch_allocate(inst, rep, branches[0][1], rule.cardinality)
    return Mixture(
        branches=tuple(
            (prob, branch_allocate(inst, rep, branch, rule.cardinality))
            for prob, branch in branches
        )
    )


# breakpoint kinds a branch's click curve can have: bids where the
# advertiser's bang-per-buck ties someone else's, or where values tie
_BRANCH_KINDS = {
    "bpb": ("bpb",),
    "max-value": ("value",),
    "greedy-bpb": ("bpb", "value"),
    "greedy-value": ("value",),
}


# --- click curves ---------------------------------------------------------


@dataclass(frozen=True)
class BidThresholds:
    """Piecewise-constant click curve of one advertiser's bid on (0, cap].

    `thresholds` starts at 0 and lists every candidate breakpoint up to the
    cap; `intervals` are the open spans between consecutive breakpoints
    (plus the final span up to the cap) and `interval_clicks[j]` is the
    advertiser's expected clicks anywhere inside `intervals[j]`.
    """

    adv_id: str
    rule_name: str
    cap: Fraction
    thresholds: tuple[Fraction, ...]
    intervals: tuple[tuple[Fraction, Fraction], ...]
    interval_clicks: tuple[Fraction, ...]


def _tie_candidates(
    inst: Instance, rep: ReportProfile, adv_id: str, kinds: tuple[str, ...], cap: Fraction
) -> list[Fraction]:
    mine = inst.advertiser(adv_id)
    my_subset = rep.subsets.get(adv_id, frozenset())
    others: list[tuple[Fraction, Fraction]] = []  # (effective value, space)
    for other in inst.advertisers:
        if other.adv_id == adv_id:
            continue
        bid = rep.bids.get(other.adv_id, Fraction(0))
        if bid <= 0:
            continue
        subset = rep.subsets.get(other.adv_id, frozenset())
        for ad in other.ads:
            if ad.ad_id in subset and bid * ad.alpha > 0:
                others.append((bid * ad.alpha, ad.space))
    out: set[Fraction] = set()
    for ad in mine.ads:
        if ad.ad_id not in my_subset or ad.alpha <= 0:
            continue
        for eff, space in others:
            if "bpb" in kinds:
                tie = eff * ad.space / (space * ad.alpha)
                if 0 < tie <= cap:
                    out.add(tie)
            if "value" in kinds:
                tie = eff / ad.alpha
                if 0 < tie <= cap:
                    out.add(tie)
    return sorted(out)


def _clicks_with_bid(
    inst: Instance,
    rep: ReportProfile,
    adv_id: str,
    bid: Fraction,
    branches: tuple[tuple[Fraction, str], ...],
    cardinality: int | None,
) -> Fraction:
    probe = rep.replace(adv_id, bid, rep.subsets.get(adv_id, frozenset()))
    total = Fraction(0)
    for prob, branch in branches:
        total += prob * branch_allocate(inst, probe, branch, cardinality).clicks(inst, adv_id)
    return total


def _build_curve(
    inst: Instance,
    rep: ReportProfile,
    adv_id: str,
    cap: Fraction,
    branches: tuple[tuple[Fraction, str], ...],
    cardinality: int | None,
    rule_name: str,
) -> BidThresholds:
    kinds: tuple[str, ...] = ()
    for _prob, branch in branches:
        for kind in _BRANCH_KINDS[branch]:
            if kind not in kinds:
                kinds = kinds + (kind,)
    thresholds = [Fraction(0)] + _tie_candidates(inst, rep, adv_id, kinds, cap)
    intervals: list[tuple[Fraction, Fraction]] = []
    for lo, hi in zip(thresholds, thresholds[1:]):
        intervals.append((lo, hi))
    if thresholds[-1] < cap:
        intervals.append((thresholds[-1], cap))
    clicks = tuple(
        _clicks_with_bid(inst, rep, adv_id, (lo + hi) / 2, branches, cardinality)
        for lo, hi in intervals
    )
    for j in range(1, len(clicks)):
        if clicks[j] < clicks[j - 1]:
            raise NonMonotoneClickCurveError(
                adv_id, rule_name, intervals[j - 1], intervals[j], clicks[j - 1], clicks[j]
            )
    return BidThresholds(
        adv_id=adv_id,
        rule_name=rule_name,
        cap=cap,
        thresholds=tuple(thresholds),
        intervals=tuple(intervals),
        interval_clicks=clicks,
    )


def bid_thresholds(inst: Instance, rep: ReportProfile, adv_id: str, rule: AllocationRule) -> BidThresholds:
    """The rule's click curve for `adv_id`, capped at their reported bid."""
    cap = rep.bids.get(adv_id, Fraction(0))
    if cap <= 0:
        return BidThresholds(adv_id, rule.name, cap, (Fraction(0),), (), ())
    return _build_curve(inst, rep, adv_id, cap, rule_branches(rule), rule.cardinality, rule.name)


def myerson_from_curve(curve: BidThresholds, bid: Fraction, clicks_at_bid: Fraction) -> Fraction:
    """Myerson payment b*x(b) minus the exact click-curve integral up to b."""
    paid = bid * clicks_at_bid
    for (lo, hi), clicks in zip(curve.intervals, curve.interval_clicks):
        if lo >= bid:
            break
        paid -= (min(hi, bid) - lo) * clicks
    return paid


def gsp_cpc_from_curve(curve: BidThresholds, bid: Fraction, clicks_at_bid: Fraction) -> Fraction:
    """Lowest bid keeping the current clicks: GSP's per-click price."""
    if clicks_at_bid == 0:
        return Fraction(0)
    for (lo, _hi), clicks in zip(curve.intervals, curve.interval_clicks):
        if lo >= bid:
            break
        if clicks == clicks_at_bid:
            return lo
    return bid


# --- priced outcomes -------------------------------------------------------


@dataclass(frozen=True)
class PricedOutcome:
    """An allocation lottery with per-advertiser payments.

    `cpc` is payment divided by expected clicks (None when clicks are zero).
    Invariant, asserted at construction sites: 0 <= payment <= bid * clicks.
    """

    rule_name: str  # "myerson", "gsp" or "vcg"
    mixture: Mixture
    payments: Mapping[str, Fraction]
    cpc: Mapping[str, Fraction | None]

    def total_payment(self) -> Fraction:
        return sum(self.payments.values(), Fraction(0))

    def to_dict(self) -> dict:
        return {
            "rule": self.rule_name,
            "branches": [
                {
                    "probability": str(prob),
                    "entries": {
                        adv: {"ad": ad, "weight": str(w)} for adv, (ad, w) in sorted(alloc.entries.items())
                    },
                }
                for prob, alloc in self.mixture.branches
            ],
            "payments": {adv: str(p) for adv, p in sorted(self.payments.items())},
            "cpc": {adv: (None if c is None else str(c)) for adv, c in sorted(self.cpc.items())},
        }


def _finish_outcome(
    inst: Instance,
    rep: ReportProfile,
    mixture: Mixture,
    payments: dict[str, Fraction],
    rule_name: str,
) -> PricedOutcome:
    cpc: dict[str, Fraction | None] = {}
    for adv in inst.advertisers:
        p = payments.get(adv.adv_id, Fraction(0))
        x = mixture.clicks(inst, adv.adv_id)
        bid = rep.bids.get(adv.adv_id, Fraction(0))
        assert 0 <= p <= bid * x, (
            f"payment {p} for {adv.adv_id} violates 0 <= p <= bid*clicks = {bid * x}"
        )
        payments[adv.adv_id] = p
        cpc[adv.adv_id] = p / x if x > 0 else None
    return PricedOutcome(rule_name=rule_name, mixture=mixture, payments=payments, cpc=cpc)


def myerson_payment(inst: Instance, rep: ReportProfile, rule: AllocationRule) -> PricedOutcome:
    """Threshold payments making the (monotone) rule truthful."""
    branches = rule_branches(rule)
    mixture = as_mixture(rule_allocate(inst, rep, rule))
    payments: dict[str, Fraction] = {}
    for adv in inst.advertisers:
        bid = rep.bids.get(adv.adv_id, Fraction(0))
        if bid <= 0 or not rep.subsets.get(adv.adv_id, frozenset()):
            payments[adv.adv_id] = Fraction(0)
            continue
        total = Fraction(0)
        for (prob, branch), (_p2, alloc) in zip(branches, mixture.branches):
            x_b = alloc.clicks(inst, adv.adv_id)
            curve = _build_curve(inst, rep, adv.adv_id, bid, ((Fraction(1), branch),), rule.cardinality, rule.name)
            total += prob * myerson_from_curve(curve, bid, x_b)
        payments[adv.adv_id] = total
    return _finish_outcome(inst, rep, mixture, payments, "myerson")


def gsp_prices(inst: Instance, rep: ReportProfile, rule: AllocationRule) -> PricedOutcome:
    """Generalized second price: per branch, clicks times the lowest
    bid that would have kept them."""
    branches = rule_branches(rule)
    mixture = as_mixture(rule_allocate(inst, rep, rule))
    payments: dict[str, Fraction] = {}
    for adv in inst.advertisers:
        bid = rep.bids.get(adv.adv_id, Fraction(0))
        if bid <= 0 or not rep.subsets.get(adv.adv_id, frozenset()):
            payments[adv.adv_id] = Fraction(0)
            continue
        total = Fraction(0)
        for (prob, branch), (_p2, alloc) in zip(branches, mixture.branches):
            x_b = alloc.clicks(inst, adv.adv_id)
            if x_b == 0:
                continue
            curve = _build_curve(inst, rep, adv.adv_id, bid, ((Fraction(1), branch),), rule.cardinality, rule.name)
            total += prob * gsp_cpc_from_curve(curve, bid, x_b) * x_b
        payments[adv.adv_id] = total
    return _finish_outcome(inst, rep, mixture, payments, "gsp")


def reported_value(inst: Instance, rep: ReportProfile, alloc: Allocation) -> Fraction:
    eff = effective_values(inst, rep)
    return sum(
        (eff[(adv_id, ad_id)] * weight for adv_id, (ad_id, weight) in alloc.entries.items()),
        Fraction(0),
    )


def vcg_payments(
    inst: Instance,
    rep: ReportProfile,
    exact_solver: Callable[[Instance, ReportProfile], Allocation] | None = None,
) -> PricedOutcome:
    """Externality payments on top of the exact integral optimum."""
    solver = exact_solver if exact_solver is not None else exact.int_opt_dp
    alloc = solver(inst, rep)
    eff = effective_values(inst, rep)
    total = reported_value(inst, rep, alloc)
    payments: dict[str, Fraction] = {}
    for adv in inst.advertisers:
        entry = alloc.entries.get(adv.adv_id)
        if entry is None:
            payments[adv.adv_id] = Fraction(0)
            continue
        term = eff[(adv.adv_id, entry[0])] * entry[1]
        without = rep.replace(adv.adv_id, Fraction(0), frozenset())
        sw_without = reported_value(inst, without, solver(inst, without))
        payments[adv.adv_id] = sw_without - (total - term)
    return _finish_outcome(inst, rep, as_mixture(alloc), payments, "vcg")
