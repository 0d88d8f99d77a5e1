"""Empirical equilibria: strategy grids, best responses, Nash search, PoA.

Strategies live on a no-overbidding bid grid crossed with every catalog
subset. Utilities are always at true values. `find_pure_nash` runs
sequential best-response dynamics from the truthful profile; a full pass
without a strict improvement doubles as the exhaustive verification that
the fixed point is a grid Nash equilibrium.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from itertools import combinations
from typing import Iterable

from . import exact, pricing
from .model import (
    GuardExceededError,
    Instance,
    Mixture,
    ReportProfile,
    as_mixture,
    social_welfare,
    truthful_profile,
)
from .monotone import (
    GSP_MIX_P,
    bpb_allocation,
    max_value_allocation,
    space_assignment,
)

STRATEGY_ADS_GUARD = 4


@dataclass(frozen=True)
class Mechanism:
    """How reports turn into an outcome and payments."""

    pricing: str  # "gsp", "myerson" or "vcg"
    rule: pricing.AllocationRule | None = None  # None only for vcg

    def describe(self) -> str:
        if self.pricing == "vcg":
            return "vcg"
        return f"{self.rule.name}(p={self.rule.p})+{self.pricing}" if self.rule.p is not None else f"{self.rule.name}+{self.pricing}"


def gsp_mixture_mechanism(p: Fraction = GSP_MIX_P) -> Mechanism:
    return Mechanism(pricing="gsp", rule=pricing.mixture_rule(p))


def myerson_mixture_mechanism(p: Fraction | None = None) -> Mechanism:
    rule = pricing.mixture_rule(p) if p is not None else pricing.mixture_rule()
    return Mechanism(pricing="myerson", rule=rule)


def vcg_mechanism() -> Mechanism:
    return Mechanism(pricing="vcg", rule=None)


@dataclass(frozen=True)
class StrategySpace:
    adv_id: str
    bids: tuple[Fraction, ...]  # ascending
    subsets: tuple[frozenset[str], ...]  # preference order: larger first


def strategy_spaces(
    inst: Instance, delta: Fraction, ads_guard: int = STRATEGY_ADS_GUARD
) -> dict[str, StrategySpace]:
    """No-overbidding grids: bids {0, delta, 2*delta, ...} plus the true value,
    crossed with every subset of the catalog (the empty one included)."""
    delta = Fraction(delta)
    if delta <= 0:
        raise ValueError(f"grid step must be positive, got {delta}")
    spaces = {}
    for adv in inst.advertisers:
        if len(adv.ads) > ads_guard:
            raise GuardExceededError(
                f"advertiser {adv.adv_id!r} has {len(adv.ads)} ads; subset grid guard is {ads_guard}"
            )
        bids = []
        b = Fraction(0)
        while b < adv.value_per_click:
            bids.append(b)
            b += delta
        bids.append(adv.value_per_click)
        ids = sorted(adv.ad_ids())
        subsets = []
        for size in range(len(ids), -1, -1):
            for combo in combinations(ids, size):
                subsets.append(frozenset(combo))
        spaces[adv.adv_id] = StrategySpace(adv_id=adv.adv_id, bids=tuple(bids), subsets=tuple(subsets))
    return spaces


class _Evaluator:
    """Memoised outcome/payment evaluation across many nearby profiles.

    Branch allocations are cached per profile; click curves per (advertiser,
    branch, subset, everyone else's report), since an advertiser's own bid
    moves along a fixed curve while the rest of the profile stands still.
    """

    def __init__(self, inst: Instance, truth: ReportProfile, mechanism: Mechanism):
        self.inst = inst
        self.truth = truth
        self.mech = mechanism
        self.branches = () if mechanism.pricing == "vcg" else pricing.rule_branches(mechanism.rule)
        self._allocs: dict = {}
        self._curves: dict = {}
        self._vcg: dict = {}

    def _branch_alloc(self, rep: ReportProfile, branch: str):
        key = (branch, rep.key())
        got = self._allocs.get(key)
        if got is None:
            cardinality = self.mech.rule.cardinality if self.mech.rule else None
            got = pricing.branch_allocate(self.inst, rep, branch, cardinality)
            self._allocs[key] = got
        return got

    def outcome(self, rep: ReportProfile) -> Mixture:
        if self.mech.pricing == "vcg":
            return as_mixture(self._vcg_outcome(rep).mixture)
        return Mixture(
            branches=tuple((prob, self._branch_alloc(rep, branch)) for prob, branch in self.branches)
        )

    def _vcg_outcome(self, rep: ReportProfile) -> pricing.PricedOutcome:
        key = rep.key()
        got = self._vcg.get(key)
        if got is None:
            got = pricing.vcg_payments(self.inst, rep, exact.int_opt_dp)
            self._vcg[key] = got
        return got

    def _others_key(self, rep: ReportProfile, adv_id: str):
        return (
            tuple(sorted((a, b) for a, b in rep.bids.items() if a != adv_id)),
            tuple(
                (a, tuple(sorted(s))) for a, s in sorted(rep.subsets.items()) if a != adv_id
            ),
        )

    def _curve(self, rep: ReportProfile, adv_id: str, branch: str, cap: Fraction):
        subset = rep.subsets.get(adv_id, frozenset())
        key = (adv_id, branch, tuple(sorted(subset)), self._others_key(rep, adv_id), cap)
        got = self._curves.get(key)
        if got is None:
            cardinality = self.mech.rule.cardinality if self.mech.rule else None
            got = pricing._build_curve(
                self.inst, rep, adv_id, cap, ((Fraction(1), branch),), cardinality, branch
            )
            self._curves[key] = got
        return got

    def clicks(self, rep: ReportProfile, adv_id: str) -> Fraction:
        return self.outcome(rep).clicks(self.inst, adv_id)

    def payment(self, rep: ReportProfile, adv_id: str) -> Fraction:
        if self.mech.pricing == "vcg":
            return self._vcg_outcome(rep).payments.get(adv_id, Fraction(0))
        bid = rep.bids.get(adv_id, Fraction(0))
        if bid <= 0 or not rep.subsets.get(adv_id, frozenset()):
            return Fraction(0)
        cap = max(bid, self.truth.bids.get(adv_id, bid))
        total = Fraction(0)
        for prob, branch in self.branches:
            x_b = self._branch_alloc(rep, branch).clicks(self.inst, adv_id)
            if self.mech.pricing == "gsp":
                if x_b == 0:
                    continue
                curve = self._curve(rep, adv_id, branch, cap)
                total += prob * pricing.gsp_cpc_from_curve(curve, bid, x_b) * x_b
            else:
                curve = self._curve(rep, adv_id, branch, cap)
                total += prob * pricing.myerson_from_curve(curve, bid, x_b)
        return total

    def utility(self, rep: ReportProfile, adv_id: str) -> Fraction:
        value = self.truth.bids.get(adv_id, Fraction(0))
        return value * self.clicks(rep, adv_id) - self.payment(rep, adv_id)


def utility(inst: Instance, truth: ReportProfile, rep: ReportProfile, mechanism: Mechanism) -> dict[str, Fraction]:
    """Every advertiser's utility at true values under the mechanism."""
    ev = _Evaluator(inst, truth, mechanism)
    return {adv.adv_id: ev.utility(rep, adv.adv_id) for adv in inst.advertisers}


def best_response(
    inst: Instance,
    truth: ReportProfile,
    rep: ReportProfile,
    adv_id: str,
    mechanism: Mechanism,
    space: StrategySpace,
    _evaluator: _Evaluator | None = None,
) -> tuple[Fraction, frozenset[str], Fraction]:
    """Utility-maximal (bid, subset) for one advertiser, holding others fixed.

    Ties prefer the lowest bid, then the largest subset (size descending,
    then lexicographically smallest id tuple).
    """
    ev = _evaluator if _evaluator is not None else _Evaluator(inst, truth, mechanism)
    best = None  # (utility, bid index, subset index)
    for si, subset in enumerate(space.subsets):
        for bi, bid in enumerate(space.bids):
            u = ev.utility(rep.replace(adv_id, bid, subset), adv_id)
            if best is None or u > best[0] or (u == best[0] and (bi, si) < (best[1], best[2])):
                best = (u, bi, si)
    assert best is not None, "empty strategy space"
    return space.bids[best[1]], space.subsets[best[2]], best[0]


@dataclass(frozen=True)
class BetaCheck:
    """One evaluation of the density-vs-welfare diagnostic at a profile.

    `beta` is the reported value density of the ad covering the middle unit
    of the space assignment (0 when uncovered); the bound compares
    beta * total_space against twice the true welfare of the integral and
    max-value allocations at the same profile.
    """

    beta: Fraction
    k_star: int
    lhs: Fraction
    rhs: Fraction
    ok: bool


def beta_bound_check(inst: Instance, rep: ReportProfile) -> BetaCheck:
    assignment = space_assignment(inst, rep, want_trace=True)
    trace = assignment.trace
    k_star = trace.total_units // 2 + 1
    run = trace.covering(k_star)
    beta = run.density if run is not None else Fraction(0)
    lhs = beta * inst.total_space
    rhs = 2 * social_welfare(inst, bpb_allocation(inst, rep)) + 2 * social_welfare(
        inst, max_value_allocation(inst, rep)
    )
    return BetaCheck(beta=beta, k_star=k_star, lhs=lhs, rhs=rhs, ok=lhs <= rhs)


@dataclass(frozen=True)
class NashResult:
    status: str  # "converged", "cycle" or "max-rounds"
    equilibrium: ReportProfile | None
    rounds: int
    verified: bool
    cycle: tuple[ReportProfile, ...] | None = None
    beta_checks: int = 0
    beta_violations: tuple[BetaCheck, ...] = ()


def find_pure_nash(
    inst: Instance,
    truth: ReportProfile,
    mechanism: Mechanism,
    spaces: dict[str, StrategySpace],
    max_rounds: int = 50,
    beta_check: bool = False,
) -> NashResult:
    """Sequential best-response dynamics from the truthful profile.

    Convergence means a full pass in which nobody strictly improves; that
    pass scans every grid deviation, so the fixed point comes back verified.
    A revisited profile is reported as a cycle rather than an error.
    """
    ev = _Evaluator(inst, truth, mechanism)
    current = ReportProfile(
        bids={a: truth.bids[a] for a in inst.adv_ids()},
        subsets={a: truth.subsets[a] for a in inst.adv_ids()},
    )
    history = [current]
    seen = {current.key(): 0}
    checks = 0
    violations: list[BetaCheck] = []

    def run_beta(rep: ReportProfile):
        nonlocal checks
        if beta_check:
            checks += 1
            got = beta_bound_check(inst, rep)
            if not got.ok:
                violations.append(got)

    run_beta(current)
    for round_no in range(1, max_rounds + 1):
        improved = False
        for adv_id in inst.adv_ids():
            bid, subset, best_u = best_response(
                inst, truth, current, adv_id, mechanism, spaces[adv_id], _evaluator=ev
            )
            if best_u > ev.utility(current, adv_id):
                current = current.replace(adv_id, bid, subset)
                improved = True
                run_beta(current)
                key = current.key()
                if key in seen:
                    start = seen[key]
                    return NashResult(
                        status="cycle",
                        equilibrium=None,
                        rounds=round_no,
                        verified=False,
                        cycle=tuple(history[start:]) + (current,),
                        beta_checks=checks,
                        beta_violations=tuple(violations),
                    )
                seen[key] = len(history)
                history.append(current)
        if not improved:
            return NashResult(
                status="converged",
                equilibrium=current,
                rounds=round_no,
                verified=True,
                beta_checks=checks,
                beta_violations=tuple(violations),
            )
    return NashResult(
        status="max-rounds",
        equilibrium=None,
        rounds=max_rounds,
        verified=False,
        beta_checks=checks,
        beta_violations=tuple(violations),
    )


def poa_report(
    inst: Instance,
    truth: ReportProfile,
    mechanism: Mechanism,
    equilibria: Iterable[ReportProfile],
) -> list[dict]:
    """Welfare ratios of equilibria against the exact and fractional optima."""
    from .fracopt import fractional_opt  # local import to keep module deps acyclic

    ev = _Evaluator(inst, truth, mechanism)
    opt_alloc = exact.int_opt_dp(inst, truth)
    opt_sw = social_welfare(inst, opt_alloc)
    frac_obj = fractional_opt(inst, truth).objective
    rows = []
    for rep in equilibria:
        outcome = ev.outcome(rep)
        sw = social_welfare(inst, outcome)
        rows.append(
            {
                "profile": {
                    "bids": {a: str(b) for a, b in sorted(rep.bids.items())},
                    "subsets": {a: sorted(s) for a, s in sorted(rep.subsets.items())},
                },
                "sw": str(sw),
                "int_opt_sw": str(opt_sw),
                "frac_opt_value": str(frac_obj),
                "ratio_int_opt": str(opt_sw / sw) if sw > 0 else None,
                "utilities": {a: str(ev.utility(rep, a)) for a in inst.adv_ids()},
                "payments": {a: str(ev.payment(rep, a)) for a in inst.adv_ids()},
            }
        )
    return rows
