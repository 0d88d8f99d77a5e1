"""Greedy heuristics: bang-per-buck with skips, value greedy, randomized mix.

These trade the fractional stop for skip-and-continue (bang-per-buck) or a
straight value scan, and support an optional cardinality cap on how many
advertisers may be served. They are monotone in (bid, subset) like the core
rules, but carry no welfare guarantee on their own; the randomized mix
restores one through its max-value branch.
"""

from __future__ import annotations

import random
from fractions import Fraction

from .kernels import ScaledView, run_best_fit, run_space_auction, run_value_greedy
from .model import Allocation, Instance, Mixture, ReportProfile
from .monotone import max_value_allocation

RANDOMIZED_GREEDY_P = Fraction(2, 3)


def _check_cardinality(k: int | None) -> None:
    if k is not None and k < 1:
        raise ValueError(f"cardinality limit must be >= 1, got {k}")


def _bpb_order(view: ScaledView) -> list[int]:
    # descending bang-per-buck, ties in (adv_id, ad_id) order via stable sort
    idx = list(range(len(view)))
    idx.sort(key=lambda i: Fraction(-view.val[i], view.spc[i]))
    return idx


def _greedy_bpb_capped(view: ScaledView, k: int) -> Allocation:
    """Bang-per-buck scan serving at most k advertisers, with eviction.

    When the scan is full, a newcomer may push out the weakest holder: the
    one with the lowest held value (ties to the smallest adv_id). The
    newcomer must strictly beat that value and fit into the free space plus
    whatever the eviction releases. Evicted advertisers stay eligible later.
    """
    held: dict[int, int] = {}  # advertiser index -> ad index
    rem = view.total
    for i in _bpb_order(view):
        a = view.adv[i]
        if a in held:
            j = held[a]
            if view.spc[i] <= view.spc[j]:
                continue
            inc = view.spc[i] - view.spc[j]
            if inc <= rem:
                held[a] = i
                rem -= inc
            continue
        if len(held) < k:
            if view.spc[i] <= rem:
                held[a] = i
                rem -= view.spc[i]
            continue
        evictee = min(held, key=lambda b: (view.val[held[b]], view.adv_ids[b]))
        j = held[evictee]
        if view.val[i] > view.val[j] and view.spc[i] <= rem + view.spc[j]:
            del held[evictee]
            rem += view.spc[j]
            held[a] = i
            rem -= view.spc[i]
    caps = [0] * view.n_adv()
    for a, i in held.items():
        caps[a] = view.spc[i]
    best = run_best_fit(view, caps)
    entries = {}
    for a, i in enumerate(best):
        if i >= 0:
            entries[view.adv_ids[a]] = (view.ad_ids[i], Fraction(1))
    return Allocation(entries=entries)


def greedy_by_bpb(inst: Instance, rep: ReportProfile, cardinality: int | None = None) -> Allocation:
    """Bang-per-buck greedy: like the integral rule but misfits are skipped.

    After the scan, each advertiser's reserved space is upgraded to their
    most valuable fitting ad, mirroring the integral rule's second stage.
    """
    _check_cardinality(cardinality)
    view = ScaledView(inst, rep)
    if cardinality is not None and cardinality < view.n_adv():
        return _greedy_bpb_capped(view, cardinality)
    held, held_spc, _fa, _fn, _fd = run_space_auction(view, stop_on_misfit=False)
    best = run_best_fit(view, held_spc)
    entries = {}
    for a, i in enumerate(best):
        if i >= 0:
            entries[view.adv_ids[a]] = (view.ad_ids[i], Fraction(1))
    return Allocation(entries=entries)


def greedy_by_value(inst: Instance, rep: ReportProfile, cardinality: int | None = None) -> Allocation:
    """Value greedy: scan ads by value, allocate the first fit per advertiser.

    A non-fitting ad is skipped but leaves its advertiser eligible; an
    allocated advertiser's remaining ads are ignored. Stops once
    `cardinality` advertisers are served.
    """
    _check_cardinality(cardinality)
    view = ScaledView(inst, rep)
    limit = cardinality if cardinality is not None else view.n_adv()
    held = run_value_greedy(view, limit)
    entries = {}
    for a, i in enumerate(held):
        if i >= 0:
            entries[view.adv_ids[a]] = (view.ad_ids[i], Fraction(1))
    return Allocation(entries=entries)


def randomized_greedy(
    inst: Instance,
    rep: ReportProfile,
    p: Fraction = RANDOMIZED_GREEDY_P,
    cardinality: int | None = None,
) -> Mixture:
    """Mix bang-per-buck greedy (probability p) with the max-value rule."""
    p = Fraction(p)
    if not 0 <= p <= 1:
        raise ValueError(f"mixture weight must lie in [0, 1], got {p}")
    return Mixture(
        branches=(
            (p, greedy_by_bpb(inst, rep, cardinality)),
            (1 - p, max_value_allocation(inst, rep)),
        )
    )


def sample_mixture(mixture: Mixture, seed: int) -> Allocation:
    """Draw one branch of a mixture; analysis paths stay symbolic."""
    roll = Fraction(random.Random(seed).random())
    acc = Fraction(0)
    for prob, alloc in mixture.branches:
        acc += prob
        if roll < acc:
            return alloc
    return mixture.branches[-1][1]
