"""Exact integral optimum: capacity-scaled DP and exhaustive search.

Both solvers maximize reported value and break ties toward the
lexicographically-smallest choice vector (advertisers in id order, the empty
choice before ads, ads by ad_id ascending), so their allocations must match
exactly, not just in value. Size guards raise GuardExceededError instead of
grinding.
"""

from __future__ import annotations

from fractions import Fraction

from .kernels import ScaledView
from .model import Allocation, GuardExceededError, Instance, ReportProfile

DP_CAPACITY_GUARD = 10**6
ENUMERATION_GUARD = 10**6


def _candidates(view: ScaledView):
    """Per advertiser: [(ad_index, value, space), ...] in ad_id order."""
    per_adv: list[list[tuple[int, int, int]]] = [[] for _ in view.adv_ids]
    for i in range(len(view)):
        per_adv[view.adv[i]].append((i, view.val[i], view.spc[i]))
    return per_adv


def _effective_cardinality(inst: Instance, cardinality: int | None) -> int | None:
    if cardinality is not None:
        return cardinality
    return inst.cardinality_limit


def _to_allocation(view: ScaledView, chosen: list[int]) -> Allocation:
    entries = {}
    for a, i in enumerate(chosen):
        if i >= 0:
            entries[view.adv_ids[a]] = (view.ad_ids[i], Fraction(1))
    return Allocation(entries=entries)


def int_opt_dp(
    inst: Instance,
    rep: ReportProfile,
    cardinality: int | None = None,
    capacity_guard: int = DP_CAPACITY_GUARD,
) -> Allocation:
    """Integral optimum by dynamic programming over scaled capacity."""
    view = ScaledView(inst, rep)
    if view.total > capacity_guard:
        raise GuardExceededError(
            f"scaled capacity {view.total} exceeds the DP guard {capacity_guard}"
        )
    limit = _effective_cardinality(inst, cardinality)
    per_adv = _candidates(view)
    n = view.n_adv()
    cap = view.total

    if limit is None:
        # f[g][w]: best value from advertisers g.. with w capacity left
        f = [[0] * (cap + 1) for _ in range(n + 1)]
        for g in range(n - 1, -1, -1):
            row = f[g]
            nxt = f[g + 1]
            cands = per_adv[g]
            for w in range(cap + 1):
                best = nxt[w]
                for _i, v, s in cands:
                    if s <= w:
                        got = v + nxt[w - s]
                        if got > best:
                            best = got
                row[w] = best
        chosen = [-1] * n
        w = cap
        for g in range(n):
            target = f[g][w]
            if f[g + 1][w] == target:
                continue  # the empty choice is lexicographically first
            for i, v, s in per_adv[g]:
                if s <= w and v + f[g + 1][w - s] == target:
                    chosen[g] = i
                    w -= s
                    break
        return _to_allocation(view, chosen)

    if limit < 1:
        raise ValueError(f"cardinality limit must be >= 1, got {limit}")
    k = min(limit, n)
    # f[g][w][c]: best value from advertisers g.. with w capacity and c slots
    f = [[[0] * (k + 1) for _ in range(cap + 1)] for _ in range(n + 1)]
    for g in range(n - 1, -1, -1):
        cur = f[g]
        nxt = f[g + 1]
        cands = per_adv[g]
        for w in range(cap + 1):
            nxt_w = nxt[w]
            cur_w = cur[w]
            for c in range(k + 1):
                best = nxt_w[c]
                if c > 0:
                    for _i, v, s in cands:
                        if s <= w:
                            got = v + nxt[w - s][c - 1]
                            if got > best:
                                best = got
                cur_w[c] = best
    chosen = [-1] * n
    w, c = cap, k
    for g in range(n):
        target = f[g][w][c]
        if f[g + 1][w][c] == target:
            continue
        for i, v, s in per_adv[g]:
            if s <= w and c > 0 and v + f[g + 1][w - s][c - 1] == target:
                chosen[g] = i
                w -= s
                c -= 1
                break
    return _to_allocation(view, chosen)


def int_opt_exhaustive(
    inst: Instance,
    rep: ReportProfile,
    cardinality: int | None = None,
    enum_guard: int = ENUMERATION_GUARD,
) -> Allocation:
    """Integral optimum by depth-first enumeration of choice vectors.

    Visits vectors in lexicographic preference order and keeps the first
    strict improvement, which reproduces the DP's tie rule exactly.
    """
    view = ScaledView(inst, rep)
    limit = _effective_cardinality(inst, cardinality)
    if limit is not None and limit < 1:
        raise ValueError(f"cardinality limit must be >= 1, got {limit}")
    per_adv = _candidates(view)
    n = view.n_adv()

    combos = 1
    for cands in per_adv:
        combos *= len(cands) + 1
        if combos > enum_guard:
            raise GuardExceededError(
                f"{combos}+ choice vectors exceed the enumeration guard {enum_guard}"
            )

    # suffix bound for pruning: most value the remaining advertisers can add
    suffix_best = [0] * (n + 1)
    for g in range(n - 1, -1, -1):
        top = max((v for _i, v, _s in per_adv[g]), default=0)
        suffix_best[g] = suffix_best[g + 1] + top

    best_value = -1
    best_chosen: list[int] | None = None
    chosen = [-1] * n
    k = limit if limit is not None else n

    def walk(g: int, value: int, room: int, slots: int):
        nonlocal best_value, best_chosen
        if value + suffix_best[g] <= best_value:
            return  # even the first-found optimum wins ties, so <= prunes safely
        if g == n:
            if value > best_value:
                best_value = value
                best_chosen = chosen.copy()
            return
        chosen[g] = -1
        walk(g + 1, value, room, slots)
        if slots > 0:
            for i, v, s in per_adv[g]:
                if s <= room:
                    chosen[g] = i
                    walk(g + 1, value + v, room - s, slots - 1)
            chosen[g] = -1

    walk(0, 0, view.total, k)
    assert best_chosen is not None
    return _to_allocation(view, best_chosen)


def int_opt_cardinality(inst: Instance, rep: ReportProfile, k: int, **kwargs) -> Allocation:
    """Integral optimum serving at most k advertisers."""
    return int_opt_dp(inst, rep, cardinality=k, **kwargs)


CROSS_CHECK_GUARD = 10**4


def int_opt_cross_checked(inst: Instance, rep: ReportProfile, cardinality: int | None = None) -> Allocation:
    """DP optimum, re-verified exhaustively when the instance is small enough."""
    alloc = int_opt_dp(inst, rep, cardinality=cardinality)
    try:
        other = int_opt_exhaustive(inst, rep, cardinality=cardinality, enum_guard=CROSS_CHECK_GUARD)
    except GuardExceededError:
        return alloc
    assert alloc.entries == other.entries, "DP and exhaustive optima disagree"
    return alloc
