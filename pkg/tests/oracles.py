"""Independent oracles the tests check library output against.

Everything here is deliberately written from the definitions, structured
differently from the library code (dicts and event lists instead of scaled
integer arrays), so an agreement between the two is evidence rather than
an identity.
"""

from __future__ import annotations

from fractions import Fraction
from itertools import product

from richads.model import Instance, ReportProfile, effective_values


def walk_space_auction(inst: Instance, rep: ReportProfile, stop_on_misfit: bool):
    """Reference space walk straight from the definition.

    Scans reported ads by bang-per-buck descending (ties: adv_id, ad_id
    ascending), charges each advertiser only the increment over what they
    already hold, and either stops fractionally on the first misfit or
    skips it. Returns (spaces, held_ad, fractional) with plain Fractions.
    """
    eff = effective_values(inst, rep)
    items = []
    for (adv_id, ad_id), value in eff.items():
        if value > 0:
            space = inst.advertiser(adv_id).ad(ad_id).space
            items.append((adv_id, ad_id, value, space))
    items.sort(key=lambda t: (-(t[2] / t[3]), t[0], t[1]))

    spaces: dict[str, Fraction] = {}
    held: dict[str, str] = {}
    remaining = inst.total_space
    fractional = None
    for adv_id, ad_id, _value, space in items:
        if remaining == 0:
            break
        have = spaces.get(adv_id, Fraction(0))
        if space <= have:
            continue
        need = space - have
        if need <= remaining:
            spaces[adv_id] = space
            held[adv_id] = ad_id
            remaining -= need
        elif stop_on_misfit:
            final = have + remaining
            spaces[adv_id] = final
            held[adv_id] = ad_id
            fractional = (adv_id, ad_id, final / space)
            remaining = Fraction(0)
            break
    return spaces, held, fractional


def best_fitting_ad(inst: Instance, rep: ReportProfile, adv_id: str, width: Fraction):
    """Most valuable reported ad of one advertiser fitting in `width`."""
    eff = effective_values(inst, rep)
    best = None
    for ad in sorted(inst.advertiser(adv_id).ads, key=lambda a: a.ad_id):
        value = eff.get((adv_id, ad.ad_id))
        if value is None or ad.space > width:
            continue
        if best is None or value > best[1]:
            best = (ad.ad_id, value)
    return best


def brute_force_opt(inst: Instance, rep: ReportProfile, cardinality: int | None = None):
    """Exact integral optimum by full enumeration, with the lex tie rule.

    Candidate vectors assign each advertiser None or one reported ad; among
    value-maximal feasible vectors the lexicographically smallest wins
    (advertisers in id order, None before ads, ads by ad_id ascending).
    Returns (entries dict, value).
    """
    eff = effective_values(inst, rep)
    options = []
    order = inst.adv_ids()
    for adv_id in order:
        mine = [None] + sorted(
            ad.ad_id for ad in inst.advertiser(adv_id).ads if (adv_id, ad.ad_id) in eff
        )
        options.append(mine)

    def rank(vector):
        # None sorts before any ad id
        return tuple((0, "") if ad is None else (1, ad) for ad in vector)

    best_vec = None
    best_value = Fraction(-1)
    for vector in product(*options):
        space = Fraction(0)
        value = Fraction(0)
        served = 0
        for adv_id, ad_id in zip(order, vector):
            if ad_id is None:
                continue
            served += 1
            space += inst.advertiser(adv_id).ad(ad_id).space
            value += eff[(adv_id, ad_id)]
        if space > inst.total_space:
            continue
        if cardinality is not None and served > cardinality:
            continue
        if value > best_value or (value == best_value and rank(vector) < rank(best_vec)):
            best_value = value
            best_vec = vector
    entries = {a: ad for a, ad in zip(order, best_vec) if ad is not None}
    return entries, max(best_value, Fraction(0))


def brute_force_fractional(inst: Instance, rep: ReportProfile):
    """Float LP value of the fractional relaxation, via scipy.

    Variables are x_ij in [0,1] per reported ad; constraints are one unit
    per advertiser and the space budget. Returns the optimum as a float.
    """
    from scipy.optimize import linprog

    eff = effective_values(inst, rep)
    keys = sorted(k for k, v in eff.items() if v > 0)
    if not keys:
        return 0.0
    c = [-float(eff[k]) for k in keys]
    a_ub = []
    b_ub = []
    for adv_id in inst.adv_ids():
        row = [1.0 if k[0] == adv_id else 0.0 for k in keys]
        if any(row):
            a_ub.append(row)
            b_ub.append(1.0)
    a_ub.append([float(inst.advertiser(a).ad(j).space) for a, j in keys])
    b_ub.append(float(inst.total_space))
    res = linprog(c, A_ub=a_ub, b_ub=b_ub, bounds=[(0.0, 1.0)] * len(keys), method="highs")
    assert res.status == 0, res.message
    return -res.fun


def best_value_in_width(points, width: Fraction) -> Fraction:
    """Exact one-advertiser fractional optimum in `width` of space.

    Enumerates the vertices of {x >= 0, sum x <= 1, sum w x <= width} over
    singles and pairs of ads; the LP optimum sits on one of them.
    """
    width = Fraction(width)
    best = Fraction(0)
    pts = [(Fraction(v), Fraction(w)) for v, w in points if v > 0]
    for v, w in pts:
        x = min(Fraction(1), width / w)
        best = max(best, v * x)
    for i in range(len(pts)):
        for j in range(i + 1, len(pts)):
            (v1, w1), (v2, w2) = pts[i], pts[j]
            if w1 == w2:
                continue
            # vertex where both constraints bind
            x1 = (width - w2) / (w1 - w2)
            x2 = 1 - x1
            if 0 <= x1 <= 1 and 0 <= x2 <= 1 and w1 * x1 + w2 * x2 <= width:
                best = max(best, v1 * x1 + v2 * x2)
    return best


def riemann_myerson(inst: Instance, rep: ReportProfile, adv_id: str, rule, steps: int = 1000):
    """Numeric Myerson payment b*x(b) - sum x(t_k) * (b/steps) on a bid grid.

    Uses the library's allocation rule as the click function (the oracle
    targets the threshold enumeration, not the allocation itself). Returns
    a float; the exact payment must agree within the grid error.
    """
    from richads.pricing import rule_allocate

    bid = rep.bids[adv_id]
    if bid <= 0:
        return 0.0
    step = bid / steps
    integral = Fraction(0)
    for k in range(steps):
        probe = rep.replace(adv_id, step * k + step / 2, rep.subsets[adv_id])
        integral += step * rule_allocate(inst, probe, rule).clicks(inst, adv_id)
    clicks = rule_allocate(inst, rep, rule).clicks(inst, adv_id)
    return float(bid * clicks - integral)
