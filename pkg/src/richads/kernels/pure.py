"""Pure-Python reference kernels over scaled integers.

These are the loops the compiled extension mirrors. They run on plain ints
(arbitrary precision), so they are also the fallback when scaled magnitudes
exceed what the int64 extension can hold.

Conventions shared by both backends:

* Ads arrive pre-sorted by (adv_id, ad_id); `adv[i]` is the advertiser index
  of ad i, `val[i]` its scaled effective value, `spc[i]` its scaled space.
* Bang-per-buck comparisons are exact cross-multiplications.
* Ties in bang-per-buck (and value) fall back to the input index, which by
  the pre-sort means (adv_id, ad_id) ascending.
"""

BACKEND_NAME = "pure"


def _bpb_order(val, spc):
    # sorted() is stable, so equal bang-per-buck keeps input (adv, ad) order
    idx = list(range(len(val)))
    idx.sort(key=lambda i: _BpbKey(val[i], spc[i]))
    return idx


class _BpbKey:
    __slots__ = ("v", "w")

    def __init__(self, v, w):
        self.v = v
        self.w = w

    def __lt__(self, other):
        # descending bang-per-buck: self before other iff v/w > other.v/other.w
        return self.v * other.w > other.v * self.w


def space_auction(adv, val, spc, n_adv, total, stop_on_misfit):
    """Run the greedy space scan shared by the allocation rules.

    Walks ads by decreasing bang-per-buck. An ad whose space does not exceed
    what its advertiser already holds is skipped; otherwise the increment is
    charged against the remaining budget. A non-fitting increment either
    stops the scan with a fractional tail (`stop_on_misfit`) or is skipped.

    Returns (held, held_spc, frac_adv, frac_num, frac_den) where `held[a]` is
    the ad index advertiser a ends up holding (-1 for none), `held_spc[a]`
    the space reserved for a, and the frac_* triple describes the fractional
    stop: advertiser index (or -1), plus numerator/denominator of the weight
    on the stopping ad.
    """
    held = [-1] * n_adv
    held_spc = [0] * n_adv
    rem = total
    frac_adv = -1
    frac_num = 0
    frac_den = 1
    for i in _bpb_order(val, spc):
        if rem == 0:
            break
        a = adv[i]
        if spc[i] <= held_spc[a]:
            continue
        inc = spc[i] - held_spc[a]
        if inc <= rem:
            held[a] = i
            held_spc[a] = spc[i]
            rem -= inc
        elif stop_on_misfit:
            space_a = held_spc[a] + rem
            frac_adv = a
            frac_num = space_a
            frac_den = spc[i]
            held[a] = i
            held_spc[a] = space_a
            rem = 0
            break
    return held, held_spc, frac_adv, frac_num, frac_den


def space_auction_traced(adv, val, spc, n_adv, total):
    """stop_on_misfit space auction that also labels the units it covers.

    Returns the usual auction tuple plus an event list. Each event is
    (kind, ad_index, start, end) where kind is "place", "replace" or
    "fractional" and [start, end) is the scaled-unit range newly covered
    by that ad. Units keep the label of the ad that first covered them;
    the fractional stop labels the whole leftover range.
    """
    held = [-1] * n_adv
    held_spc = [0] * n_adv
    rem = total
    used = 0
    frac_adv = -1
    frac_num = 0
    frac_den = 1
    events = []
    for i in _bpb_order(val, spc):
        if rem == 0:
            break
        a = adv[i]
        if spc[i] <= held_spc[a]:
            continue
        inc = spc[i] - held_spc[a]
        if inc <= rem:
            kind = "place" if held[a] < 0 else "replace"
            events.append((kind, i, used, used + inc))
            held[a] = i
            held_spc[a] = spc[i]
            used += inc
            rem -= inc
        else:
            space_a = held_spc[a] + rem
            events.append(("fractional", i, used, used + rem))
            frac_adv = a
            frac_num = space_a
            frac_den = spc[i]
            held[a] = i
            held_spc[a] = space_a
            used = total
            rem = 0
            break
    return held, held_spc, frac_adv, frac_num, frac_den, events


def best_fit(adv, val, spc, n_adv, caps):
    """Per advertiser, the highest-value ad fitting in caps[a] (-1 if none).

    Strict improvement keeps the earliest index, so value ties resolve to the
    smallest ad_id under the canonical pre-sort.
    """
    best = [-1] * n_adv
    best_val = [0] * n_adv
    for i in range(len(val)):
        a = adv[i]
        if caps[a] <= 0 or spc[i] > caps[a]:
            continue
        if best[a] < 0 or val[i] > best_val[a]:
            best[a] = i
            best_val[a] = val[i]
    return best


def value_greedy(adv, val, spc, n_adv, total, limit):
    """Scan ads by decreasing value; allocate first fitting ad per advertiser.

    An advertiser who already holds an ad is skipped entirely; a non-fitting
    ad is skipped but leaves its advertiser eligible. Stops after `limit`
    distinct advertisers hold ads.
    """
    idx = list(range(len(val)))
    idx.sort(key=lambda i: -val[i])  # stable: value ties keep (adv, ad) order
    held = [-1] * n_adv
    rem = total
    placed = 0
    for i in idx:
        if placed >= limit:
            break
        a = adv[i]
        if held[a] >= 0:
            continue
        if spc[i] <= rem:
            held[a] = i
            rem -= spc[i]
            placed += 1
    return held
