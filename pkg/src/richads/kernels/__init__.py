"""Kernel backends and the scaled-integer view they operate on.

The compiled extension (`richads.kernels._fast`) is preferred when it
imported cleanly and every scaled magnitude fits comfortably in int64;
otherwise the pure-Python twin runs. `RICHADS_KERNEL=pure|fast` forces a
backend at import time, `set_backend` switches at runtime.
"""

from __future__ import annotations

import os
from fractions import Fraction
from math import lcm

from . import pure

try:
    from . import _fast
except ImportError:  # extension not built; pure fallback is fully equivalent
    _fast = None

_BACKENDS = {"pure": pure}
if _fast is not None:
    _BACKENDS["fast"] = _fast

_active = "fast" if _fast is not None else "pure"
_forced = os.environ.get("RICHADS_KERNEL")
if _forced:
    if _forced not in _BACKENDS:
        raise ImportError(
            f"RICHADS_KERNEL={_forced!r} is not available; choices: {sorted(_BACKENDS)}"
        )
    _active = _forced


def available_backends() -> tuple[str, ...]:
    return tuple(sorted(_BACKENDS))


def backend_name() -> str:
    return _active


def set_backend(name: str) -> None:
    global _active
    if name not in _BACKENDS:
        raise ValueError(f"unknown kernel backend {name!r}; choices: {sorted(_BACKENDS)}")
    _active = name


class ScaledView:
    """Scaled-integer picture of (instance, report) for the kernels.

    Reported ads are sorted by (adv_id, ad_id); effective values are scaled
    by the lcm of their denominators, spaces (and the total) by the lcm of
    theirs, so every kernel comparison is an exact integer comparison. Ads
    with zero effective value (unreported advertiser, zero bid) are treated
    as unreported: no rule ever benefits from allocating them.
    """

    __slots__ = (
        "inst", "adv_ids", "adv_index", "adv", "ad_ids", "val", "spc",
        "eff", "space", "total", "value_scale", "space_scale", "max_magnitude",
    )

    def __init__(self, inst, rep):
        self.inst = inst
        self.adv_ids = inst.adv_ids()
        self.adv_index = {a: i for i, a in enumerate(self.adv_ids)}
        rows = []  # (adv_idx, ad_id, effective value, space)
        for ai, advertiser in enumerate(inst.advertisers):
            bid = rep.bids.get(advertiser.adv_id, Fraction(0))
            if bid <= 0:
                continue
            subset = rep.subsets.get(advertiser.adv_id, frozenset())
            for ad in advertiser.ads:
                if ad.ad_id in subset:
                    eff = bid * ad.alpha
                    if eff > 0:
                        rows.append((ai, ad.ad_id, eff, ad.space))
        rows.sort(key=lambda r: (r[0], r[1]))

        value_scale = lcm(*(r[2].denominator for r in rows)) if rows else 1
        space_scale = lcm(inst.total_space.denominator, *(r[3].denominator for r in rows))
        self.adv = [r[0] for r in rows]
        self.ad_ids = [r[1] for r in rows]
        self.eff = [r[2] for r in rows]
        self.space = [r[3] for r in rows]
        self.val = [int(r[2] * value_scale) for r in rows]
        self.spc = [int(r[3] * space_scale) for r in rows]
        self.total = int(inst.total_space * space_scale)
        self.value_scale = value_scale
        self.space_scale = space_scale
        self.max_magnitude = max(self.val + self.spc + [self.total])

    def __len__(self):
        return len(self.val)

    def n_adv(self) -> int:
        return len(self.adv_ids)

    def ad_ref(self, i: int) -> tuple[str, str]:
        return self.adv_ids[self.adv[i]], self.ad_ids[i]

    def unscale_space(self, units: int) -> Fraction:
        return Fraction(units, self.space_scale)


def _pick(view: ScaledView):
    mod = _BACKENDS[_active]
    limit = getattr(mod, "MAX_MAGNITUDE", None)
    if limit is not None and view.max_magnitude >= limit:
        return pure
    return mod


def run_space_auction(view: ScaledView, stop_on_misfit: bool):
    n = view.n_adv()
    if not view.val:
        return [-1] * n, [0] * n, -1, 0, 1
    mod = _pick(view)
    return mod.space_auction(view.adv, view.val, view.spc, n, view.total, stop_on_misfit)


def run_space_auction_traced(view: ScaledView):
    # tracing is diagnostic-only and always runs the reference backend
    n = view.n_adv()
    if not view.val:
        return [-1] * n, [0] * n, -1, 0, 1, []
    return pure.space_auction_traced(view.adv, view.val, view.spc, n, view.total)


def run_best_fit(view: ScaledView, caps: list[int]):
    if not view.val:
        return [-1] * view.n_adv()
    mod = _pick(view)
    return mod.best_fit(view.adv, view.val, view.spc, view.n_adv(), caps)


def run_value_greedy(view: ScaledView, limit: int):
    if not view.val:
        return [-1] * view.n_adv()
    mod = _pick(view)
    return mod.value_greedy(view.adv, view.val, view.spc, view.n_adv(), view.total, limit)
