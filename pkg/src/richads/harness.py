"""Experiment harness: seeded corpora, mechanism comparison, monotonicity audits.

Corpora are generated from stdlib random with all quantities quantized to
exact rationals, so a (config, seed) pair reproduces byte-identical
instances anywhere. The comparison pipeline carries a hard in-line check:
the truthful mixture's welfare must never fall below a third of the
fractional optimum.
"""

from __future__ import annotations

import csv
import json
import random
import time
from dataclasses import asdict, dataclass, field
from fractions import Fraction
from pathlib import Path
from typing import Iterable, Sequence

from . import exact, fracopt, heuristics, monotone, pricing
from .model import (
    Advertiser,
    GuardExceededError,
    Instance,
    NonMonotoneClickCurveError,
    ReportProfile,
    RichAd,
    social_welfare,
    truthful_profile,
)


@dataclass(frozen=True)
class ExperimentConfig:
    """Corpus shape and the mechanisms to compare."""

    seed: int = 0
    instances: int = 100
    max_advertisers: int = 4
    max_ads: int = 3
    max_space: int = 20  # integer ad spaces in [1, max_space]
    max_total_space: int = 50
    value_levels: int = 100  # bids are value_levels steps of 1/value_denominator
    value_denominator: int = 10
    alpha_denominator: int = 8
    cardinality: int | None = None
    mechanisms: tuple[str, ...] = ("truthful-3approx", "gsp-half", "greedy-bpb", "greedy-value")

    def to_dict(self) -> dict:
        return asdict(self)

    @classmethod
    def from_dict(cls, data: dict) -> "ExperimentConfig":
        known = {f for f in cls.__dataclass_fields__}
        unknown = set(data) - known
        if unknown:
            raise ValueError(f"unknown experiment config fields: {sorted(unknown)}")
        if "mechanisms" in data:
            data = dict(data, mechanisms=tuple(data["mechanisms"]))
        return cls(**data)


def tie_prone_config(seed: int = 0, instances: int = 100) -> ExperimentConfig:
    """Small integer grids where exact ties are common, not rare."""
    return ExperimentConfig(
        seed=seed,
        instances=instances,
        max_advertisers=3,
        max_ads=2,
        max_space=3,
        max_total_space=6,
        value_levels=4,
        value_denominator=1,
        alpha_denominator=2,
    )


def generate_corpus(cfg: ExperimentConfig) -> tuple[Instance, ...]:
    """Deterministic instance corpus for a (config, seed) pair."""
    if cfg.max_space > cfg.max_total_space:
        raise ValueError(
            f"max_space {cfg.max_space} exceeds max_total_space {cfg.max_total_space}: "
            "every ad must be able to fit alone"
        )
    if cfg.cardinality is not None and cfg.cardinality < 1:
        raise ValueError(f"cardinality must be >= 1, got {cfg.cardinality}")
    rng = random.Random(cfg.seed)
    out = []
    for _ in range(cfg.instances):
        n = rng.randint(1, cfg.max_advertisers)
        total = Fraction(rng.randint(cfg.max_space, cfg.max_total_space))
        advertisers = []
        for a in range(n):
            adv_id = f"a{a + 1}"
            value = Fraction(rng.randint(1, cfg.value_levels), cfg.value_denominator)
            ads = []
            for j in range(rng.randint(1, cfg.max_ads)):
                alpha = Fraction(rng.randint(1, cfg.alpha_denominator), cfg.alpha_denominator)
                space = Fraction(rng.randint(1, cfg.max_space))
                ads.append(RichAd(f"{adv_id}x{j + 1}", alpha=alpha, space=space))
            advertisers.append(Advertiser(adv_id, value_per_click=value, ads=tuple(ads)))
        out.append(
            Instance(
                advertisers=tuple(advertisers),
                total_space=total,
                cardinality_limit=cfg.cardinality,
            )
        )
    return tuple(out)


# mechanism name -> (outcome fn, payment fn or None); payment fns return a
# PricedOutcome so the comparison can log total revenue
def _mechanism_registry(cardinality: int | None):
    def myerson_for(rule):
        return lambda inst, rep: pricing.myerson_payment(inst, rep, rule)

    mix_truth = pricing.mixture_rule()
    mix_gsp = pricing.mixture_rule(monotone.GSP_MIX_P)
    g_bpb = pricing.greedy_bpb_rule(cardinality)
    g_val = pricing.greedy_value_rule(cardinality)
    g_mix = pricing.randomized_greedy_rule(cardinality=cardinality)
    return {
        "truthful-3approx": (
            lambda inst, rep: monotone.randomized_mechanism(inst, rep),
            myerson_for(mix_truth),
        ),
        "gsp-half": (
            lambda inst, rep: monotone.randomized_mechanism(inst, rep, monotone.GSP_MIX_P),
            lambda inst, rep: pricing.gsp_prices(inst, rep, mix_gsp),
        ),
        "vcg": (
            lambda inst, rep: exact.int_opt_cross_checked(inst, rep, cardinality),
            lambda inst, rep: pricing.vcg_payments(inst, rep),
        ),
        "frac-opt": (None, None),
        "greedy-bpb": (
            lambda inst, rep: heuristics.greedy_by_bpb(inst, rep, cardinality),
            myerson_for(g_bpb),
        ),
        "greedy-value": (
            lambda inst, rep: heuristics.greedy_by_value(inst, rep, cardinality),
            myerson_for(g_val),
        ),
        "randomized-greedy": (
            lambda inst, rep: heuristics.randomized_greedy(inst, rep, cardinality=cardinality),
            myerson_for(g_mix),
        ),
    }


MECHANISM_NAMES = tuple(_mechanism_registry(None))

CSV_COLUMNS = ("instance_id", "mechanism", "sw", "ratio_int_opt", "ratio_frac_opt", "payment", "runtime_us")


def _fmt(x: Fraction | None) -> str:
    return "" if x is None else f"{float(x):.6f}"


@dataclass
class ComparisonResult:
    rows: list[dict]
    skipped: list[tuple[str, str]]  # (instance_id, reason)
    # (instance_id, mechanism, reason) for payments that could not be priced
    payment_warnings: list[tuple[str, str, str]] = field(default_factory=list)


def run_comparison(
    corpus: Sequence[Instance],
    mechanisms: Iterable[str] = MECHANISM_NAMES,
    cardinality: int | None = None,
) -> ComparisonResult:
    """Truthful-report comparison of mechanisms over a corpus.

    Every instance also gets the fractional and integral optima for the
    ratio columns. Guard failures skip the instance with a logged reason.
    Raises AssertionError if the truthful mixture ever earns less than a
    third of the fractional optimum; that inequality is load-bearing.
    """
    registry = _mechanism_registry(cardinality)
    unknown = [m for m in mechanisms if m not in registry]
    if unknown:
        raise ValueError(f"unknown mechanisms: {unknown}; choices: {sorted(registry)}")
    rows: list[dict] = []
    skipped: list[tuple[str, str]] = []
    payment_warnings: list[tuple[str, str, str]] = []
    for idx, inst in enumerate(corpus):
        instance_id = f"i{idx:05d}"
        rep = truthful_profile(inst)
        try:
            int_opt_sw = social_welfare(inst, exact.int_opt_dp(inst, rep, cardinality=cardinality))
        except GuardExceededError as exc:
            skipped.append((instance_id, str(exc)))
            continue
        frac = fracopt.fractional_opt(inst, rep)

        # load-bearing: the truthful mechanism is a 3-approximation
        truthful_sw = social_welfare(inst, monotone.randomized_mechanism(inst, rep))
        assert 3 * truthful_sw >= frac.objective, (
            f"truthful mixture fell below a third of the fractional optimum on {instance_id}"
        )

        for name in mechanisms:
            outcome_fn, payment_fn = registry[name]
            start = time.perf_counter()
            if name == "frac-opt":
                sw = frac.objective
                payment = None
            else:
                outcome = outcome_fn(inst, rep)
                sw = social_welfare(inst, outcome)
                payment = None
                if payment_fn is not None:
                    try:
                        payment = payment_fn(inst, rep).total_payment()
                    except NonMonotoneClickCurveError as exc:
                        # cardinality-capped greedy rules carry no
                        # monotonicity promise; leave the payment blank
                        payment_warnings.append((instance_id, name, str(exc)))
            runtime_us = int((time.perf_counter() - start) * 1e6)
            rows.append(
                {
                    "instance_id": instance_id,
                    "mechanism": name,
                    "sw": _fmt(sw),
                    "ratio_int_opt": _fmt(int_opt_sw / sw) if sw > 0 else "",
                    "ratio_frac_opt": _fmt(frac.objective / sw) if sw > 0 else "",
                    "payment": _fmt(payment),
                    "runtime_us": str(runtime_us),
                }
            )
    return ComparisonResult(rows=rows, skipped=skipped, payment_warnings=payment_warnings)


HISTOGRAM_EDGES = [Fraction(1) + Fraction(i, 4) for i in range(13)]  # 1.00 .. 4.00


def ratio_histogram(rows: list[dict], mechanism: str) -> list[tuple[str, int]]:
    """Deterministic binning of ratio_int_opt for one mechanism."""
    counts = [0] * (len(HISTOGRAM_EDGES) + 1)
    for row in rows:
        if row["mechanism"] != mechanism or not row["ratio_int_opt"]:
            continue
        x = float(row["ratio_int_opt"])
        for k, edge in enumerate(HISTOGRAM_EDGES):
            if x <= float(edge) + 1e-12:
                counts[k] += 1
                break
        else:
            counts[-1] += 1
    labels = [f"<={float(edge):.2f}" for edge in HISTOGRAM_EDGES] + [">4.00"]
    return list(zip(labels, counts))


def run_experiment(cfg: ExperimentConfig, out_dir) -> dict:
    """Generate the corpus, compare mechanisms, write CSV + histograms + summary."""
    out = Path(out_dir)
    out.mkdir(parents=True, exist_ok=True)
    corpus = generate_corpus(cfg)
    result = run_comparison(corpus, cfg.mechanisms, cfg.cardinality)

    with open(out / "comparison.csv", "w", newline="") as fh:
        writer = csv.DictWriter(fh, fieldnames=CSV_COLUMNS)
        writer.writeheader()
        writer.writerows(result.rows)

    for name in cfg.mechanisms:
        with open(out / f"histogram_{name}.csv", "w", newline="") as fh:
            writer = csv.writer(fh)
            writer.writerow(["ratio_int_opt_bin", "count"])
            writer.writerows(ratio_histogram(result.rows, name))

    summary: dict = {
        "config": cfg.to_dict(),
        "instances": len(corpus),
        "skipped": result.skipped,
        "payment_warnings": result.payment_warnings,
    }
    for name in cfg.mechanisms:
        ratios = [float(r["ratio_int_opt"]) for r in result.rows if r["mechanism"] == name and r["ratio_int_opt"]]
        summary[name] = {
            "rows": sum(r["mechanism"] == name for r in result.rows),
            "mean_ratio_int_opt": f"{sum(ratios) / len(ratios):.6f}" if ratios else None,
            "max_ratio_int_opt": f"{max(ratios):.6f}" if ratios else None,
        }
    with open(out / "summary.json", "w") as fh:
        json.dump(summary, fh, indent=2, sort_keys=True)
        fh.write("\n")
    return summary


# --- monotonicity audits ---------------------------------------------------

AUDIT_RULES = ("bpb", "max-value", "mixture", "greedy-bpb", "greedy-value", "randomized-greedy", "int-opt")


def _audit_clicks(rule: str, inst: Instance, rep: ReportProfile, adv_id: str) -> Fraction:
    if rule == "bpb":
        return monotone.bpb_allocation(inst, rep).clicks(inst, adv_id)
    if rule == "max-value":
        return monotone.max_value_allocation(inst, rep).clicks(inst, adv_id)
    if rule == "mixture":
        return monotone.randomized_mechanism(inst, rep).clicks(inst, adv_id)
    if rule == "greedy-bpb":
        return heuristics.greedy_by_bpb(inst, rep).clicks(inst, adv_id)
    if rule == "greedy-value":
        return heuristics.greedy_by_value(inst, rep).clicks(inst, adv_id)
    if rule == "randomized-greedy":
        return heuristics.randomized_greedy(inst, rep).clicks(inst, adv_id)
    if rule == "int-opt":
        return exact.int_opt_dp(inst, rep).clicks(inst, adv_id)
    raise ValueError(f"unknown audit rule {rule!r}; choices: {AUDIT_RULES}")


@dataclass(frozen=True)
class AuditViolation:
    instance_index: int
    adv_id: str
    low_bid: Fraction
    high_bid: Fraction
    low_subset: frozenset[str]
    high_subset: frozenset[str]
    low_clicks: Fraction
    high_clicks: Fraction


@dataclass
class AuditResult:
    rule: str
    trials: int
    violations: list[AuditViolation] = field(default_factory=list)

    def ok(self) -> bool:
        return not self.violations


def monotonicity_audit(
    corpus: Sequence[Instance], rule: str, trials: int, seed: int = 0
) -> AuditResult:
    """Random (bid, subset) pairs ordered componentwise; clicks must not drop.

    Each trial samples an instance, an advertiser, a pair of bids
    low <= high and nested subsets low ⊆ high, with everyone else
    truthful, and checks the rule's expected clicks are monotone.
    """
    rng = random.Random(seed)
    result = AuditResult(rule=rule, trials=trials)
    if not corpus:
        return result
    for t in range(trials):
        idx = rng.randrange(len(corpus))
        inst = corpus[idx]
        adv = inst.advertisers[rng.randrange(len(inst.advertisers))]
        rep = truthful_profile(inst)

        denom = 8
        hi_num = rng.randint(1, 2 * denom)
        lo_num = rng.randint(1, hi_num)
        high_bid = adv.value_per_click * Fraction(hi_num, denom)
        low_bid = adv.value_per_click * Fraction(lo_num, denom)

        ids = list(adv.ad_ids())
        high_subset = frozenset(ad for ad in ids if rng.random() < 0.8) or frozenset(ids)
        low_subset = frozenset(ad for ad in high_subset if rng.random() < 0.7)

        low_clicks = _audit_clicks(rule, inst, rep.replace(adv.adv_id, low_bid, low_subset), adv.adv_id)
        high_clicks = _audit_clicks(rule, inst, rep.replace(adv.adv_id, high_bid, high_subset), adv.adv_id)
        if low_clicks > high_clicks:
            result.violations.append(
                AuditViolation(
                    instance_index=idx,
                    adv_id=adv.adv_id,
                    low_bid=low_bid,
                    high_bid=high_bid,
                    low_subset=low_subset,
                    high_subset=high_subset,
                    low_clicks=low_clicks,
                    high_clicks=high_clicks,
                )
            )
    return result
