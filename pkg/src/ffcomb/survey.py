"""Config-driven grid runner over (p, subgroup-order) instances.

Persists one JSONL record per (instance, check), resumes idempotently, and
aggregates per-check maxima plus empirical exponents.
"""

from __future__ import annotations

import json
import math
import random
import time
from dataclasses import dataclass, replace
from pathlib import Path
from typing import Callable, Iterator

import numpy as np

from . import bounds, decompose, incidence
from .field import PrimeField, is_prime
from .groups import Subgroup, subgroup, subgroup_orders
from .sets import FpSet, additive_energy, format_fpset

LARGE_SUBGROUP_THRESHOLD = 16

CHECK_NAMES = (
    "energy",
    "theta",
    "q_asymptotic",
    "qabab_upper",
    "t_support",
    "irreducibility",
)


@dataclass(frozen=True)
class SurveyConfig:
    prime_range: tuple[int, int] = (5, 100)
    subgroup_size_range: tuple[int, int] = (2, 40)
    max_subgroup_vs_p_exponent: float = 1.0
    checks: tuple[str, ...] = ("energy",)
    seed: str = "ffcomb"
    node_budget: int = decompose.DEFAULT_BUDGET
    shift_samples: int = 50
    output_path: str = "survey.jsonl"

    def validate(self) -> None:
        lo, hi = self.prime_range
        if not (2 <= lo <= hi):
            raise ValueError("empty or invalid prime_range")
        slo, shi = self.subgroup_size_range
        if not (1 <= slo <= shi):
            raise ValueError("empty or invalid subgroup_size_range")
        for c in self.checks:
            if c not in CHECK_NAMES:
                raise ValueError(f"unknown check {c!r}")


def parse_config(text: str) -> SurveyConfig:
    """key = value lines; '#' comments; ranges as 'lo,hi'; checks comma-split."""
    cfg = SurveyConfig()
    updates: dict = {}
    for raw in text.splitlines():
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise ValueError(f"bad config line: {raw!r}")
        key, val = (s.strip() for s in line.split("=", 1))
        if key in ("prime_range", "subgroup_size_range"):
            lo, hi = (int(x) for x in val.split(","))
            updates[key] = (lo, hi)
        elif key == "max_subgroup_vs_p_exponent":
            updates[key] = float(val)
        elif key == "checks":
            updates[key] = tuple(s.strip() for s in val.split(",") if s.strip())
        elif key == "seed":
            updates[key] = val
        elif key in ("node_budget", "shift_samples"):
            updates[key] = int(val)
        elif key == "output_path":
            updates[key] = val
        else:
            raise ValueError(f"unknown config key {key!r}")
    cfg = replace(cfg, **updates)
    cfg.validate()
    return cfg


def enumerate_instances(cfg: SurveyConfig) -> Iterator[tuple[PrimeField, Subgroup]]:
    """Every prime in range, every divisor of p-1 within the size range and
    below p**max_subgroup_vs_p_exponent, in ascending (p, d) order."""
    cfg.validate()
    lo, hi = cfg.prime_range
    slo, shi = cfg.subgroup_size_range
    for p in range(max(lo, 3), hi + 1):
        if not is_prime(p):
            continue
        fld = PrimeField.of(p)
        cap = p ** cfg.max_subgroup_vs_p_exponent
        for d in subgroup_orders(fld):
            if slo <= d <= shi and d <= cap:
                yield fld, subgroup(fld, d)


def _rng_for(cfg: SurveyConfig, p: int, d: int, check: str) -> random.Random:
    return random.Random(f"{cfg.seed}:{check}:{p}:{d}")


def _check_energy(cfg: SurveyConfig, sub: Subgroup) -> dict:
    reports = bounds.check_energy_bounds(sub)
    e = additive_energy(sub.elements)
    out = {
        "energy": e,
        "hard_failures": sum(1 for r in reports if r.hard and r.passed is False),
        "ratios": {r.name: r.ratio for r in reports if not r.hard},
    }
    for r in reports:
        if r.name == "energy_exponent":
            out["exponent"] = r.extras.get("exponent")
    return out


def _check_theta(cfg: SurveyConfig, sub: Subgroup) -> dict:
    fld = sub.field
    p = fld.p
    d = sub.order
    rng = _rng_for(cfg, p, d, "theta")
    worst = 0.0
    failures = 0
    tuples_checked = 0
    for k in (1, 2):
        if p - 1 < k:
            continue
        for _ in range(cfg.shift_samples):
            shifts = tuple(rng.sample(range(1, p), k))
            reports = bounds.check_intersection_bounds(sub, shifts)
            for r in reports:
                if r.name == "intersection_theta":
                    tuples_checked += 1
                    th = abs(r.extras["theta"])
                    worst = max(worst, th)
                    if r.passed is False:
                        failures += 1
    return {
        "tuples": tuples_checked,
        "max_abs_theta": worst,
        "hard_failures": failures,
    }


def _check_q_asymptotic(cfg: SurveyConfig, sub: Subgroup) -> dict:
    if sub.field.p > incidence.DENSE_Q_MAX_P:
        return {"skipped": "p beyond dense q budget"}
    r = bounds.check_Q_asymptotic(sub.elements)
    return {"lhs": r.lhs, "ratio": r.ratio}


def _check_qabab_upper(cfg: SurveyConfig, sub: Subgroup) -> dict:
    fld = sub.field
    p = fld.p
    rng = _rng_for(cfg, p, sub.order, "qabab_upper")
    na = len(sub.elements)
    nb = max(1, min(na, math.isqrt(p), 1 + rng.randrange(na)))
    b = FpSet(fld, rng.sample(range(p), nb))
    r = bounds.check_QABAB_upper(sub.elements, b)
    return {
        "B": format_fpset(b),
        "ratio": r.ratio,
        "preconditions_met": r.preconditions_met,
    }


def _check_t_support(cfg: SurveyConfig, sub: Subgroup) -> dict:
    reports = bounds.check_T_support_bounds(sub.elements)
    return {"ratios": {r.name: r.ratio for r in reports}}


def _check_irreducibility(cfg: SurveyConfig, sub: Subgroup) -> dict:
    res = decompose.sumset_decompositions(
        sub.elements, find_all=False, budget=cfg.node_budget
    )
    rec = {
        "reducible": res.decomposable,
        "exhaustive": res.exhaustive,
        "nodes": res.nodes_explored,
    }
    if res.witnesses:
        b, c = res.witnesses[0]
        assert len(b) * len(c) >= sub.order  # pigeonhole over the cover
        rec["witness"] = {"B": format_fpset(b), "C": format_fpset(c)}
    return rec


_CHECKS: dict[str, Callable[[SurveyConfig, Subgroup], dict]] = {
    "energy": _check_energy,
    "theta": _check_theta,
    "q_asymptotic": _check_q_asymptotic,
    "qabab_upper": _check_qabab_upper,
    "t_support": _check_t_support,
    "irreducibility": _check_irreducibility,
}


def _load_done(path: Path) -> set[tuple[int, int, str]]:
    done = set()
    if not path.exists():
        return done
    with path.open() as fh:
        for line in fh:
            line = line.strip()
            if not line:
                continue
            rec = json.loads(line)
            if "check" in rec:
                done.add((rec["p"], rec["d"], rec["check"]))
    return done


def run_survey(cfg: SurveyConfig) -> dict:
    """Runs every configured check on every instance, appending JSONL records
    and skipping (p, d, check) keys already present in the output file."""
    cfg.validate()
    path = Path(cfg.output_path)
    done = _load_done(path)
    path.parent.mkdir(parents=True, exist_ok=True)

    records: list[dict] = []
    hard_failures = 0
    max_ratios: dict[str, float] = {}
    large_reducible: list[dict] = []
    budget_exhausted = 0
    energy_points: list[tuple[int, int, int]] = []  # (p, d, energy)

    with path.open("a") as fh:
        if not done:
            fh.write(json.dumps({"header": "ffcomb-survey",
                                 "started": time.strftime("%Y-%m-%dT%H:%M:%SZ",
                                                          time.gmtime()),
                                 "config": cfg.__dict__ | {
                                     "prime_range": list(cfg.prime_range),
                                     "subgroup_size_range":
                                         list(cfg.subgroup_size_range),
                                     "checks": list(cfg.checks)}}) + "\n")
        for fld, sub in enumerate_instances(cfg):
            for check in cfg.checks:
                key = (fld.p, sub.order, check)
                if key in done:
                    continue
                body = _CHECKS[check](cfg, sub)
                # no timing fields: records must be byte-identical across
                # reruns with the same config and seed
                rec = {
                    "p": fld.p,
                    "d": sub.order,
                    "check": check,
                    "seed": cfg.seed,
                    **body,
                }
                fh.write(json.dumps(rec, sort_keys=True) + "\n")
                done.add(key)
                records.append(rec)

    # aggregate over the whole file so resumed runs summarize everything
    all_records = read_records(path)
    for rec in all_records:
        hard_failures += rec.get("hard_failures", 0)
        if rec.get("exhaustive") is False:
            budget_exhausted += 1
        for name, ratio in (rec.get("ratios") or {}).items():
            if ratio is not None and math.isfinite(ratio):
                max_ratios[name] = max(max_ratios.get(name, 0.0), ratio)
        if "ratio" in rec and rec["ratio"] is not None:
            name = rec["check"]
            if math.isfinite(rec["ratio"]):
                max_ratios[name] = max(max_ratios.get(name, 0.0), rec["ratio"])
        if rec.get("check") == "irreducibility" and rec.get("reducible"):
            if rec["d"] >= LARGE_SUBGROUP_THRESHOLD:
                large_reducible.append({"p": rec["p"], "d": rec["d"],
                                        "witness": rec.get("witness")})
        if rec.get("check") == "energy" and "energy" in rec:
            energy_points.append((rec["p"], rec["d"], rec["energy"]))

    summary = {
        "records_written": len(records),
        "records_total": len(all_records),
        "hard_failures": hard_failures,
        "max_ratios": max_ratios,
        "large_reducible": large_reducible,
        "budget_exhausted": budget_exhausted,
        "output_path": str(path),
    }
    if len({d for _, d, _ in energy_points}) >= 2:
        summary["energy_exponent_slope"] = empirical_exponent(
            [{"d": d, "value": e} for _, d, e in energy_points], "value"
        )
    return summary


def read_records(path: str | Path) -> list[dict]:
    out = []
    with Path(path).open() as fh:
        for line in fh:
            line = line.strip()
            if not line:
                continue
            rec = json.loads(line)
            if "check" in rec:
                out.append(rec)
    return out


def empirical_exponent(records: list[dict], quantity: str) -> float:
    """Least-squares slope of log2(quantity) against log2 of the subgroup
    order, across records carrying a 'd' field."""
    xs, ys = [], []
    for rec in records:
        v = rec.get(quantity)
        if v is None or v <= 0:
            continue
        xs.append(math.log2(rec["d"]))
        ys.append(math.log2(v))
    if len(set(xs)) < 2:
        raise ValueError("need at least two records with distinct subgroup order")
    slope, _ = np.polyfit(xs, ys, 1)
    return float(slope)


def records_to_csv(records: list[dict]) -> str:
    """Flat CSV projection of the common fields (derived view, never primary)."""
    import csv
    import io

    cols = ["p", "d", "check"]
    extra = sorted({k for r in records for k in r}
                   - set(cols) - {"seed", "ratios"})
    buf = io.StringIO()
    w = csv.writer(buf)
    w.writerow(cols + extra)
    for r in records:
        w.writerow([r.get(c, "") for c in cols]
                   + [json.dumps(r[c]) if isinstance(r.get(c), (dict, list))
                      else r.get(c, "") for c in extra])
    return buf.getvalue()
