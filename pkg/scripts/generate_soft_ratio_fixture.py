#!/usr/bin/env python3
"""Regenerate tests/fixtures/soft_ratios.json.

Runs the deterministic survey grid (primes 5..200, subgroup orders 2..48,
seed "fixture") and records the maximum observed lhs/rhs ratio per soft
bound, printed to 6 significant digits. The acceptance suite re-runs the
same grid and requires the printed values to match exactly.
"""

import json
import pathlib
import sys
import tempfile

sys.path.insert(0, str(pathlib.Path(__file__).resolve().parents[1] / "src"))

from ffcomb.survey import SurveyConfig, run_survey  # noqa: E402

FIXTURE_KEYS = (
    "q_asymptotic",
    "qabab_upper",
    "t_support_8_5",
    "energy_upper_main",
    "energy_upper_32_13",
)

GRID = dict(
    prime_range=(5, 200),
    subgroup_size_range=(2, 48),
    checks=("q_asymptotic", "qabab_upper", "t_support", "energy"),
    seed="fixture",
)


def compute() -> dict:
    with tempfile.TemporaryDirectory() as td:
        cfg = SurveyConfig(output_path=f"{td}/grid.jsonl", **GRID)
        summary = run_survey(cfg)
    return {k: f"{summary['max_ratios'][k]:.6g}" for k in FIXTURE_KEYS}


def main() -> None:
    out = pathlib.Path(__file__).resolve().parents[1] / "tests" / "fixtures"
    out.mkdir(parents=True, exist_ok=True)
    path = out / "soft_ratios.json"
    data = {"grid": {k: list(v) if isinstance(v, tuple) else v
                     for k, v in GRID.items()},
            "max_ratios_6g": compute()}
    path.write_text(json.dumps(data, indent=2, sort_keys=True) + "\n")
    print(f"wrote {path}")
    print(json.dumps(data["max_ratios_6g"], indent=2))


if __name__ == "__main__":
    main()
