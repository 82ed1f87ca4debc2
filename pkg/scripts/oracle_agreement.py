"""
Cross-validate the analytic orbit classifier against the integration oracle on a
seeded random grid over (alpha, h, epsilon, flavor, c).
Samples within TANGENCY_BAND of a tag change are excluded and counted.
Saves: oracle_agreement.json

Run from project root: python scripts/oracle_agreement.py [n_points] [seed]
"""

import json
import os
import sys
from concurrent.futures import ProcessPoolExecutor
from pathlib import Path
from typing import List, Optional

import numpy as np

_PROJECT_ROOT = Path(__file__).resolve().parent.parent
if str(_PROJECT_ROOT) not in sys.path:
    sys.path.insert(0, str(_PROJECT_ROOT))

from smoothed_flow.classification import classify_by_integration, classify_orbit
from smoothed_flow.config import DEFAULT_OUTPUT_DIR, DEFAULT_SEED, FILENAMES, SCHEMA_VERSION, UNBOUNDED_C_RANGE
from smoothed_flow.equivalence import admissible_c_range
from smoothed_flow.errors import ClassificationError, InadmissibleMomentum, NumericFailure
from smoothed_flow.models import AngularMomentum, EnergyLevel, Flavor, OrbitTag, PotentialSpec
from smoothed_flow.portrait import write_text_atomic
from smoothed_flow.potential import softening_product

GRID_POINTS = 500
ALPHA_RANGE = (0.3, 3.5)
H_RANGE = (-2.0, -0.1)
EPSILON_RANGE = (0.01, 0.2)
TANGENCY_BAND = 1e-4
REQUIRED_AGREEMENT = 0.99


def _draw_spec(rng: np.random.Generator, alpha: float, h: float) -> PotentialSpec:
    flavors = [Flavor.NON_SMOOTHED, Flavor.PLAIN_SMOOTHED]
    if alpha >= 2:
        flavors.append(Flavor.AMENDED_SMOOTHED)
    flavor = flavors[rng.integers(len(flavors))]
    if flavor == Flavor.NON_SMOOTHED:
        return PotentialSpec(alpha=alpha)
    while True:
        spec = PotentialSpec(alpha=alpha, epsilon=float(rng.uniform(*EPSILON_RANGE)), flavor=flavor)
        if softening_product(spec, EnergyLevel(h=h)) < 1:
            return spec


def sample_cases(n_points: int = GRID_POINTS, seed: int = DEFAULT_SEED) -> List[dict]:
    """Random (spec, h, c) cases; c is uniform on the flow's admissible range."""
    rng = np.random.default_rng(seed)
    cases = []
    for _ in range(n_points):
        alpha = float(rng.uniform(*ALPHA_RANGE))
        h = float(rng.uniform(*H_RANGE))
        spec = _draw_spec(rng, alpha, h)
        c_max = admissible_c_range(spec, EnergyLevel(h=h))
        c = float(rng.uniform(0.0, c_max if c_max is not None else UNBOUNDED_C_RANGE))
        cases.append({"alpha": alpha, "h": h, "epsilon": spec.epsilon, "flavor": spec.flavor.value, "c": c})
    return cases


def _tag_or_none(spec: PotentialSpec, h: EnergyLevel, c: float) -> Optional[OrbitTag]:
    try:
        return classify_orbit(spec, h, AngularMomentum(c=c)).tag
    except (ClassificationError, InadmissibleMomentum):
        return None


def exclusion_reason(spec: PotentialSpec, h: EnergyLevel, c: float) -> Optional[str]:
    """'tangency' near a tag change or where the classifier is ambiguous, else None."""
    tag = _tag_or_none(spec, h, c)
    if tag is None:
        return "tangency"
    for neighbour in (max(c - TANGENCY_BAND, 0.0), c + TANGENCY_BAND):
        if _tag_or_none(spec, h, neighbour) != tag:
            return "tangency"
    return None


def evaluate_case(case: dict) -> dict:
    """Classify one case both ways; the oracle is skipped for excluded cases."""
    spec = PotentialSpec(alpha=case["alpha"], epsilon=case["epsilon"], flavor=Flavor(case["flavor"]))
    h, c = EnergyLevel(h=case["h"]), AngularMomentum(c=case["c"])
    result = dict(case)
    result["excluded"] = exclusion_reason(spec, h, c.c)
    if result["excluded"]:
        return result

    result["analytic"] = classify_orbit(spec, h, c).tag.value
    try:
        result["oracle"] = classify_by_integration(spec, h, c).tag.value
    except (NumericFailure, ClassificationError) as e:
        result["oracle"] = None
        result["error"] = f"{type(e).__name__}: {e}"
    result["agree"] = result["oracle"] == result["analytic"]
    return result


def agreement_summary(results: List[dict]) -> dict:
    compared = [r for r in results if not r["excluded"]]
    agreed = sum(1 for r in compared if r["agree"])
    rate = agreed / len(compared) if compared else 1.0
    return {
        "n_points": len(results),
        "n_excluded": len(results) - len(compared),
        "n_compared": len(compared),
        "n_agree": agreed,
        "agreement": round(rate, 4),
        "passed": rate >= REQUIRED_AGREEMENT,
        "disagreements": [r for r in compared if not r["agree"]],
    }


def run(n_points: int = GRID_POINTS, seed: int = DEFAULT_SEED, jobs: Optional[int] = None, output_file=None):
    out_dir = _PROJECT_ROOT / DEFAULT_OUTPUT_DIR
    out_path = out_dir / (output_file or FILENAMES["oracle_agreement"])

    print(f"Sampling {n_points} cases (seed {seed})...")
    cases = sample_cases(n_points, seed)
    workers = jobs or os.cpu_count() or 1
    if workers == 1:
        results = [evaluate_case(case) for case in cases]
    else:
        with ProcessPoolExecutor(max_workers=workers) as pool:
            results = list(pool.map(evaluate_case, cases))

    summary = agreement_summary(results)
    document = {"schema": SCHEMA_VERSION, "seed": seed, **summary, "results": results}
    write_text_atomic(json.dumps(document, indent=2) + "\n", out_path)

    mark = "✅" if summary["passed"] else "❌"
    print(f"{mark} Agreement {summary['agreement']:.2%} on {summary['n_compared']} cases "
          f"({summary['n_excluded']} excluded). Results saved to {out_path}")
    for r in summary["disagreements"]:
        print(f"  alpha={r['alpha']:.4f} h={r['h']:.4f} eps={r['epsilon']:.4f} {r['flavor']:7} c={r['c']:.6f}: "
              f"{r['analytic']} vs {r['oracle']}")
    return summary


if __name__ == "__main__":
    n = int(sys.argv[1]) if len(sys.argv) > 1 else GRID_POINTS
    s = int(sys.argv[2]) if len(sys.argv) > 2 else DEFAULT_SEED
    run(n, s)
