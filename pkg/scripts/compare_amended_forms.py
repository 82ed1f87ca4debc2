"""
Integrate the derived and printed amended-flavor fields from the same start and
compare how well each keeps the energy and angular-momentum relations.
Saves: amended_forms.json (one record per (alpha, epsilon)).

Run from project root: python scripts/compare_amended_forms.py
"""

import json
import sys
from pathlib import Path

_PROJECT_ROOT = Path(__file__).resolve().parent.parent
if str(_PROJECT_ROOT) not in sys.path:
    sys.path.insert(0, str(_PROJECT_ROOT))

from smoothed_flow.classification import outermost_turning_radius
from smoothed_flow.config import DEFAULT_OUTPUT_DIR, DEFAULT_SWEEP_H, FILENAMES, SCHEMA_VERSION
from smoothed_flow.dynamics import compare_amended_forms
from smoothed_flow.errors import NumericFailure
from smoothed_flow.models import AmendedForm, AngularMomentum, EnergyLevel, Flavor, PotentialSpec, ReducedState
from smoothed_flow.portrait import write_text_atomic
from smoothed_flow.potential import admissible_c_bound, momentum_curve

ALPHAS = (2.0, 2.5, 3.0)
EPSILONS = (0.05, 0.1)
C_FRACTION = 0.5
TAU = 50.0


def compare_case(alpha: float, epsilon: float, h: float = DEFAULT_SWEEP_H, tau: float = TAU) -> dict:
    """Drift of both forms from the outermost turning point at c = C_FRACTION * bound."""
    spec = PotentialSpec(alpha=alpha, epsilon=epsilon, flavor=Flavor.AMENDED_SMOOTHED)
    level = EnergyLevel(h=h)
    c = AngularMomentum(c=C_FRACTION * admissible_c_bound(spec, level))
    r_turn = outermost_turning_radius(spec, level, c)
    start = ReducedState(r=r_turn, v=0.0, u=float(momentum_curve(r_turn, spec, c)))

    record = {"alpha": alpha, "epsilon": epsilon, "h": h, "c": c.c, "tau": tau}
    try:
        reports = compare_amended_forms(spec, level, start, tau)
    except NumericFailure as e:
        record["error"] = f"{type(e).__name__}: {e}"
        return record
    for form in AmendedForm:
        record[form.value] = reports[form].model_dump()
    return record


def run(output_file=None):
    out_dir = _PROJECT_ROOT / DEFAULT_OUTPUT_DIR
    out_path = out_dir / (output_file or FILENAMES["amended_forms"])

    records = []
    for alpha in ALPHAS:
        for epsilon in EPSILONS:
            print(f"🔄 alpha={alpha} eps={epsilon}...")
            records.append(compare_case(alpha, epsilon))

    document = {"schema": SCHEMA_VERSION, "cases": records}
    write_text_atomic(json.dumps(document, indent=2) + "\n", out_path)

    print(f"Compared {len(records)} cases. Results saved to {out_path}")
    for r in records:
        if "error" in r:
            print(f"  alpha={r['alpha']} eps={r['epsilon']}: {r['error']}")
            continue
        derived, printed = r[AmendedForm.DERIVED.value], r[AmendedForm.PRINTED.value]
        print(f"  alpha={r['alpha']} eps={r['epsilon']}: energy drift derived={derived['max_energy_residual']:.2e} "
              f"printed={printed['max_energy_residual']:.2e}")
    return records


if __name__ == "__main__":
    run()
