"""
Equivalence Phase: compare the orbit-class functions c -> OrbitClass of two flows
Single reports, the admissible c range, and the built-in (alpha, epsilon, flavor) sweep
"""

import logging
import os
import sys
from concurrent.futures import ProcessPoolExecutor
from typing import Iterable, List, Optional, Tuple

import pandas as pd

from .classification import classify_orbit
from .config import (
    C_RANGE_BISECTION_STEPS,
    C_RANGE_MAX_DOUBLINGS,
    DEFAULT_SAMPLES,
    DEFAULT_SEED,
    DEFAULT_SWEEP_H,
    SWEEP_ALPHAS,
    SWEEP_EPSILONS,
    UNBOUNDED_C_RANGE,
)
from .errors import ClassificationError, DomainError, RootBracketFailure
from .models import (
    AngularMomentum,
    EnergyLevel,
    EquivalenceReport,
    Flavor,
    OrbitClass,
    OrbitTag,
    PotentialSpec,
    Verdict,
)
from .potential import admissible_c_bound, check_softening

logger = logging.getLogger(__name__)


def _is_void(spec: PotentialSpec, h: EnergyLevel, c: float) -> bool:
    try:
        return classify_orbit(spec, h, AngularMomentum(c=c)).tag == OrbitTag.VOID
    except ClassificationError:
        return False


def admissible_c_range(spec: PotentialSpec, h: EnergyLevel) -> Optional[float]:
    """
    Largest c with a non-empty orbit class. None when every c > 0 is admissible
    (non-smoothed flow with alpha > 2).
    """
    check_softening(spec, h)
    if spec.is_amended and spec.alpha >= 2:
        return admissible_c_bound(spec, h)
    if spec.flavor == Flavor.NON_SMOOTHED and spec.alpha > 2:
        return None

    low, high = 0.0, 1.0
    doublings = 0
    while not _is_void(spec, h, high):
        low, high = high, 2 * high
        doublings += 1
        if doublings > C_RANGE_MAX_DOUBLINGS:
            raise RootBracketFailure("no empty orbit class found while doubling c")
    for _ in range(C_RANGE_BISECTION_STEPS):
        mid = 0.5 * (low + high)
        if _is_void(spec, h, mid):
            high = mid
        else:
            low = mid
    logger.debug("c range for %s: %.15g", spec, low)
    return low


def sample_quantiles(c_max: float, n_samples: int) -> List[float]:
    """Midpoints (i + 1/2) / n of [0, c_max]."""
    return [(i + 0.5) / n_samples * c_max for i in range(n_samples)]


def _classify_or_none(spec: PotentialSpec, h: EnergyLevel, c: float) -> Optional[OrbitClass]:
    try:
        return classify_orbit(spec, h, AngularMomentum(c=c))
    except ClassificationError as error:
        logger.debug("sample c=%.12g excluded: %s", c, error)
        return None


def equivalence_report(
    spec_a: PotentialSpec,
    spec_b: PotentialSpec,
    h: EnergyLevel,
    n_samples: int = DEFAULT_SAMPLES,
    seed: int = DEFAULT_SEED,
) -> EquivalenceReport:
    """
    Classify both flows at matched c quantiles of their own admissible ranges and
    compare tags. Relative equilibria and ambiguous samples are excluded.
    """
    if spec_a.alpha != spec_b.alpha:
        raise DomainError(f"specs must share alpha ({spec_a.alpha} != {spec_b.alpha})")

    range_a, range_b = admissible_c_range(spec_a, h), admissible_c_range(spec_b, h)
    if range_a is None and range_b is None:
        range_a = range_b = UNBOUNDED_C_RANGE
    elif range_a is None:
        range_a = range_b
    elif range_b is None:
        range_b = range_a

    c_a, c_b = sample_quantiles(range_a, n_samples), sample_quantiles(range_b, n_samples)
    classes_a = [_classify_or_none(spec_a, h, c) for c in c_a]
    classes_b = [_classify_or_none(spec_b, h, c) for c in c_b]

    witnesses, excluded = [], []
    for c, orbit_a, orbit_b in zip(c_a, classes_a, classes_b):
        if orbit_a is None or orbit_b is None or OrbitTag.RELATIVE_EQUILIBRIUM in (orbit_a.tag, orbit_b.tag):
            excluded.append(c)
        elif orbit_a.tag != orbit_b.tag:
            witnesses.append(c)

    return EquivalenceReport(
        spec_a=spec_a,
        spec_b=spec_b,
        h=h,
        n_samples=n_samples,
        seed=seed,
        c_samples=c_a,
        c_samples_b=c_b,
        classes_a=classes_a,
        classes_b=classes_b,
        verdict=Verdict.NOT_EQUIVALENT if witnesses else Verdict.EQUIVALENT,
        witnesses=witnesses,
        excluded=excluded,
    )


def expected_verdict(alpha: float, flavor: Flavor) -> Optional[Verdict]:
    """
    Known outcome against the non-smoothed flow: plain smoothing preserves the
    orbit structure only for alpha < 2, amended smoothing for alpha >= 2.
    None where no outcome is established (amended with alpha < 2).
    """
    if flavor == Flavor.PLAIN_SMOOTHED:
        return Verdict.EQUIVALENT if alpha < 2 else Verdict.NOT_EQUIVALENT
    if flavor == Flavor.AMENDED_SMOOTHED:
        return Verdict.EQUIVALENT if alpha >= 2 else None
    return Verdict.EQUIVALENT


def sweep_cases(
    alphas: Iterable[float] = SWEEP_ALPHAS,
    epsilons: Iterable[float] = SWEEP_EPSILONS,
) -> List[Tuple[float, float, Flavor]]:
    """(alpha, epsilon, smoothed flavor) triples: plain for every alpha, amended for alpha >= 2."""
    cases = []
    for alpha in alphas:
        for epsilon in epsilons:
            cases.append((alpha, epsilon, Flavor.PLAIN_SMOOTHED))
            if alpha >= 2:
                cases.append((alpha, epsilon, Flavor.AMENDED_SMOOTHED))
    return cases


def _sweep_task(task: Tuple[float, float, Flavor, float, int, int]) -> EquivalenceReport:
    alpha, epsilon, flavor, h, n_samples, seed = task
    return equivalence_report(
        PotentialSpec(alpha=alpha),
        PotentialSpec(alpha=alpha, epsilon=epsilon, flavor=flavor),
        EnergyLevel(h=h),
        n_samples,
        seed,
    )


def equivalence_sweep(
    h: float = DEFAULT_SWEEP_H,
    alphas: Iterable[float] = SWEEP_ALPHAS,
    epsilons: Iterable[float] = SWEEP_EPSILONS,
    n_samples: int = DEFAULT_SAMPLES,
    seed: int = DEFAULT_SEED,
    jobs: Optional[int] = None,
) -> List[EquivalenceReport]:
    """Reports for every sweep case, in case order regardless of worker completion order."""
    tasks = [(alpha, epsilon, flavor, h, n_samples, seed) for alpha, epsilon, flavor in sweep_cases(alphas, epsilons)]
    workers = jobs or os.cpu_count() or 1
    if workers == 1:
        return [_sweep_task(task) for task in tasks]
    with ProcessPoolExecutor(max_workers=workers) as pool:
        return list(pool.map(_sweep_task, tasks))


def sweep_table(reports: List[EquivalenceReport]) -> pd.DataFrame:
    """One row per report with the verdict next to the expected one."""
    rows = []
    for report in reports:
        expected = expected_verdict(report.spec_b.alpha, report.spec_b.flavor)
        rows.append({
            "alpha": report.spec_b.alpha,
            "epsilon": report.spec_b.epsilon,
            "flavor_a": report.spec_a.flavor.value,
            "flavor_b": report.spec_b.flavor.value,
            "verdict": report.verdict.value,
            "expected": expected.value if expected else None,
            "matches": expected is None or expected == report.verdict,
            "n_witnesses": len(report.witnesses),
            "n_excluded": len(report.excluded),
        })
    return pd.DataFrame(rows)


def run_equivalence_sweep(
    h: float = DEFAULT_SWEEP_H,
    n_samples: int = DEFAULT_SAMPLES,
    seed: int = DEFAULT_SEED,
    jobs: Optional[int] = None,
) -> Tuple[List[EquivalenceReport], pd.DataFrame]:
    """Main function to run the built-in sweep; prints a verdict table to stderr."""
    print(f"Starting equivalence sweep at h={h} with {n_samples} c-samples per case...", file=sys.stderr)
    reports = equivalence_sweep(h=h, n_samples=n_samples, seed=seed, jobs=jobs)
    table = sweep_table(reports)

    print("=" * 60, file=sys.stderr)
    print("EQUIVALENCE SWEEP", file=sys.stderr)
    print("=" * 60, file=sys.stderr)
    for row in table.itertuples(index=False):
        mark = "✅" if row.matches else "❌"
        print(f"{mark} alpha={row.alpha:<4} eps={row.epsilon:<5} {row.flavor_b:8}: {row.verdict:14} "
              f"(expected {row.expected}, witnesses {row.n_witnesses}, excluded {row.n_excluded})", file=sys.stderr)
    print(f"\nCases matching the expected verdict: {int(table['matches'].sum())}/{len(table)}", file=sys.stderr)
    return reports, table
