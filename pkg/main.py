"""
Main entry point for the smoothed central-field flow experiments.
Subcommands: equilibria, classify, portrait, equivalence, simulate.

Standard output carries one JSON document per run; progress goes to standard error.
"""

import argparse
import json
import logging
import math
import sys
from pathlib import Path
from typing import Any, Callable, Dict, Tuple

from dotenv import dotenv_values
from pydantic import ValidationError

from smoothed_flow.classification import classify_by_integration, classify_orbit, outermost_turning_radius
from smoothed_flow.config import DEFAULT_OUTPUT_DIR, DEFAULT_SWEEP_H, FILENAMES, SCHEMA_VERSION
from smoothed_flow.dynamics import integrate, project_onto_surface, trajectory_events, trajectory_frame
from smoothed_flow.equilibria import collision_fixed_points, relative_equilibria
from smoothed_flow.equivalence import equivalence_report, expected_verdict, run_equivalence_sweep
from smoothed_flow.errors import ClassificationError, NumericFailure, SmoothedFlowError, ValidationFailure
from smoothed_flow.models import (
    IntegrationOptions,
    McGeheeState,
    OrbitClass,
    PotentialSpec,
    ReducedState,
    RunConfig,
)
from smoothed_flow.portrait import parse_c_grid, portrait_curves, write_frame_atomic, write_portrait, write_text_atomic
from smoothed_flow.potential import momentum_curve

EXIT_OK = 0
EXIT_VALIDATION = 2
EXIT_DISAGREEMENT = 3
EXIT_NUMERIC = 4

# config-file keys whose flag stores under another name
_CONFIG_KEY_ALIASES = {"from": "start", "assert_known": "assert_paper"}

Document = Dict[str, Any]


class CommandLineParser(argparse.ArgumentParser):
    """Usage errors become a single 'error:' line with the validation exit code."""

    def error(self, message):
        print(f"error: {message}", file=sys.stderr)
        sys.exit(EXIT_VALIDATION)


def _orbit_document(orbit: OrbitClass) -> Document:
    return {"tag": orbit.tag.value, "turning_radii": orbit.turning_radii, "tangency": orbit.tangency}


def cmd_equilibria(config: RunConfig) -> Tuple[Document, int]:
    spec, h = config.potential_spec(), config.energy_level()
    equilibria = relative_equilibria(spec, h)
    collision = collision_fixed_points(spec, h)
    document = config.header()
    document.update({
        "equilibria": [
            {"r": eq.r_e, "u": eq.u_e, "kind": eq.kind.value, "source": eq.source.value}
            for eq in equilibria
        ],
        "collision_fixed_points": [state.model_dump() for state in collision.points],
        "collision_manifold_radius": collision.manifold_radius,
        "outside_validated_scope": spec.outside_validated_scope,
    })
    return document, EXIT_OK


def cmd_classify(config: RunConfig) -> Tuple[Document, int]:
    spec, h, c = config.potential_spec(), config.energy_level(), config.angular_momentum()
    orbit = classify_orbit(spec, h, c)
    document = config.header()
    document.update({"c": c.c, "reflected": c.reflected})
    document.update(_orbit_document(orbit))
    exit_code = EXIT_OK
    if config.oracle:
        print("🔍 Running integration oracle...", file=sys.stderr)
        oracle = classify_by_integration(spec, h, c)
        document["oracle"] = _orbit_document(oracle)
        document["agree"] = oracle.tag == orbit.tag
        if not document["agree"]:
            print(f"❌ Oracle disagrees: {orbit.tag.value} vs {oracle.tag.value}", file=sys.stderr)
            exit_code = EXIT_DISAGREEMENT
    document["outside_validated_scope"] = spec.outside_validated_scope
    return document, exit_code


def cmd_portrait(config: RunConfig) -> Tuple[Document, int]:
    if config.c_grid is None:
        raise ValidationFailure("c_grid: --c-grid start:stop:count is required")
    try:
        c_values = parse_c_grid(config.c_grid)
    except ValueError as e:
        raise ValidationFailure(f"c_grid: {e}")
    spec, h = config.potential_spec(), config.energy_level()
    curves = portrait_curves(spec, h, c_values, config.points)
    written = write_portrait(curves, c_values, config.out)
    print(f"✅ Portrait curves saved to {config.out}", file=sys.stderr)
    document = config.header()
    document.update({
        "c_values": [float(c) for c in c_values],
        "files": [str(path) for path in written],
        "rows": {name: len(frame) for name, frame in curves.items()},
    })
    return document, EXIT_OK


def cmd_equivalence(config: RunConfig) -> Tuple[Document, int]:
    document = config.header()
    if config.sweep:
        h = config.h if config.h is not None else DEFAULT_SWEEP_H
        reports, table = run_equivalence_sweep(h=h, n_samples=config.samples, seed=config.seed, jobs=config.jobs)
        write_frame_atomic(table, Path(config.out) / FILENAMES["sweep_csv"])
        document.update({
            "h": h,
            "reports": [report.to_document() for report in reports],
            "table": table.to_dict(orient="records"),
        })
        failed = not bool(table["matches"].all())
        return document, EXIT_DISAGREEMENT if config.assert_paper and failed else EXIT_OK

    flavor_b = config.comparison_flavor()
    spec_a = PotentialSpec(alpha=config.alpha)
    spec_b = PotentialSpec(alpha=config.alpha, epsilon=config.epsilon, flavor=flavor_b)
    report = equivalence_report(spec_a, spec_b, config.energy_level(), config.samples, config.seed)
    document = report.to_document()
    document["command"] = config.command
    print(f"Verdict: {report.verdict.value} ({len(report.witnesses)} witnesses, {len(report.excluded)} excluded)", file=sys.stderr)
    expected = expected_verdict(config.alpha, flavor_b)
    if config.assert_paper and expected is not None and expected != report.verdict:
        print(f"❌ Expected {expected.value}", file=sys.stderr)
        return document, EXIT_DISAGREEMENT
    return document, EXIT_OK


def _simulation_start(config: RunConfig, spec: PotentialSpec):
    h, c = config.energy_level(), config.angular_momentum()
    sign = -1.0 if c.reflected else 1.0
    if config.start == "equilibrium":
        equilibria = relative_equilibria(spec, h)
        if not equilibria:
            raise ValidationFailure("start: no relative equilibrium for these parameters")
        state = equilibria[0].state() if sign > 0 else equilibria[1].state()
    elif config.start == "turning":
        r_turn = outermost_turning_radius(spec, h, c)
        if r_turn is None:
            raise ValidationFailure("start: no admissible orbit for this c")
        state = ReducedState(r=r_turn, v=0.0, u=sign * float(momentum_curve(r_turn, spec, c)))
    else:
        missing = [name for name in ("r0", "v0", "u0") if getattr(config, name) is None]
        if missing:
            raise ValidationFailure(f"{missing[0]}: required without --from")
        state = ReducedState(r=config.r0, v=config.v0, u=config.u0)
        if config.project:
            state = project_onto_surface(state, spec, h)
    if config.full:
        state = McGeheeState(r=state.r, v=state.v, u=state.u, theta=0.0)
    return state


def cmd_simulate(config: RunConfig) -> Tuple[Document, int]:
    spec, h = config.potential_spec(), config.energy_level()
    start = _simulation_start(config, spec)
    opts = IntegrationOptions(max_step=config.max_step or math.inf)
    print(f"🔄 Integrating from (r={start.r:.6g}, v={start.v:.6g}, u={start.u:.6g}) over tau={config.tau}", file=sys.stderr)
    traj = integrate(spec, h, start, (0.0, config.tau), opts)

    out = Path(config.out)
    csv_path = write_frame_atomic(trajectory_frame(traj), out / FILENAMES["trajectory_csv"])
    events_path = write_text_atomic(
        json.dumps(trajectory_events(traj), indent=2) + "\n", out / FILENAMES["trajectory_events"]
    )
    print(f"✅ Trajectory saved to {csv_path}", file=sys.stderr)

    document = config.header()
    document.update({
        "start": start.model_dump(),
        "samples": len(traj.tau),
        "events": trajectory_events(traj),
        "drift": traj.drift.model_dump(),
        "files": [str(csv_path), str(events_path)],
    })
    return document, EXIT_OK


COMMANDS: Dict[str, Callable[[RunConfig], Tuple[Document, int]]] = {
    "equilibria": cmd_equilibria,
    "classify": cmd_classify,
    "portrait": cmd_portrait,
    "equivalence": cmd_equivalence,
    "simulate": cmd_simulate,
}


def build_parser() -> CommandLineParser:
    common = CommandLineParser(add_help=False)
    common.add_argument("--alpha", type=float, default=argparse.SUPPRESS, help="Homogeneity exponent alpha > 0")
    common.add_argument("--h", type=float, default=argparse.SUPPRESS, help="Energy level (negative)")
    common.add_argument("--epsilon", type=float, default=argparse.SUPPRESS, help="Softening length (default: 0)")
    common.add_argument("--flavor", choices=["none", "plain", "amended"], default=argparse.SUPPRESS,
                        help="Smoothing flavor (default: none when epsilon = 0, else plain)")
    common.add_argument("--c", type=float, default=argparse.SUPPRESS, help="Angular momentum; negative values are reflected")
    common.add_argument("--seed", type=int, default=argparse.SUPPRESS, help="Seed recorded in every output header")
    common.add_argument("--jobs", type=int, default=argparse.SUPPRESS, help="Worker processes for sweeps (default: CPU count)")
    common.add_argument("--config", type=str, default=None, help="KEY=value file; explicit flags win over its values")
    common.add_argument("--out", type=str, default=argparse.SUPPRESS, help=f"Output directory (default: {DEFAULT_OUTPUT_DIR})")
    common.add_argument("--verbose", action="store_true", default=argparse.SUPPRESS, help="Debug logging on stderr")

    parser = CommandLineParser(description="Smoothed central-field flows: equilibria, orbit classes, equivalence reports")
    subparsers = parser.add_subparsers(dest="command", required=True)

    subparsers.add_parser("equilibria", parents=[common], help="Relative equilibria and collision fixed points")

    classify = subparsers.add_parser("classify", parents=[common], help="Orbit type at (h, c)")
    classify.add_argument("--oracle", action="store_true", default=argparse.SUPPRESS, help="Cross-check by integration")

    portrait = subparsers.add_parser("portrait", parents=[common], help="Energy and momentum curve CSVs")
    portrait.add_argument("--c-grid", type=str, default=argparse.SUPPRESS, help="start:stop:count")
    portrait.add_argument("--points", type=int, default=argparse.SUPPRESS, help="Samples per curve")

    equivalence = subparsers.add_parser("equivalence", parents=[common], help="Compare smoothed and unsmoothed class functions")
    equivalence.add_argument("--sweep", action="store_true", default=argparse.SUPPRESS, help="Run the built-in alpha/epsilon grid")
    equivalence.add_argument("--assert-paper", "--assert-known", dest="assert_paper", action="store_true",
                             default=argparse.SUPPRESS, help="Exit 3 when a verdict differs from the known outcome")
    equivalence.add_argument("--flavor-b", choices=["plain", "amended"], default=argparse.SUPPRESS, help="Smoothed flavor to compare")
    equivalence.add_argument("--samples", type=int, default=argparse.SUPPRESS, help="c samples per report")

    simulate = subparsers.add_parser("simulate", parents=[common], help="Integrate one trajectory")
    simulate.add_argument("--from", dest="start", choices=["equilibrium", "turning"], default=argparse.SUPPRESS,
                          help="Named start point")
    simulate.add_argument("--r0", type=float, default=argparse.SUPPRESS)
    simulate.add_argument("--v0", type=float, default=argparse.SUPPRESS)
    simulate.add_argument("--u0", type=float, default=argparse.SUPPRESS)
    simulate.add_argument("--tau", type=float, default=argparse.SUPPRESS, help="Rescaled-time span")
    simulate.add_argument("--project", action="store_true", default=argparse.SUPPRESS, help="Project the start onto the energy surface")
    simulate.add_argument("--full", action="store_true", default=argparse.SUPPRESS, help="Carry theta (full McGehee state)")
    simulate.add_argument("--max-step", type=float, default=argparse.SUPPRESS, help="Largest tau step")
    return parser


def load_config_file(path: str) -> Dict[str, Any]:
    """KEY=value lines; keys are flag names with '-' or '_'."""
    if not Path(path).is_file():
        raise ValidationFailure(f"config: file not found: {path}")
    values = {}
    for key, value in dotenv_values(path).items():
        name = key.strip().lower().replace("-", "_")
        name = _CONFIG_KEY_ALIASES.get(name, name)
        if name not in RunConfig.model_fields or name == "command":
            raise ValidationFailure(f"config: unknown key '{key}'")
        values[name] = value
    return values


def build_config(args: argparse.Namespace) -> RunConfig:
    """Built-in defaults < config file < explicit flags."""
    flags = {key: value for key, value in vars(args).items() if key != "config"}
    merged = load_config_file(args.config) if args.config else {}
    merged.update(flags)
    return RunConfig(**merged)


def format_validation_error(error: ValidationError) -> str:
    first = error.errors()[0]
    message = first["msg"].removeprefix("Value error, ")
    location = ".".join(str(part) for part in first["loc"])
    return f"{location}: {message}" if location else message


def fail(message: str, exit_code: int) -> None:
    print(f"error: {message}", file=sys.stderr)
    sys.exit(exit_code)


def main(argv=None) -> int:
    """
    Parse flags, dispatch one subcommand, print its JSON document.
    """
    args = build_parser().parse_args(argv)
    verbose = getattr(args, "verbose", False)
    logging.basicConfig(
        level=logging.DEBUG if verbose else logging.WARNING,
        format="%(levelname)s %(name)s: %(message)s",
        stream=sys.stderr,
    )

    try:
        config = build_config(args)
        if config.verbose:
            logging.getLogger().setLevel(logging.DEBUG)
        document, exit_code = COMMANDS[config.command](config)
    except ValidationError as e:
        fail(format_validation_error(e), EXIT_VALIDATION)
    except ValidationFailure as e:
        fail(str(e), EXIT_VALIDATION)
    except (NumericFailure, ClassificationError) as e:
        fail(f"{type(e).__name__}: {e}", EXIT_NUMERIC)
    except SmoothedFlowError as e:
        fail(f"{type(e).__name__}: {e}", EXIT_NUMERIC)
    except OSError as e:
        fail(f"cannot write output: {e}", EXIT_VALIDATION)

    document.setdefault("schema", SCHEMA_VERSION)
    print(json.dumps(document, indent=2))
    return exit_code


if __name__ == "__main__":
    sys.exit(main())
