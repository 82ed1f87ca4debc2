"""
Curve data behind phase portraits: the energy curves sqrt(f) without and with
smoothing, and the angular-momentum curves u_c(r) over a grid of c.
"""

import os
import tempfile
from pathlib import Path
from typing import Dict, List, Sequence

import numpy as np
import pandas as pd

from .config import FILENAMES, PORTRAIT_POINTS
from .models import AngularMomentum, EnergyLevel, PotentialSpec
from .potential import energy_profile, max_radius, momentum_curve

FLOAT_FORMAT = "%.17g"
UNSMOOTHED_CURVE = "u_h0"
SMOOTHED_CURVE = "u_heps"


def parse_c_grid(text: str) -> np.ndarray:
    """'start:stop:count' -> count evenly spaced values, endpoints included."""
    parts = text.split(":")
    if len(parts) != 3:
        raise ValueError(f"c-grid must look like start:stop:count, got '{text}'")
    start, stop, count = float(parts[0]), float(parts[1]), int(parts[2])
    if count < 1:
        raise ValueError("c-grid count must be at least 1")
    if start < 0 or stop < 0:
        raise ValueError("c-grid values must be non-negative")
    return np.linspace(start, stop, count)


def _energy_curve(grid: np.ndarray, spec: PotentialSpec, h: EnergyLevel) -> pd.DataFrame:
    r = grid[grid <= max_radius(spec, h)]
    u = np.sqrt(np.clip(energy_profile(r, spec, h), 0.0, None))
    return pd.DataFrame({"r": r, "u": u})


def _momentum_curve(grid: np.ndarray, spec: PotentialSpec, h: EnergyLevel, c: float) -> pd.DataFrame:
    r = grid[grid <= max_radius(spec, h)]
    if not spec.is_amended and spec.alpha < 2 and c > 0:
        r = r[r > 0]
    u = momentum_curve(r, spec, AngularMomentum(c=c))
    frame = pd.DataFrame({"r": r, "u": np.asarray(u, dtype=float)})
    return frame[np.isfinite(frame["u"])].reset_index(drop=True)


def portrait_curves(
    spec: PotentialSpec,
    h: EnergyLevel,
    c_values: Sequence[float],
    points: int = PORTRAIT_POINTS,
) -> Dict[str, pd.DataFrame]:
    """
    Frames with columns r, u keyed by curve name: u_h0, u_heps, then u_c_00, u_c_01, ...
    All curves share one r grid on [0, R_max of the unsmoothed flow], cut at each curve's own R_max.
    """
    grid = np.linspace(0.0, max_radius(spec.unsmoothed(), h), points)
    curves = {
        UNSMOOTHED_CURVE: _energy_curve(grid, spec.unsmoothed(), h),
        SMOOTHED_CURVE: _energy_curve(grid, spec, h),
    }
    for i, c in enumerate(c_values):
        curves[f"u_c_{i:02d}"] = _momentum_curve(grid, spec, h, float(c))
    return curves


def combined_frame(curves: Dict[str, pd.DataFrame], c_values: Sequence[float]) -> pd.DataFrame:
    """Long table: curve, c (empty for energy curves), r, u."""
    frames = []
    c_lookup = {f"u_c_{i:02d}": float(c) for i, c in enumerate(c_values)}
    for name, frame in curves.items():
        frames.append(frame.assign(curve=name, c=c_lookup.get(name, np.nan))[["curve", "c", "r", "u"]])
    return pd.concat(frames, ignore_index=True)


def count_intersections(energy: pd.DataFrame, momentum: pd.DataFrame) -> int:
    """Sign changes of (energy curve - momentum curve) on their common r samples."""
    merged = energy.merge(momentum, on="r", suffixes=("_h", "_c"))
    difference = np.sign((merged["u_h"] - merged["u_c"]).to_numpy())
    difference = difference[difference != 0]
    return int(np.count_nonzero(difference[1:] != difference[:-1]))


def write_text_atomic(text: str, path: Path) -> Path:
    """Write to a temp file in the target directory, then rename over the target."""
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    handle, temp_name = tempfile.mkstemp(dir=path.parent, prefix=f".{path.name}.", suffix=".tmp")
    try:
        with os.fdopen(handle, "w", encoding="utf-8", newline="") as f:
            f.write(text)
        os.replace(temp_name, path)
    except BaseException:
        if os.path.exists(temp_name):
            os.unlink(temp_name)
        raise
    return path


def write_frame_atomic(frame: pd.DataFrame, path: Path) -> Path:
    """CSV with 17 significant digits, written atomically."""
    return write_text_atomic(frame.to_csv(index=False, float_format=FLOAT_FORMAT), path)


def write_portrait(curves: Dict[str, pd.DataFrame], c_values: Sequence[float], out_dir: Path) -> List[Path]:
    """One CSV per curve plus the combined table; returns the written paths."""
    out_dir = Path(out_dir)
    written = [write_frame_atomic(frame, out_dir / f"{name}.csv") for name, frame in curves.items()]
    written.append(write_frame_atomic(combined_frame(curves, c_values), out_dir / FILENAMES["portrait_combined"]))
    return written
