"""
Render portrait curves and the equivalence sweep table into PNG figures.
Reads: combined.csv (portrait command), equivalence_sweep.csv (equivalence --sweep).
Saves: portrait.png, sweep_verdicts.png next to the inputs.

Run from project root: python scripts/render_figures.py [output_dir]
"""

import sys
from pathlib import Path

import matplotlib

matplotlib.use("Agg")
import matplotlib.pyplot as plt
import pandas as pd
import seaborn as sns

_PROJECT_ROOT = Path(__file__).resolve().parent.parent
if str(_PROJECT_ROOT) not in sys.path:
    sys.path.insert(0, str(_PROJECT_ROOT))

from smoothed_flow.config import DEFAULT_OUTPUT_DIR, FILENAMES
from smoothed_flow.portrait import SMOOTHED_CURVE, UNSMOOTHED_CURVE


def plot_portrait(combined: pd.DataFrame, save_path: Path) -> Path:
    """Energy curves as solid lines, momentum curves dashed and coloured by c."""
    energy = combined[combined["curve"].isin([UNSMOOTHED_CURVE, SMOOTHED_CURVE])]
    momentum = combined[~combined["curve"].isin([UNSMOOTHED_CURVE, SMOOTHED_CURVE])]

    plt.figure(figsize=(10, 7))
    sns.lineplot(data=energy, x="r", y="u", hue="curve", palette=["black", "dimgray"], linewidth=2, sort=False)
    if not momentum.empty:
        sns.lineplot(data=momentum, x="r", y="u", hue="c", palette="viridis", linestyle="--", linewidth=1,
                     sort=False, units="curve", estimator=None, legend=False)
    plt.title("Energy and angular-momentum curves", fontsize=16, fontweight="bold")
    plt.xlabel("r", fontsize=12)
    plt.ylabel("u", fontsize=12)
    plt.ylim(bottom=0)
    plt.grid(alpha=0.3)
    plt.tight_layout()
    plt.savefig(save_path, dpi=300, bbox_inches="tight")
    plt.close()
    return save_path


def plot_sweep(table: pd.DataFrame, save_path: Path) -> Path:
    """One heatmap per smoothed flavor: rows alpha, columns epsilon, cell 1 when the verdict is Equivalent."""
    flavors = sorted(table["flavor_b"].unique())
    fig, axes = plt.subplots(1, len(flavors), figsize=(6 * len(flavors), 5), squeeze=False)
    for ax, flavor in zip(axes[0], flavors):
        subset = table[table["flavor_b"] == flavor].assign(equivalent=lambda df: (df["verdict"] == "Equivalent").astype(int))
        grid = subset.pivot(index="alpha", columns="epsilon", values="equivalent")
        sns.heatmap(grid, annot=True, fmt="d", cmap="RdYlGn", vmin=0, vmax=1, cbar=False, ax=ax)
        ax.set_title(f"{flavor} vs none", fontsize=14, fontweight="bold")
    fig.suptitle("Equivalent (1) / NotEquivalent (0)", fontsize=16)
    fig.tight_layout()
    fig.savefig(save_path, dpi=300, bbox_inches="tight")
    plt.close(fig)
    return save_path


def render(out_dir=None):
    out_dir = Path(out_dir) if out_dir else _PROJECT_ROOT / DEFAULT_OUTPUT_DIR
    rendered = []

    combined_path = out_dir / FILENAMES["portrait_combined"]
    if combined_path.exists():
        rendered.append(plot_portrait(pd.read_csv(combined_path), out_dir / "portrait.png"))
    else:
        print(f"⚠️  {combined_path} not found; run the portrait command first")

    sweep_path = out_dir / FILENAMES["sweep_csv"]
    if sweep_path.exists():
        rendered.append(plot_sweep(pd.read_csv(sweep_path), out_dir / "sweep_verdicts.png"))
    else:
        print(f"⚠️  {sweep_path} not found; run equivalence --sweep first")

    for path in rendered:
        print(f"✅ Figure saved to {path}")
    return rendered


if __name__ == "__main__":
    render(sys.argv[1] if len(sys.argv) > 1 else None)
