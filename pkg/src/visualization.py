from pathlib import Path

import matplotlib
matplotlib.use("Agg")  # Set backend before importing pyplot
import matplotlib.pyplot as plt
import pandas as pd

from logger import AppLogger

logger = AppLogger("[Visualization]")


def generate_sweep_plot(
  input_csv: str,
  output_path: str,
) -> None:
  """
  Plot efficiency and scaled loss against k for a sweep CSV.

  Top panel: efficiency_bits against the entropy limit of 1.
  Bottom panel: loss_times_k, which stays bounded for Θ(1/k) families.
  Rows that failed to construct are skipped.
  """
  logger.info(f"Generating sweep plot. Input: {input_csv}")

  try:
    # 1. Load Data
    df = pd.read_csv(input_csv)
    df = df[df["efficiency_bits"].notna()].sort_values("k")
    if df.empty:
      raise ValueError(f"{input_csv} has no successful rows to plot")
    family = str(df["family"].iloc[0])
    logger.debug(f"Loaded {len(df)} rows of {family}.")

    # 2. Plotting
    fig, (ax_eff, ax_loss) = plt.subplots(2, 1, figsize=(10, 8), sharex=True)

    ax_eff.plot(df["k"], df["efficiency_bits"], marker="o", label="efficiency (bits)")
    ax_eff.axhline(1.0, linestyle="--", color="gray", label="entropy limit")
    ax_eff.set_ylabel("efficiency")
    ax_eff.grid(True)
    ax_eff.legend(loc="lower right")
    ax_eff.set_title(f"{family}: efficiency and loss vs k")

    ax_loss.plot(df["k"], df["loss_times_k"], marker="s", color="tab:red")
    ax_loss.set_xlabel("k")
    ax_loss.set_ylabel("(1 - efficiency) · k")
    ax_loss.grid(True)

    fig.tight_layout()

    # 3. Save
    path_obj = Path(output_path)
    path_obj.parent.mkdir(parents=True, exist_ok=True)

    fig.savefig(output_path, dpi=200)
    plt.close(fig)

    logger.info(f"Saved sweep plot -> {output_path}")

  except Exception:
    logger.exception("Failed to generate sweep plot.")
    raise
