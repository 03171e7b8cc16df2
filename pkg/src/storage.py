import json
from pathlib import Path
from typing import Any

import pandas as pd

from logger import AppLogger

logger = AppLogger("[Storage]")


def table_to_csv_text(df: pd.DataFrame) -> str:
  """CSV text of a table: UTF-8, comma separated, header row, LF endings."""
  return df.to_csv(index=False, lineterminator="\n")


def save_table_to_csv(df: pd.DataFrame, filepath: str) -> None:
  """
  Save a result table (e.g. a sweep) to a CSV file.

  - df example: return value of analysis_tables.build_sweep_table
  - filepath example: "results/sweep_uniform_uniform.csv"
  """
  path = Path(filepath)
  logger.info(f"Saving process started. Target rows: {len(df)}, Path: {path}")

  # 1. Prepare Directory
  try:
    logger.debug(f"Creating parent directory: {path.parent}")
    path.parent.mkdir(parents=True, exist_ok=True)
  except Exception:
    logger.exception(f"Failed to create directory: {path.parent}")
    raise

  # 2. Write CSV File
  try:
    with path.open("w", newline="", encoding="utf-8") as f:
      f.write(table_to_csv_text(df))
  except Exception:
    logger.exception(f"Failed to write CSV file: {path}")
    raise

  logger.info(f"CSV saved successfully: {path}")


def to_json_text(record: Any) -> str:
  return json.dumps(record, indent=2, ensure_ascii=False) + "\n"


def save_json(record: Any, filepath: str) -> None:
  """Save a report (analyze/verify output) as pretty-printed JSON."""
  path = Path(filepath)
  try:
    path.parent.mkdir(parents=True, exist_ok=True)
    path.write_text(to_json_text(record), encoding="utf-8")
  except Exception:
    logger.exception(f"Failed to write JSON file: {path}")
    raise
  logger.info(f"JSON saved successfully: {path}")
