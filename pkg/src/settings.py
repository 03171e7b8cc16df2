import os
from dataclasses import dataclass
from functools import lru_cache

from dotenv import load_dotenv

LOG_LEVELS = ("DEBUG", "INFO", "WARNING", "ERROR", "CRITICAL")


@dataclass(frozen=True)
class Settings:
  """
  Runtime configuration read from the environment (and a `.env` file).

  Attributes:
    log_level (str): Level of the application logger.
    default_seed (int): Seed used when the CLI receives no ``--seed``.
    depth_cap (int): Search depth for ``prefix_code_of``.
    emission_cap (int): Inputs consumed without any emission before a run is
      declared unproductive (latency and chi-squared runs).
    tolerance (float): Default tolerance for ``verify --lazy``.
    chi2_quantile (float): Quantile used as the chi-squared pass threshold.
  """
  log_level: str = "WARNING"
  default_seed: int = 20240101
  depth_cap: int = 12
  emission_cap: int = 100_000
  tolerance: float = 1e-6
  chi2_quantile: float = 0.999


def _read_int(name: str, default: int, minimum: int = 0) -> int:
  raw = os.getenv(name)
  if raw is None or not raw.strip():
    return default
  try:
    value = int(raw)
  except ValueError:
    raise ValueError(f"{name} must be an integer, got {raw!r} in `.env`.")
  if value < minimum:
    raise ValueError(f"{name} must be >= {minimum}, got {value}.")
  return value


def _read_float(name: str, default: float, low: float, high: float) -> float:
  raw = os.getenv(name)
  if raw is None or not raw.strip():
    return default
  try:
    value = float(raw)
  except ValueError:
    raise ValueError(f"{name} must be a decimal number, got {raw!r} in `.env`.")
  if not low < value < high:
    raise ValueError(f"{name} must lie in ({low}, {high}), got {value}.")
  return value


@lru_cache(maxsize=1)
def load_settings() -> Settings:
  """
  Load settings once per process.

  Raises:
    ValueError: If a configured value cannot be parsed or is out of range.
  """
  load_dotenv()

  level = os.getenv("REDUCTIONS_LOG_LEVEL", "").strip().upper() or "WARNING"
  if level not in LOG_LEVELS:
    raise ValueError(f"REDUCTIONS_LOG_LEVEL must be one of {LOG_LEVELS}, got {level!r}.")

  seed = _read_int("REDUCTIONS_DEFAULT_SEED", Settings.default_seed)
  if seed >= 2 ** 64:
    raise ValueError("REDUCTIONS_DEFAULT_SEED must fit in 64 bits.")

  return Settings(
    log_level=level,
    default_seed=seed,
    depth_cap=_read_int("REDUCTIONS_DEPTH_CAP", Settings.depth_cap, minimum=1),
    emission_cap=_read_int("REDUCTIONS_EMISSION_CAP", Settings.emission_cap, minimum=1),
    tolerance=_read_float("REDUCTIONS_TOLERANCE", Settings.tolerance, 0.0, 1.0),
    chi2_quantile=_read_float("REDUCTIONS_CHI2_QUANTILE", Settings.chi2_quantile, 0.0, 1.0),
  )
