from __future__ import annotations

from dataclasses import dataclass
from typing import Iterable, Optional

import numpy as np

from alphabet import Dist, entropy
from errors import AlphabetError, UnproductiveError
from logger import AppLogger
from protocol import Protocol
from sampler import ExactSampler
from settings import load_settings

logger = AppLogger("[Estimation]")


def _mean_and_stderr(values: list[float]) -> tuple[float, float]:
  arr = np.asarray(values, dtype=float)
  if arr.size < 2:
    return float(arr.mean()), 0.0
  return float(arr.mean()), float(arr.std(ddof=1) / np.sqrt(arr.size))


@dataclass(frozen=True)
class EfficiencyEstimate:
  """
  E_n = (outputs / n)·H(ν)/H(μ), one value per seed.

  Attributes:
    n (int): Input symbols consumed per run.
    seeds (tuple[int, ...]): Seeds of the runs, in order.
    outputs (tuple[int, ...]): Output symbols produced by each run.
    values (tuple[float, ...]): E_n of each run.
    mean (float): Mean of ``values``.
    stderr (float): Sample standard deviation across seeds over sqrt(#seeds).
  """
  n: int
  seeds: tuple[int, ...]
  outputs: tuple[int, ...]
  values: tuple[float, ...]
  mean: float
  stderr: float

  def within(self, expected: float, sigmas: float = 3.0) -> bool:
    return abs(self.mean - expected) <= sigmas * self.stderr


def count_outputs(p: Protocol, sampler: ExactSampler, n: int) -> int:
  state, produced = p.start, 0
  for _ in range(n):
    state, z = p.step(state, sampler.draw())
    produced += len(z)
  return produced


def monte_carlo_efficiency(p: Protocol, mu: Dist, nu: Dist, n: int, seeds: Iterable[int]) -> EfficiencyEstimate:
  """
  Empirical efficiency over independent seeded runs of n inputs each.

  Raises:
    ValueError: If n < 1, no seed is given, or H(μ) = 0.
  """
  seeds = tuple(seeds)
  if n < 1:
    raise ValueError(f"n must be >= 1, got {n}")
  if not seeds:
    raise ValueError("at least one seed is required")
  if mu.size != p.input_alphabet.size:
    raise AlphabetError(f"input distribution has {mu.size} symbols, {p.name} reads {p.input_alphabet.size}")
  h_mu = entropy(mu)
  if h_mu == 0:
    raise ValueError("input distribution has zero entropy; efficiency is undefined")
  scale = entropy(nu) / h_mu

  outputs = []
  for seed in seeds:
    outputs.append(count_outputs(p, ExactSampler(mu, seed), n))
    logger.debug(f"{p.name}: seed {seed} produced {outputs[-1]} symbols from {n} inputs.")

  values = [out / n * scale for out in outputs]
  mean, stderr = _mean_and_stderr(values)
  logger.info(f"Monte Carlo efficiency of {p.name} (n={n}, seeds={len(seeds)}): {mean:.6f} ± {stderr:.6f}.")
  return EfficiencyEstimate(n, seeds, tuple(outputs), tuple(values), mean, stderr)


@dataclass(frozen=True)
class LatencyEstimate:
  """
  Attributes:
    epochs (int): Number of epochs measured.
    mean (float): Mean inputs consumed per epoch.
    stderr (float): Standard error of the mean.
    seed (int): Sampler seed.
  """
  epochs: int
  mean: float
  stderr: float
  seed: int

  def within(self, expected: float, sigmas: float = 3.0) -> bool:
    return abs(self.mean - expected) <= sigmas * self.stderr


def latency_empirical(p: Protocol, mu: Dist, epochs: int, seed: int, cap: Optional[int] = None) -> LatencyEstimate:
  """
  Mean inputs consumed until the first emission, restarting the count after
  every emission. The protocol keeps running; it is not reset.

  Raises:
    UnproductiveError: If an epoch consumes ``cap`` inputs without emitting.
  """
  if epochs < 1:
    raise ValueError(f"epochs must be >= 1, got {epochs}")
  cap = load_settings().emission_cap if cap is None else cap

  sampler = ExactSampler(mu, seed)
  lengths = np.empty(epochs, dtype=np.int64)
  state = p.start
  for e in range(epochs):
    used = 0
    while True:
      if used >= cap:
        raise UnproductiveError(f"{p.name} consumed {cap} inputs without emitting (epoch {e})")
      state, z = p.step(state, sampler.draw())
      used += 1
      if z:
        break
    lengths[e] = used

  mean, stderr = _mean_and_stderr(lengths.tolist())
  logger.info(f"Empirical latency of {p.name} ({epochs} epochs, seed {seed}): {mean:.4f} ± {stderr:.4f}.")
  return LatencyEstimate(epochs, mean, stderr, seed)
