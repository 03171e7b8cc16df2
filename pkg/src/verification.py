from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from typing import Mapping, Optional

import numpy as np
from scipy import stats

from alphabet import EMPTY, Dist, Word, is_prefix
from errors import AlphabetError, InsufficientTrialsError, PreconditionError, UnproductiveError
from logger import AppLogger
from protocol import Protocol
from residual import ResidualProtocol, solve_chain, stage_chain
from restart import RestartSpec
from sampler import ExactSampler
from settings import load_settings

logger = AppLogger("[Verification]")


@dataclass(frozen=True)
class PrefixRow:
  y: Word
  computed: Fraction
  expected: Fraction

  @property
  def deviation(self) -> Fraction:
    return abs(self.computed - self.expected)


@dataclass(frozen=True)
class VerificationReport:
  """
  Outcome of checking Pr(y is a prefix of the output) = ν(y) for |y| <= L.

  Attributes:
    name (str): Protocol or spec name.
    length (int): Longest prefix tested (L).
    rows (list[PrefixRow]): One row per tested prefix, shortest first.
    max_deviation (Fraction): Largest |computed - ν(y)|.
    complete (bool): Every computed probability is exact.
    bound (Fraction): Bound on the unexplored mass; 0 when complete.
    lost_mass (Fraction): Exact mass beyond the explored stages.
    slack (Fraction): Largest deviation that truncation alone can cause.
  """
  name: str
  length: int
  rows: list[PrefixRow]
  max_deviation: Fraction
  complete: bool = True
  bound: Fraction = Fraction(0)
  lost_mass: Fraction = Fraction(0)
  slack: Fraction = Fraction(0)

  def passed(self, tolerance: float = 0.0) -> bool:
    if self.complete:
      return self.max_deviation == 0
    return self.max_deviation <= self.slack and self.bound <= Fraction(tolerance)


def _report(name: str, length: int, nu: Dist, prob_of: Mapping[Word, Fraction], **extra) -> VerificationReport:
  rows = [
    PrefixRow(y, prob_of[y], nu.word_prob(y))
    for n in range(length + 1)
    for y in nu.alphabet.words(n)
  ]
  deviation = max(row.deviation for row in rows)
  return VerificationReport(name, length, rows, deviation, **extra)


def verify_reduction_exact(spec: RestartSpec, length: int) -> VerificationReport:
  """
  Exact prefix probabilities of a restart protocol's output stream.

  With W the law of the word emitted per iteration, R(ε) = 1 and

    R(y) = [Σ_{ε ≠ w ≺ y} W(w)·R(w⁻¹y) + Σ_{y ⪯ w} W(w)] / (1 - W(ε)),

  all evaluated in exact rationals.

  Raises:
    UnproductiveError: If every iteration emits ε.
  """
  if length < 0:
    raise ValueError(f"prefix length must be >= 0, got {length}")
  law = spec.word_law()
  w_empty = law.get(EMPTY, Fraction(0))
  if w_empty == 1:
    raise UnproductiveError(f"{spec.name} never emits; the output stream is empty")
  words = [(w, q) for w, q in law.items() if w]
  norm = 1 - w_empty

  probs: dict[Word, Fraction] = {EMPTY: Fraction(1)}
  for n in range(1, length + 1):
    for y in spec.nu.alphabet.words(n):
      total = Fraction(0)
      for w, q in words:
        if len(w) < n and y[:len(w)] == w:
          total += q * probs[y[len(w):]]
        elif is_prefix(y, w):
          total += q
      probs[y] = total / norm

  report = _report(spec.name, length, spec.nu, probs)
  logger.info(f"Exact verification of {spec.name} (L={length}): deviation {report.max_deviation}.")
  return report


def block_prefix_probs(block_law: Mapping[Word, Fraction], k: int, nu: Dist, length: int) -> dict[Word, Fraction]:
  """
  Prefix probabilities of a stream of i.i.d. k-symbol blocks.

  For |y| <= k, R(y) sums the block law over blocks extending y; longer
  prefixes factor as W(y[:k])·R(y[k:]).
  """
  probs: dict[Word, Fraction] = {}
  for n in range(length + 1):
    for y in nu.alphabet.words(n):
      if n <= k:
        probs[y] = sum((q for w, q in block_law.items() if w[:n] == y), Fraction(0))
      else:
        probs[y] = block_law.get(y[:k], Fraction(0)) * probs[y[k:]]
  return probs


def verify_reduction_lazy(p: ResidualProtocol, nu: Dist, length: int, depth: int) -> VerificationReport:
  """
  Verify a lazy uniform -> arbitrary protocol through its residual stages.

  The block law is solved exactly over the explored stages (closing memoised
  cycles with the geometric series) and conditioned on not descending past
  ``depth`` stages. The report carries the bound (c/d)^(k·depth) on the
  unexplored mass together with the exact lost mass.
  """
  if not isinstance(p, ResidualProtocol):
    raise PreconditionError(f"{p.name} is not a lazy uniform -> arbitrary protocol")
  if nu.size != p.c:
    raise AlphabetError(f"target has {nu.size} symbols, protocol emits {p.c}")

  chain = stage_chain(p, depth)
  law_vector = solve_chain(chain, [s.emission_probs() for s in chain.stages])
  lost = chain.lost_mass
  block_law = {
    p.output_word(y): q / (1 - lost)
    for y, q in enumerate(law_vector)
  }
  probs = block_prefix_probs(block_law, p.k, nu, length)

  blocks = max(1, math.ceil(length / p.k))
  bound = Fraction(p.c, p.d) ** (p.k * depth)
  report = _report(
    p.name, length, nu, probs,
    complete=chain.complete,
    bound=Fraction(0) if chain.complete else bound,
    lost_mass=lost,
    slack=2 * blocks * lost,
  )
  logger.info(
    f"Lazy verification of {p.name} (L={length}, depth={depth}, stages={len(chain.stages)}): "
    f"deviation {report.max_deviation}, complete={report.complete}."
  )
  return report


@dataclass(frozen=True)
class ChiSquareResult:
  """
  Attributes:
    statistic (float): Pearson statistic of first-L-symbol frequencies.
    threshold (float): Chi-squared quantile for |Γ|^L - 1 degrees of freedom.
    p_value (float): Upper tail probability of the statistic.
    dof (int): Degrees of freedom.
    trials (int): Independent runs.
    quantile (float): Quantile the threshold was taken at.
  """
  statistic: float
  threshold: float
  p_value: float
  dof: int
  trials: int
  quantile: float

  @property
  def passed(self) -> bool:
    return self.statistic <= self.threshold


def first_symbols(p: Protocol, sampler: ExactSampler, length: int, cap: int) -> Word:
  """Run p from its start state until it has emitted ``length`` symbols."""
  state, out, used = p.start, [], 0
  while len(out) < length:
    if used >= cap:
      raise UnproductiveError(f"{p.name} emitted {len(out)} of {length} symbols within {cap} inputs")
    state, z = p.step(state, sampler.draw())
    out.extend(z)
    used += 1
  return tuple(out[:length])


def chi_square_prefixes(
  p: Protocol,
  mu: Dist,
  nu: Dist,
  length: int,
  trials: int,
  seed: int,
  quantile: Optional[float] = None,
  emission_cap: Optional[int] = None,
) -> ChiSquareResult:
  """
  Goodness of fit of the first ``length`` output symbols against ν^L.

  Each trial restarts p from its start state; all trials draw from one
  sampler stream seeded with ``seed``.

  Raises:
    InsufficientTrialsError: If trials < 100·|Γ|^L.
    UnproductiveError: If a trial hits the emission cap.
  """
  settings = load_settings()
  quantile = settings.chi2_quantile if quantile is None else quantile
  cap = settings.emission_cap if emission_cap is None else emission_cap

  cells = nu.size ** length
  if length < 1:
    raise ValueError(f"prefix length must be >= 1, got {length}")
  if trials < 100 * cells:
    raise InsufficientTrialsError(f"need at least {100 * cells} trials for L={length}, got {trials}")
  if mu.size != p.input_alphabet.size or nu.size != p.output_alphabet.size:
    raise AlphabetError(f"distributions do not match the alphabets of {p.name}")

  sampler = ExactSampler(mu, seed)
  index = np.empty(trials, dtype=np.int64)
  for t in range(trials):
    y = first_symbols(p, sampler, length, cap)
    value = 0
    for s in y:
      value = value * nu.size + s
    index[t] = value

  observed = np.bincount(index, minlength=cells).astype(float)
  expected = np.array([float(nu.word_prob(y)) for y in nu.alphabet.words(length)]) * trials
  statistic, p_value = stats.chisquare(observed, expected)
  threshold = float(stats.chi2.ppf(quantile, cells - 1))

  result = ChiSquareResult(float(statistic), threshold, float(p_value), cells - 1, trials, quantile)
  logger.info(
    f"Chi-square for {p.name} (L={length}, trials={trials}, seed={seed}): "
    f"{result.statistic:.3f} vs {threshold:.3f} -> {'pass' if result.passed else 'fail'}."
  )
  return result
