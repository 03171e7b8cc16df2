from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from typing import Iterator, Optional, Sequence

from alphabet import Dist, Word
from errors import PreconditionError
from logger import AppLogger

logger = AppLogger("[Expansions]")


def digits(n: int, base: int) -> list[int]:
  """Base-``base`` digits of n, least significant first (empty for n = 0)."""
  if base < 2:
    raise ValueError(f"base must be >= 2, got {base}")
  if n < 0:
    raise ValueError(f"cannot expand negative {n}")
  out = []
  while n:
    n, rem = divmod(n, base)
    out.append(rem)
  return out


def floor_log(n: int, base: int) -> int:
  """Largest m with base^m <= n, computed exactly (n >= 1)."""
  if n < 1:
    raise ValueError(f"floor_log needs n >= 1, got {n}")
  return len(digits(n, base)) - 1


@dataclass(frozen=True)
class DigitSumBounds:
  """
  Bounds on Σ i·a_i·d^i for the d-ary expansion of a.

  The chain log_lower < m_lower < weighted_sum <= upper always holds.
  """
  a: int
  d: int
  m: int
  log_lower: float
  m_lower: Fraction
  weighted_sum: int
  upper: int

  def holds(self) -> bool:
    return self.log_lower < self.m_lower < self.weighted_sum <= self.upper


def digit_sum_bounds(a: int, d: int) -> DigitSumBounds:
  """Evaluate both sides of the rounding-digits inequality for one a."""
  ds = digits(a, d)
  m = len(ds) - 1
  weighted = sum(i * ai * d ** i for i, ai in enumerate(ds))
  return DigitSumBounds(
    a=a,
    d=d,
    m=m,
    log_lower=(math.log(a, d) - (2 * d - 1) / (d - 1)) * a,
    m_lower=(m - Fraction(d, d - 1)) * a,
    weighted_sum=weighted,
    upper=m * a,
  )


# ---------------------------------------------------------------------------
# Binomialary representations
# ---------------------------------------------------------------------------

def binomialary_bounds(r: int, k: int, shifted: bool = True) -> list[int]:
  """
  Coefficient bounds of a binomialary representation.

  Base form: positions 0..k-1 with a_i <= C(k, i+1).
  Shifted form (multiples of r-1): positions 0..k with a_i <= C(k, i).
  """
  if shifted:
    return [math.comb(k, i) for i in range(k + 1)]
  return [math.comb(k, i + 1) for i in range(k)]


def binomialary_increment(coeffs: Sequence[int], bounds: Sequence[int], r: int) -> list[int]:
  """
  One step of the carry rule: t -> t + 1.

  The smallest index i with a_i below its bound gets +1 and every lower
  index is reset to bound - (r - 2).

  Raises:
    PreconditionError: If every coefficient is already at its bound.
  """
  out = list(coeffs)
  for i, (a, b) in enumerate(zip(out, bounds)):
    if a < b:
      out[i] = a + 1
      for j in range(i):
        out[j] = bounds[j] - (r - 2)
      return out
  raise PreconditionError("representation is already maximal; cannot increment")


def binomialary_value(coeffs: Sequence[int], r: int) -> int:
  return sum(a * (r - 1) ** i for i, a in enumerate(coeffs))


def _base_max(r: int, k: int) -> int:
  return (r ** k - 1) // (r - 1)


def _greedy(target: int, bounds: Sequence[int], r: int) -> list[int]:
  # largest representable value using positions below i
  below = [0]
  for i, b in enumerate(bounds):
    below.append(below[-1] + b * (r - 1) ** i)

  out = [0] * len(bounds)
  rest = target
  for i in range(len(bounds) - 1, -1, -1):
    w = (r - 1) ** i
    need = max(0, -(-(rest - below[i]) // w))
    out[i] = need
    rest -= need * w
  if rest != 0:
    raise PreconditionError(f"{target} has no binomialary representation")
  return out


def binomialary_representation(
  r: int,
  k: int,
  target: int,
  shifted: bool = True,
  method: str = "greedy",
) -> list[int]:
  """
  Write ``target`` as Σ a_i (r-1)^i with each a_i within its binomial bound.

  Args:
    r (int): Coin parameter; the bias is 1/r and the weights are powers of r-1.
    k (int): Number of flips, fixing the bounds C(k, ·).
    target (int): Value to represent. Shifted form: a multiple of r-1 in
      [0, r^k - 1]. Base form: any integer in [0, (r^k - 1)/(r - 1)].
    shifted (bool): Select the shifted form (a_0..a_k, bounds C(k, i)).
    method (str): "increment" walks the carry rule from zero (cost linear in
      the target); "greedy" fills positions from the top, each time taking
      the least coefficient the lower positions can still complete.

  Returns:
    list[int]: Coefficients a_0, a_1, ... (least significant first).

  Raises:
    PreconditionError: If the target is outside the representable range.
  """
  if r < 2 or k < 1:
    raise PreconditionError(f"need r >= 2 and k >= 1, got r={r}, k={k}")
  if method not in ("greedy", "increment"):
    raise ValueError(f"unknown method {method!r}")

  if shifted:
    if target < 0 or target > r ** k - 1 or target % (r - 1):
      raise PreconditionError(f"{target} is not a multiple of {r - 1} in [0, {r ** k - 1}]")
    inner = binomialary_representation(r, k, target // (r - 1), shifted=False, method=method)
    return [0] + inner

  if not 0 <= target <= _base_max(r, k):
    raise PreconditionError(f"{target} outside [0, {_base_max(r, k)}]")

  bounds = binomialary_bounds(r, k, shifted=False)
  if method == "greedy":
    return _greedy(target, bounds, r)

  coeffs = [0] * k
  for _ in range(target):
    coeffs = binomialary_increment(coeffs, bounds, r)
  return coeffs


# ---------------------------------------------------------------------------
# Dirichlet-style choice of k
# ---------------------------------------------------------------------------

def coin_output_length(r: int, k: int) -> int:
  """m = floor(k log_{r-1} r), exactly: the largest m with (r-1)^m <= r^k."""
  return floor_log(r ** k, r - 1)


def fractional_part_below_inverse(r: int, k: int) -> bool:
  """
  Decide frac(k log_{r-1} r) < 1/k exactly.

  With m = floor(k u), u = log_{r-1} r, the condition k u - m < 1/k is
  k^2 u < k m + 1, i.e. r^(k^2) < (r-1)^(k m + 1): an integer comparison,
  so no rounding can flip the answer.
  """
  m = coin_output_length(r, k)
  return r ** (k * k) < (r - 1) ** (k * m + 1)


def find_dirichlet_k(r: int, k_min: int, k_max: int) -> Optional[int]:
  """
  Smallest k in [k_min, k_max] with frac(k log_{r-1} r) < 1/k.

  A k also has to give m = floor(k log_{r-1} r) > k, otherwise the coin
  protocol emits nothing (r = 3, k = 1 passes the fractional test alone).

  Returns:
    Optional[int]: The qualifying k, or None when the range holds none.
  """
  if r < 3:
    raise PreconditionError(f"r must be >= 3, got {r}")
  if k_min < max(1, r - 2):
    raise PreconditionError(f"k_min must be >= max(1, r-2) = {max(1, r - 2)}, got {k_min}")

  for k in range(k_min, k_max + 1):
    if coin_output_length(r, k) > k and fractional_part_below_inverse(r, k):
      logger.debug(f"find_dirichlet_k(r={r}) -> {k}")
      return k
  logger.info(f"No qualifying k for r={r} in [{k_min}, {k_max}].")
  return None


# ---------------------------------------------------------------------------
# Type classes and multinomial ranking
# ---------------------------------------------------------------------------

def multinomial(sigma: Sequence[int]) -> int:
  """t_σ = (Σσ)! / Π σ_i!"""
  out, n = 1, 0
  for c in sigma:
    n += c
    out *= math.comb(n, c)
  return out


def symbol_counts(w: Sequence[int], size: Optional[int] = None) -> tuple[int, ...]:
  size = size if size is not None else (max(w) + 1 if w else 1)
  counts = [0] * size
  for s in w:
    counts[s] += 1
  return tuple(counts)


def multinomial_rank(w: Sequence[int], size: Optional[int] = None) -> tuple[tuple[int, ...], int]:
  """
  Lexicographic rank of w among all words with the same symbol counts.

  Returns:
    tuple: (sigma, rank) with 0 <= rank < t_σ.
  """
  counts = list(symbol_counts(w, size))
  sigma = tuple(counts)
  remaining = len(w)
  perms = multinomial(counts)
  rank = 0
  for s in w:
    # perms counts arrangements of the remaining multiset; placing symbol b
    # first leaves perms * counts[b] / remaining of them
    for b in range(s):
      if counts[b]:
        rank += perms * counts[b] // remaining
    perms = perms * counts[s] // remaining
    counts[s] -= 1
    remaining -= 1
  return sigma, rank


def multinomial_unrank(sigma: Sequence[int], rank: int) -> Word:
  """Inverse of :func:`multinomial_rank`."""
  counts = list(sigma)
  remaining = sum(counts)
  perms = multinomial(counts)
  if not 0 <= rank < perms:
    raise ValueError(f"rank {rank} outside [0, {perms})")
  out = []
  while remaining:
    for b, c in enumerate(counts):
      if not c:
        continue
      block = perms * c // remaining
      if rank < block:
        out.append(b)
        perms = block
        counts[b] -= 1
        remaining -= 1
        break
      rank -= block
  return tuple(out)


@dataclass(frozen=True)
class TypeClass:
  """
  Words of length k sharing the symbol counts σ.

  Attributes:
    sigma (tuple[int, ...]): Count of each symbol.
    t (int): Number of such words, the multinomial coefficient.
    q (Fraction): Probability that a k-word falls in the class, t·Π p_i^σ_i.
  """
  sigma: tuple[int, ...]
  t: int
  q: Fraction

  @property
  def word_prob(self) -> Fraction:
    return self.q / self.t


def compositions(k: int, parts: int) -> Iterator[tuple[int, ...]]:
  """All σ with ``parts`` non-negative entries summing to k, first count descending."""
  if parts == 1:
    yield (k,)
    return
  for first in range(k, -1, -1):
    for rest in compositions(k - first, parts - 1):
      yield (first,) + rest


def type_classes(source: Dist, k: int) -> list[TypeClass]:
  """Every type class of k-words under ``source``; the q values sum to one."""
  out = []
  for sigma in compositions(k, source.size):
    t = multinomial(sigma)
    p = Fraction(1)
    for pi, c in zip(source.probs, sigma):
      p *= pi ** c
    out.append(TypeClass(sigma, t, t * p))
  return out
