"""
Constructors for the finite restart reductions.

* uniform_to_uniform   -- d-uniform -> c-uniform, fixed k-symbol blocks
* uniform_to_rational  -- d-uniform -> rational target with denominator d
* arbitrary_to_uniform -- any source -> c-uniform via type classes
* biased_to_uniform    -- (1/r, (r-1)/r) coin -> (r-1)-uniform

The lazy uniform -> arbitrary construction lives in ``residual.py``.
"""
from __future__ import annotations

import itertools
import math
from fractions import Fraction
from typing import Sequence

from alphabet import EMPTY, Alphabet, Dist, Word, entropy, int_to_word, word_to_int
from errors import PreconditionError
from expansions import (
  binomialary_representation,
  coin_output_length,
  compositions,
  digits,
  multinomial,
  multinomial_rank,
  type_classes,
)
from logger import AppLogger
from prefix_codes import CanonicalCode, assign_requests
from restart import BlockSpec, ExplicitSpec, OutcomeClass

logger = AppLogger("[Reductions]")

COIN_GLYPHS = "ht"


# ---------------------------------------------------------------------------
# Shared uniform outcome table
# ---------------------------------------------------------------------------

def uniform_table_output(n: int, c: int, index: int) -> Word:
  """
  Output assigned to outcome ``index`` of n equally likely outcomes.

  With n = Σ a_i c^i, outcomes are taken in order: the first a_m·c^m map to
  length-m words, then a_{m-1}·c^(m-1) to length m-1, and so on; inside a
  block the c^i words of that length are cycled in lexicographic order, so
  each appears exactly a_i times. The last a_0 outcomes emit nothing.
  """
  if not 0 <= index < n:
    raise ValueError(f"outcome {index} outside [0, {n})")
  ds = digits(n, c)
  for i in range(len(ds) - 1, -1, -1):
    size = ds[i] * c ** i
    if index < size:
      return int_to_word(index % c ** i, c, i) if i else EMPTY
    index -= size
  raise AssertionError("unreachable: blocks cover all outcomes")


def uniform_table_classes(n: int, c: int, in_len: int, prob: Fraction, multiplicity: int = 1) -> list[OutcomeClass]:
  """Accounting of :func:`uniform_table_output` for ``multiplicity`` tables."""
  return [
    OutcomeClass(multiplicity * a * c ** i, in_len, i, prob)
    for i, a in enumerate(digits(n, c))
    if a
  ]


# ---------------------------------------------------------------------------
# uniform -> uniform
# ---------------------------------------------------------------------------

def uniform_to_uniform(d: int, c: int, k: int) -> BlockSpec:
  """
  Read k d-ary digits and emit a c-ary word per the uniform outcome table.

  With d^k = Σ a_i c^i, an iteration emits a length-i word with probability
  a_i c^i d^(-k); every length-i word is equally likely.
  """
  if d < 2 or c < 2:
    raise PreconditionError(f"need d, c >= 2, got d={d}, c={c}")
  if k < 1:
    raise PreconditionError(f"need k >= 1, got {k}")

  n = d ** k
  classes = uniform_table_classes(n, c, k, Fraction(1, n))

  def output(x: Word) -> Word:
    return uniform_table_output(n, c, word_to_int(x, d))

  return BlockSpec(Dist.uniform(d), Dist.uniform(c), k, output, classes,
                   name=f"uniform_uniform(d={d},c={c},k={k})")


# ---------------------------------------------------------------------------
# uniform -> rational
# ---------------------------------------------------------------------------

def _check_numerators(d: int, numerators: Sequence[int]) -> None:
  if d < 2:
    raise PreconditionError(f"need d >= 2, got {d}")
  if len(numerators) < 2:
    raise PreconditionError("target alphabet needs at least two symbols")
  if any(a < 1 for a in numerators):
    raise PreconditionError(f"numerators must be >= 1, got {list(numerators)}")
  if sum(numerators) != d:
    raise PreconditionError(f"numerators sum to {sum(numerators)}, not d = {d}")


def uniform_to_rational(d: int, numerators: Sequence[int], k: int) -> ExplicitSpec:
  """
  d-uniform input to a target with probabilities a_i / d, k symbols per iteration.

  Each k-word y has a_y = Π a_{y_i}; its d-ary expansion Σ_j a_{yj} d^j asks
  for a_{yj} codewords of length k - j, all mapped to y. The Kraft sum is
  exactly one, so the canonical code is exhaustive.
  """
  _check_numerators(d, numerators)
  if k < 1:
    raise PreconditionError(f"need k >= 1, got {k}")

  c = len(numerators)
  mu = Dist.uniform(d)
  nu = Dist(Alphabet(c), tuple(Fraction(a, d) for a in numerators))

  # Classes by type: a_y only depends on how often each symbol occurs in y.
  classes = []
  for sigma in compositions(k, c):
    a_y = math.prod(a ** s for a, s in zip(numerators, sigma))
    t = multinomial(sigma)
    for j, a_yj in enumerate(digits(a_y, d)):
      if a_yj:
        classes.append(OutcomeClass(t * a_yj, k - j, k, Fraction(1, d ** (k - j))))

  def table() -> dict[Word, Word]:
    requests = []
    for y in itertools.product(range(c), repeat=k):
      a_y = math.prod(numerators[s] for s in y)
      ds = digits(a_y, d)
      for j in range(len(ds) - 1, -1, -1):
        requests.extend([(y, k - j)] * ds[j])
    return {code: y for y, code in assign_requests(requests, d)}

  return ExplicitSpec(mu, nu, name=f"uniform_rational(d={d},a={list(numerators)},k={k})",
                      table_factory=table, classes=classes)


# ---------------------------------------------------------------------------
# arbitrary -> uniform
# ---------------------------------------------------------------------------

def arbitrary_to_uniform(source: Dist, c: int, k: int, inner_depth: int = 1) -> BlockSpec:
  """
  Any source to c-uniform output through type classes.

  The protocol reads ``inner_depth`` blocks of k symbols. Given the type of
  each block, its lexicographic rank is uniform on [0, t_σ); the ranks are
  combined in mixed radix into one uniform outcome over Π t_σ, which the
  uniform outcome table turns into c-ary output. Blocks whose types all have
  t_σ = 1 emit nothing.
  """
  if c < 2:
    raise PreconditionError(f"need c >= 2, got {c}")
  if k < 1 or inner_depth < 1:
    raise PreconditionError(f"need k, inner_depth >= 1, got k={k}, inner_depth={inner_depth}")
  if not source.strict:
    raise PreconditionError("source distribution must have full support")

  d = source.size
  classes = []
  tcs = type_classes(source, k)
  for combo in itertools.product(tcs, repeat=inner_depth):
    n = math.prod(tc.t for tc in combo)
    prob = math.prod((tc.word_prob for tc in combo), start=Fraction(1))
    classes.extend(uniform_table_classes(n, c, k * inner_depth, prob))

  def output(x: Word) -> Word:
    n, index = 1, 0
    for b in range(inner_depth):
      sigma, rank = multinomial_rank(x[b * k:(b + 1) * k], d)
      t = multinomial(sigma)
      n, index = n * t, index * t + rank
    return uniform_table_output(n, c, index)

  suffix = f",inner={inner_depth}" if inner_depth != 1 else ""
  return BlockSpec(source, Dist.uniform(c), k * inner_depth, output, classes,
                   name=f"arbitrary_uniform(c={c},k={k}{suffix})")


def source_information_bound(source: Dist, c: int) -> float:
  """H(source) / log c: best achievable output symbols per input symbol."""
  return entropy(source) / math.log2(c)


# ---------------------------------------------------------------------------
# biased coin -> uniform
# ---------------------------------------------------------------------------

def coin(r: int) -> Dist:
  """Coin with P(h) = 1/r and P(t) = (r-1)/r; symbol 0 is h, symbol 1 is t."""
  return Dist(Alphabet(2, COIN_GLYPHS), (Fraction(1, r), Fraction(r - 1, r)))


def biased_to_uniform(r: int, k: int) -> BlockSpec:
  """
  k flips of a 1/r coin to (r-1)-uniform output.

  With m = floor(k log_{r-1} r) and (r-1)^m = Σ a_i (r-1)^i, 0 <= a_i <= C(k, i),
  an exhaustive (r-1)-ary code with a_i words of length m - i exists. The
  a_i lexicographically first flip sequences with exactly i tails (each of
  probability (r-1)^i / r^k) receive those codewords; every other sequence
  emits nothing.
  """
  if r < 3:
    raise PreconditionError(f"need r >= 3, got {r}")
  if k < max(1, r - 2):
    raise PreconditionError(f"need k >= r - 2 = {r - 2} (and k >= 1), got {k}")

  m = coin_output_length(r, k)
  a = binomialary_representation(r, k, (r - 1) ** m, shifted=True)
  for i, ai in enumerate(a):
    if ai > math.comb(k, i):
      raise AssertionError(f"a_{i} = {ai} exceeds C({k},{i})")

  code = CanonicalCode({m - i: ai for i, ai in enumerate(a) if ai}, r - 1)
  if code.kraft != 1:
    raise AssertionError(f"target code Kraft sum {code.kraft} != 1")
  logger.debug(f"biased_to_uniform(r={r}, k={k}): m={m}, a={a}")

  classes = []
  for i in range(k + 1):
    prob = Fraction((r - 1) ** i, r ** k)
    if a[i]:
      classes.append(OutcomeClass(a[i], k, m - i, prob))
    if math.comb(k, i) - a[i]:
      classes.append(OutcomeClass(math.comb(k, i) - a[i], k, 0, prob))

  def output(x: Word) -> Word:
    _, rank = multinomial_rank(x, 2)
    tails = sum(x)
    if rank < a[tails]:
      return code.codeword(m - tails, rank)
    return EMPTY

  return BlockSpec(coin(r), Dist.uniform(r - 1), k, output, classes,
                   name=f"biased_uniform(r={r},k={k})")


def coin_information_bound(r: int) -> float:
  """log_{r-1} r - (r-1)/r: the source/target entropy ratio of the coin reduction."""
  return math.log(r, r - 1) - (r - 1) / r
