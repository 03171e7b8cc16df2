from __future__ import annotations

from collections import Counter
from dataclasses import dataclass
from fractions import Fraction
from typing import Iterable, Optional, Sequence

from alphabet import Dist, Word, int_to_word, is_prefix
from errors import InfeasibleCodeError, PrefixCodeError
from logger import AppLogger

logger = AppLogger("[PrefixCodes]")


def kraft_sum(lengths: Iterable[int], d: int) -> Fraction:
  """Exact Kraft sum Σ d^(-ℓ) over a multiset of lengths."""
  if d < 2:
    raise ValueError(f"alphabet size must be >= 2, got {d}")
  return sum((Fraction(1, d ** ell) for ell in lengths), Fraction(0))


def find_prefix_violation(words: Iterable[Word]) -> Optional[tuple[Word, Word]]:
  """
  Return a pair (u, w) with u a prefix of w, or None if the set is prefix-free.

  After lexicographic sorting a word can only be a prefix of its successor,
  so one pass over neighbours suffices.
  """
  ordered = sorted(set(words))
  for u, w in zip(ordered, ordered[1:]):
    if is_prefix(u, w):
      return u, w
  return None


@dataclass(frozen=True)
class PrefixCode:
  """A finite prefix-free set of words over a d-ary alphabet."""
  words: tuple[Word, ...]
  d: int

  def __post_init__(self):
    violation = find_prefix_violation(self.words)
    if violation is not None:
      u, w = violation
      raise PrefixCodeError(f"codeword {u} is a prefix of {w}")
    if len(set(self.words)) != len(self.words):
      raise PrefixCodeError("duplicate codeword")

  def __len__(self) -> int:
    return len(self.words)

  def __iter__(self):
    return iter(self.words)

  def __contains__(self, word) -> bool:
    return tuple(word) in set(self.words)

  @property
  def lengths(self) -> list[int]:
    return [len(w) for w in self.words]

  def kraft(self) -> Fraction:
    return kraft_sum(self.lengths, self.d)

  def mass(self, mu: Dist) -> Fraction:
    return sum((mu.word_prob(w) for w in self.words), Fraction(0))

  def is_exhaustive(self, mu: Dist) -> bool:
    return self.mass(mu) == 1


class CanonicalCode:
  """
  Canonical prefix code described by its codeword count per length.

  Codewords are numbered in ascending length; within one length they are
  consecutive d-ary integers. The first codeword of each length is the
  lexicographically smallest word not prefix-comparable to any earlier one,
  so ``codeword(length, i)`` never needs the full list.
  """

  def __init__(self, counts: dict[int, int], d: int):
    if d < 2:
      raise ValueError(f"alphabet size must be >= 2, got {d}")
    self.d = d
    self.counts = {ell: n for ell, n in sorted(counts.items()) if n > 0}

    total = sum((Fraction(n, d ** ell) for ell, n in self.counts.items()), Fraction(0))
    if total > 1:
      raise InfeasibleCodeError(f"Kraft sum {total} > 1 for lengths {self.counts}")
    self.kraft = total

    self.first: dict[int, int] = {}
    value, prev_len, prev_count = 0, None, 0
    for ell, n in self.counts.items():
      if prev_len is not None:
        value = (value + prev_count) * d ** (ell - prev_len)
      self.first[ell] = value
      prev_len, prev_count = ell, n

  def codeword(self, length: int, index: int) -> Word:
    if not 0 <= index < self.counts.get(length, 0):
      raise IndexError(f"no codeword #{index} of length {length}")
    return int_to_word(self.first[length] + index, self.d, length)

  def words(self) -> list[Word]:
    return [self.codeword(ell, i) for ell, n in self.counts.items() for i in range(n)]


def assign_codewords(lengths: Sequence[int], d: int) -> PrefixCode:
  """
  Assign a canonical prefix-free code with exactly the requested lengths.

  Lengths are served in ascending order and each codeword is the
  lexicographically smallest word of its length that is not prefix-comparable
  to a codeword already chosen. The returned words are in that order.

  Raises:
    InfeasibleCodeError: If the Kraft sum of ``lengths`` exceeds one.
  """
  logger.debug(f"Assigning {len(lengths)} codewords over a {d}-ary alphabet.")
  code = CanonicalCode(Counter(lengths), d)
  return PrefixCode(tuple(code.words()), d)


def assign_requests(requests: Sequence[tuple[object, int]], d: int) -> list[tuple[object, Word]]:
  """
  Assign canonical codewords to labelled length requests.

  Requests are sorted stably by length, so equal lengths keep the caller's
  order; the result pairs every label with its codeword.
  """
  code = CanonicalCode(Counter(ell for _, ell in requests), d)
  used: Counter = Counter()
  out = []
  for label, ell in sorted(requests, key=lambda r: r[1]):
    out.append((label, code.codeword(ell, used[ell])))
    used[ell] += 1
  return out
