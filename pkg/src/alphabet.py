from __future__ import annotations

import itertools
import math
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Iterable, Iterator, Optional, Sequence

from scipy.stats import entropy as _scipy_entropy

from errors import AlphabetError, DistributionError

Symbol = int
Word = tuple[int, ...]

EMPTY: Word = ()

DEFAULT_GLYPHS = "0123456789abcdefghijklmnopqrstuvwxyzABCDEFGHIJKLMNOPQRSTUVWXYZ"


@dataclass(frozen=True)
class Alphabet:
  """
  A finite alphabet {0, ..., size-1} with optional one-character glyphs.

  Glyphs default to digits then letters, so alphabets up to 62 symbols can
  be read from and written to text streams.
  """
  size: int
  glyphs: Optional[str] = None

  def __post_init__(self):
    if self.size < 1:
      raise AlphabetError(f"alphabet size must be >= 1, got {self.size}")
    if self.glyphs is not None:
      if len(self.glyphs) != self.size:
        raise AlphabetError(f"{len(self.glyphs)} glyphs given for an alphabet of size {self.size}")
      if len(set(self.glyphs)) != self.size:
        raise AlphabetError(f"glyph table {self.glyphs!r} repeats a glyph")

  @property
  def glyph_table(self) -> str:
    if self.glyphs is not None:
      return self.glyphs
    if self.size > len(DEFAULT_GLYPHS):
      raise AlphabetError(f"no default glyphs for an alphabet of size {self.size}")
    return DEFAULT_GLYPHS[:self.size]

  def check_word(self, word: Iterable[int]) -> Word:
    w = tuple(word)
    for s in w:
      if not 0 <= s < self.size:
        raise AlphabetError(f"symbol {s} outside alphabet of size {self.size}")
    return w

  def words(self, length: int) -> Iterator[Word]:
    """All words of the given length in lexicographic order."""
    return itertools.product(range(self.size), repeat=length)

  def format(self, word: Iterable[int]) -> str:
    table = self.glyph_table
    return "".join(table[s] for s in word)

  def parse(self, text: str) -> Word:
    """Parse a glyph string; raises ``AlphabetError`` on an unknown glyph."""
    table = self.glyph_table
    out = []
    for ch in text:
      idx = table.find(ch)
      if idx < 0:
        raise AlphabetError(f"unknown glyph {ch!r}")
      out.append(idx)
    return tuple(out)


@dataclass(frozen=True)
class Dist:
  """
  Exact-rational probability distribution over an alphabet.

  Probabilities must be non-negative and sum to exactly one. With
  ``strict=True`` (the default, and what every reduction requires) a zero
  probability is rejected as well.
  """
  alphabet: Alphabet
  probs: tuple[Fraction, ...]
  strict: bool = True
  _cdf: tuple[int, ...] = field(init=False, repr=False, compare=False)

  def __post_init__(self):
    probs = tuple(Fraction(p) for p in self.probs)
    object.__setattr__(self, "probs", probs)

    if len(probs) != self.alphabet.size:
      raise DistributionError(f"{len(probs)} probabilities for an alphabet of size {self.alphabet.size}")
    if any(p < 0 for p in probs):
      raise DistributionError(f"negative probability in {self._show(probs)}")
    if sum(probs) != 1:
      raise DistributionError(f"probabilities sum to {sum(probs)}, not 1: {self._show(probs)}")
    if self.strict and any(p == 0 for p in probs):
      raise DistributionError(f"zero-probability symbol in strict distribution {self._show(probs)}")

    # integer cumulative weights over the common denominator, used by the sampler
    den = self.denominator
    acc, cdf = 0, []
    for p in probs:
      acc += p.numerator * (den // p.denominator)
      cdf.append(acc)
    object.__setattr__(self, "_cdf", tuple(cdf))

  @staticmethod
  def _show(probs: Sequence[Fraction]) -> str:
    return "(" + ", ".join(str(p) for p in probs) + ")"

  @classmethod
  def uniform(cls, size: int, glyphs: Optional[str] = None) -> "Dist":
    return cls(Alphabet(size, glyphs), tuple(Fraction(1, size) for _ in range(size)))

  @classmethod
  def of(cls, probs: Iterable, glyphs: Optional[str] = None, strict: bool = True) -> "Dist":
    """Build from anything ``Fraction`` accepts (ints, Fractions, "1/3" strings)."""
    values = tuple(Fraction(p) for p in probs)
    return cls(Alphabet(len(values), glyphs), values, strict)

  @classmethod
  def from_pairs(cls, pairs: Iterable[Sequence[int]], glyphs: Optional[str] = None,
                 strict: bool = True) -> "Dist":
    """Build from ``[[num, den], ...]`` integer pairs (the spec-file encoding)."""
    return cls.of((Fraction(n, d) for n, d in pairs), glyphs, strict)

  @property
  def size(self) -> int:
    return self.alphabet.size

  @property
  def denominator(self) -> int:
    return math.lcm(*(p.denominator for p in self.probs))

  @property
  def cumulative_weights(self) -> tuple[int, ...]:
    return self._cdf

  @property
  def min_prob(self) -> Fraction:
    return min(self.probs)

  @property
  def max_prob(self) -> Fraction:
    return max(self.probs)

  def prob(self, symbol: Symbol) -> Fraction:
    return self.probs[symbol]

  def word_prob(self, word: Iterable[int]) -> Fraction:
    """Probability that an i.i.d. stream starts with ``word``."""
    out = Fraction(1)
    for s in word:
      out *= self.probs[s]
    return out

  def product(self, k: int) -> tuple[Fraction, ...]:
    """Probabilities of all k-symbol words, lexicographic order."""
    return tuple(self.word_prob(w) for w in self.alphabet.words(k))


def entropy(d: Dist) -> float:
  """Shannon entropy in bits, with 0 log 0 = 0."""
  return float(_scipy_entropy([float(p) for p in d.probs], base=2))


def word_to_int(word: Sequence[int], base: int) -> int:
  """Lexicographic index of a word among all words of its length."""
  value = 0
  for s in word:
    value = value * base + s
  return value


def int_to_word(value: int, base: int, length: int) -> Word:
  """Inverse of :func:`word_to_int`, left-padded to ``length`` symbols."""
  out = [0] * length
  for i in range(length - 1, -1, -1):
    value, out[i] = divmod(value, base)
  if value:
    raise AlphabetError(f"value does not fit in {length} base-{base} symbols")
  return tuple(out)


def is_prefix(u: Sequence[int], w: Sequence[int]) -> bool:
  return len(u) <= len(w) and tuple(w[:len(u)]) == tuple(u)
