from __future__ import annotations

from bisect import bisect_right

import numpy as np

from alphabet import Dist, Word
from logger import AppLogger

logger = AppLogger("[Sampler]")

RAW_BLOCK = 4096


class ExactSampler:
  """
  Bias-free i.i.d. symbol source for an exact-rational distribution.

  Each draw takes fresh 64-bit words from a PCG64 bit generator, keeps the
  lowest ``bits`` bits and rejects values at or above the common
  denominator D, so the accepted integer is exactly uniform on [0, D) and the
  returned symbol has probability exactly p_a. Same seed, same stream.

  Attributes:
    dist (Dist): Distribution being sampled.
    seed (int): 64-bit seed of the bit generator.
    counter (int): Number of symbols drawn so far.
    rejections (int): Number of rejected candidates so far.
  """

  def __init__(self, dist: Dist, seed: int):
    if not 0 <= seed < 2 ** 64:
      raise ValueError(f"seed must be an unsigned 64-bit integer, got {seed}")
    self.dist = dist
    self.seed = seed
    self.counter = 0
    self.rejections = 0

    self._bitgen = np.random.PCG64(seed)
    self._buffer: list[int] = []
    self._den = dist.denominator
    self._cdf = dist.cumulative_weights
    self._bits = max(1, (self._den - 1).bit_length())
    self._words_per_draw = -(-self._bits // 64)
    self._mask = (1 << self._bits) - 1

  def __repr__(self) -> str:
    return f"ExactSampler(size={self.dist.size}, seed={self.seed}, counter={self.counter})"

  def _raw(self) -> int:
    if not self._buffer:
      self._buffer = self._bitgen.random_raw(RAW_BLOCK).tolist()
      self._buffer.reverse()
    return self._buffer.pop()

  def _uniform_below_den(self) -> int:
    while True:
      value = 0
      for _ in range(self._words_per_draw):
        value = (value << 64) | self._raw()
      value &= self._mask
      if value < self._den:
        return value
      self.rejections += 1

  def draw(self) -> int:
    """Draw one symbol."""
    self.counter += 1
    value = 0 if self._den == 1 else self._uniform_below_den()
    return bisect_right(self._cdf, value)

  def draw_word(self, n: int) -> Word:
    return tuple(self.draw() for _ in range(n))

  def __iter__(self):
    return self

  def __next__(self) -> int:
    return self.draw()
