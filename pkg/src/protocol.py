from __future__ import annotations

import math
import threading
from collections import deque
from dataclasses import dataclass
from fractions import Fraction
from typing import Callable, Hashable, Iterable, Optional

from alphabet import EMPTY, Alphabet, Dist, Word, entropy, is_prefix
from errors import AlphabetError, StateError
from logger import AppLogger

logger = AppLogger("[Protocol]")

StateId = Hashable
StepFn = Callable[[StateId, int], tuple[StateId, Word]]


class Protocol:
  """
  Deterministic transducer δ: S × Σ → S × Γ*.

  The state space may be generated lazily: ``step_fn`` is only asked about
  states actually reached, and each answer is memoised. Memo writes are
  guarded by a lock, so a protocol can be shared by threads running
  independent samplers.
  """

  def __init__(
    self,
    start: StateId,
    step_fn: StepFn,
    input_alphabet: Alphabet,
    output_alphabet: Alphabet,
    name: str = "protocol",
    memoize: bool = True,
  ):
    self.start = start
    self.input_alphabet = input_alphabet
    self.output_alphabet = output_alphabet
    self.name = name
    self._step_fn = step_fn
    self._memoize = memoize
    self._memo: dict[tuple[StateId, int], tuple[StateId, Word]] = {}
    self._lock = threading.Lock()

  def __repr__(self) -> str:
    return f"Protocol({self.name}, |Σ|={self.input_alphabet.size}, |Γ|={self.output_alphabet.size})"

  def step(self, state: StateId, symbol: int) -> tuple[StateId, Word]:
    key = (state, symbol)
    hit = self._memo.get(key)
    if hit is not None:
      return hit

    if not 0 <= symbol < self.input_alphabet.size:
      raise AlphabetError(f"symbol {symbol} outside input alphabet of {self.name}")
    result = self._step_fn(state, symbol)
    if self._memoize:
      with self._lock:
        result = self._memo.setdefault(key, result)
    return result

  @property
  def memo_size(self) -> int:
    return len(self._memo)


def identity(alphabet: Alphabet) -> Protocol:
  """One-state protocol echoing every input symbol."""
  return Protocol(0, lambda s, a: _echo(s, a), alphabet, alphabet, name="identity")


def _echo(state: StateId, symbol: int) -> tuple[StateId, Word]:
  if state != 0:
    raise StateError(f"identity protocol has a single state 0, got {state!r}")
  return 0, (symbol,)


def step_word(p: Protocol, s: StateId, x: Iterable[int]) -> tuple[StateId, Word]:
  """Coinductive extension of δ to words: run x symbol by symbol, concatenating outputs."""
  out: list[int] = []
  for a in x:
    s, z = p.step(s, a)
    out.extend(z)
  return s, tuple(out)


def run_stream(p: Protocol, src, n_inputs: int) -> Word:
  """
  Feed ``n_inputs`` symbols drawn from ``src`` to ``p`` from its start state.

  Args:
    p (Protocol): The protocol to run.
    src (ExactSampler): Symbol source over ``p``'s input alphabet.
    n_inputs (int): Number of input symbols to consume.

  Returns:
    Word: The concatenated output.
  """
  if src.dist.size != p.input_alphabet.size:
    raise AlphabetError(
      f"sampler alphabet size {src.dist.size} != input alphabet size {p.input_alphabet.size} of {p.name}"
    )
  state, out = p.start, []
  for _ in range(n_inputs):
    state, z = p.step(state, src.draw())
    out.extend(z)
  return tuple(out)


@dataclass(frozen=True)
class PrefixSearch:
  """
  Result of :func:`prefix_code_of`.

  Attributes:
    words (tuple[Word, ...]): Minimal input words whose output extends y.
    frontier (tuple[Word, ...]): Undecided input words cut off by the depth cap.
    complete (bool): True when no frontier remains.
  """
  words: tuple[Word, ...]
  frontier: tuple[Word, ...]

  @property
  def complete(self) -> bool:
    return not self.frontier

  def mass(self, mu: Dist) -> Fraction:
    return sum((mu.word_prob(x) for x in self.words), Fraction(0))

  def residual_mass(self, mu: Dist) -> Fraction:
    return sum((mu.word_prob(x) for x in self.frontier), Fraction(0))


def prefix_code_of(p: Protocol, s: StateId, y: Iterable[int], depth_cap: int) -> PrefixSearch:
  """
  Minimal input words x (|x| <= depth_cap) with y a prefix of δ(s, x).

  Words whose output is still a proper prefix of y when the cap is reached
  are returned as the frontier; their mass is the part of ν(y) the search
  could not account for.
  """
  y = tuple(y)
  if not y:
    return PrefixSearch((EMPTY,), ())

  found: list[Word] = []
  frontier: list[Word] = []
  queue = deque([(EMPTY, s, EMPTY)])
  while queue:
    x, state, out = queue.popleft()
    for a in range(p.input_alphabet.size):
      nxt, z = p.step(state, a)
      xa, emitted = x + (a,), out + z
      if is_prefix(y, emitted):
        found.append(xa)
      elif is_prefix(emitted, y):
        if len(xa) < depth_cap:
          queue.append((xa, nxt, emitted))
        else:
          frontier.append(xa)

  if frontier:
    logger.debug(f"prefix_code_of({y}) cut at depth {depth_cap} with {len(frontier)} open words.")
  return PrefixSearch(tuple(found), tuple(frontier))


def reachable_states(p: Protocol, cap: int = 100_000) -> list[StateId]:
  """
  Breadth-first list of states reachable from the start state.

  Raises:
    StateError: If more than ``cap`` states are found (lazy, unbounded protocols).
  """
  seen = {p.start}
  order = [p.start]
  queue = deque([p.start])
  while queue:
    state = queue.popleft()
    for a in range(p.input_alphabet.size):
      nxt, _ = p.step(state, a)
      if nxt not in seen:
        if len(seen) >= cap:
          raise StateError(f"{p.name} has more than {cap} reachable states")
        seen.add(nxt)
        order.append(nxt)
        queue.append(nxt)
  return order


def absolute_bound(mu: Dist, nu: Dist, entropy_units: bool = False) -> float:
  """
  Absolute bound on output per input symbol: log(min μ) / log(max ν).

  Any output word y emitted on input x satisfies ν(y) >= μ(x), which yields
  |y| <= |x| · log(min μ) / log(max ν). With ``entropy_units`` the bound is
  rescaled by H(ν)/H(μ), giving the constant R that bounds E_n.
  """
  if nu.max_prob == 1:
    raise ValueError("output distribution is a point mass; no finite bound")
  ratio = math.log(mu.min_prob) / math.log(nu.max_prob)
  if not entropy_units:
    return ratio
  h_mu = entropy(mu)
  if h_mu == 0:
    raise ValueError("input distribution has zero entropy")
  return ratio * entropy(nu) / h_mu


def output_length_bound(mu: Dist, nu: Dist, x: Optional[Iterable[int]] = None, length: Optional[int] = None) -> float:
  """|x| · log(min μ) / log(max ν) for a word or a length."""
  n = len(tuple(x)) if x is not None else length
  return n * absolute_bound(mu, nu)
