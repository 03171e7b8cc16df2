from __future__ import annotations

import threading
from dataclasses import dataclass
from fractions import Fraction
from typing import Callable, Optional, Sequence, Union

from alphabet import EMPTY
from errors import AlphabetError, PreconditionError, PrefixCodeError, StateError
from logger import AppLogger
from protocol import Protocol, step_word
from restart import EpochStats, RestartSpec, epoch_stats

logger = AppLogger("[Composition]")


def compose(p1: Protocol, p2: Protocol) -> Protocol:
  """
  Sequential composition: p2 consumes whatever p1 emits.

  States are pairs (s, t), created only when reached. One step feeds a
  symbol to p1 and runs p2 over p1's output word; the composite emits p2's
  output.

  Raises:
    AlphabetError: If p1's output alphabet is not p2's input alphabet.
  """
  if p1.output_alphabet.size != p2.input_alphabet.size:
    raise AlphabetError(
      f"cannot compose {p1.name} (|Γ|={p1.output_alphabet.size}) "
      f"with {p2.name} (|Σ|={p2.input_alphabet.size})"
    )

  def step(state, a: int):
    try:
      s, t = state
    except (TypeError, ValueError):
      raise StateError(f"invalid composite state {state!r}")
    s2, u = p1.step(s, a)
    t2, y = step_word(p2, t, u)
    return (s2, t2), y

  return Protocol((p1.start, p2.start), step, p1.input_alphabet, p2.output_alphabet,
                  name=f"({p1.name} ; {p2.name})")


ComponentFactory = Callable[[int], RestartSpec]


class SerialChain:
  """
  A sequence of restart specs run one iteration each, in order.

  Components come from a list (finite chain, the last one repeats forever)
  or from a factory ``i -> spec`` (unbounded chain). Components and their
  epoch statistics are generated on first use and kept.
  """

  def __init__(self, components: Union[Sequence[RestartSpec], ComponentFactory], name: str = "serial"):
    self.name = name
    self._lock = threading.Lock()
    self._specs: dict[int, RestartSpec] = {}
    self._stats: dict[int, EpochStats] = {}
    if callable(components):
      self._factory: Optional[ComponentFactory] = components
      self.length: Optional[int] = None
    else:
      specs = list(components)
      if not specs:
        raise PreconditionError("a serial chain needs at least one component")
      self._factory = None
      self.length = len(specs)
      for i, spec in enumerate(specs):
        if spec.mu != specs[0].mu or spec.nu != specs[0].nu:
          raise AlphabetError(f"component {i} ({spec.name}) does not share μ and ν with component 0")
        spec.validate()
      self._specs = dict(enumerate(specs))

  def __repr__(self) -> str:
    size = "unbounded" if self.length is None else self.length
    return f"SerialChain({self.name}, components={size})"

  @property
  def finite(self) -> bool:
    return self.length is not None

  def _index(self, i: int) -> int:
    if i < 0:
      raise IndexError(f"component index must be >= 0, got {i}")
    return i if self.length is None else min(i, self.length - 1)

  def component(self, i: int) -> RestartSpec:
    i = self._index(i)
    spec = self._specs.get(i)
    if spec is not None:
      return spec
    spec = self._factory(i)
    first = self._specs.get(0) or (spec if i == 0 else self.component(0))
    if spec.mu != first.mu or spec.nu != first.nu:
      raise AlphabetError(f"component {i} ({spec.name}) does not share μ and ν with component 0")
    spec.validate()
    with self._lock:
      return self._specs.setdefault(i, spec)

  def stats(self, i: int) -> EpochStats:
    i = self._index(i)
    found = self._stats.get(i)
    if found is None:
      found = epoch_stats(self.component(i))
      with self._lock:
        found = self._stats.setdefault(i, found)
    return found

  def next_index(self, i: int) -> int:
    return self._index(i + 1)


def build_serial(chain: SerialChain) -> Protocol:
  """
  Serial protocol: one iteration of component k, then component k + 1.

  States are (component index, prefix) pairs. A finite chain stays on its
  last component once reached.

  Raises:
    PreconditionError: If a finite chain is empty.
    AlphabetError: If components disagree on μ or ν.
  """
  if chain.length == 0:
    raise PreconditionError("cannot build a protocol from an empty chain")
  first = chain.component(0)
  logger.info(f"Building serial protocol for {chain.name}.")

  def step(state, a: int):
    try:
      k, u = state
      spec = chain.component(k)
    except (TypeError, ValueError, IndexError):
      raise StateError(f"invalid serial state {state!r}")
    w = u + (a,)
    try:
      out = spec.lookup(w)
    except PrefixCodeError:
      raise StateError(f"{u} is not a state of component {k} ({spec.name})")
    if out is None:
      return (k, w), EMPTY
    return (chain.next_index(k), EMPTY), out

  return Protocol((0, EMPTY), step, first.mu.alphabet, first.nu.alphabet, name=chain.name)


@dataclass(frozen=True)
class TraceRow:
  index: int
  name: str
  c: Fraction
  p: Fraction
  m: int


def serial_epoch_trace(chain: SerialChain, n: int) -> list[TraceRow]:
  """Per-component (c_i, p_i, m_i) for the first n components."""
  rows = []
  for i in range(n):
    st = chain.stats(i)
    rows.append(TraceRow(i, chain.component(i).name, st.c, st.p, st.m))
  return rows


@dataclass(frozen=True)
class SerialEfficiency:
  """
  Partial efficiency of the first n components.

  Attributes:
    n (int): Number of components summed.
    ratio (Fraction): (Σ p_i) / (Σ c_i), output symbols per input symbol.
    bits (float): ratio · H(ν) / H(μ).
  """
  n: int
  ratio: Fraction
  bits: float


def serial_partial_efficiency(chain: SerialChain, n: int) -> SerialEfficiency:
  if n < 1:
    raise ValueError(f"n must be >= 1, got {n}")
  rows = serial_epoch_trace(chain, n)
  ratio = sum((row.p for row in rows), Fraction(0)) / sum((row.c for row in rows), Fraction(0))
  first = chain.stats(0)
  if first.h_mu == 0:
    raise ValueError("input distribution has zero entropy")
  return SerialEfficiency(n, ratio, float(ratio) * first.h_nu / first.h_mu)


def check_growth_condition(chain: SerialChain, n: int) -> list[Fraction]:
  """
  Ratios m_i / Σ_{j<i} c_j for i = 1 .. n-1.

  The serial efficiency equals the limit of the partial ratios when these
  tend to zero. Both sides are symbol counts.
  """
  if n < 2:
    raise ValueError(f"n must be >= 2, got {n}")
  rows = serial_epoch_trace(chain, n)
  ratios = []
  consumed = rows[0].c
  for row in rows[1:]:
    ratios.append(Fraction(row.m) / consumed)
    consumed += row.c
  return ratios


def constant_chain(spec: RestartSpec) -> SerialChain:
  """Chain repeating a single spec; its serial protocol behaves like the restart protocol."""
  return SerialChain([spec], name=f"constant({spec.name})")

