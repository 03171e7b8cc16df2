from __future__ import annotations

import math
import threading
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Optional, Sequence

from alphabet import EMPTY, Alphabet, Dist, Word, entropy, int_to_word
from errors import PreconditionError, StateError
from expansions import digits
from logger import AppLogger
from prefix_codes import assign_requests
from protocol import Protocol

logger = AppLogger("[Residual]")

ResidualKey = tuple[Fraction, ...]


@dataclass(frozen=True)
class ResidualState:
  """
  A distribution {p_y} on k-symbol output words and its d-adic rounding.

  Attributes:
    dist (tuple[Fraction, ...]): p_y for every y in Γ^k, lexicographic.
    d (int): Input alphabet size.
    k (int): Output symbols per emission.
    a (tuple[int, ...]): a_y = floor(p_y d^k).
    r (int): Residual count, r d^(-k) = 1 - Σ a_y d^(-k).
  """
  dist: tuple[Fraction, ...]
  d: int
  k: int
  a: tuple[int, ...] = field(init=False)
  r: int = field(init=False)

  def __post_init__(self):
    scale = self.d ** self.k
    a = tuple(math.floor(p * scale) for p in self.dist)
    object.__setattr__(self, "a", a)
    object.__setattr__(self, "r", scale - sum(a))

  @property
  def rho(self) -> Fraction:
    """Probability r d^(-k) of falling into the residual block."""
    return Fraction(self.r, self.d ** self.k)

  def q(self, y: int) -> Fraction:
    return Fraction(self.a[y], self.d ** self.k)

  def residual(self) -> Optional[tuple[Fraction, ...]]:
    """p'_y = (p_y - q_y) / (r d^(-k)), or None when the rounding is exact."""
    if self.r == 0:
      return None
    rho = self.rho
    return tuple((p - self.q(y)) / rho for y, p in enumerate(self.dist))

  def check(self, c: int) -> None:
    """Rounding invariants: 0 <= p_y - q_y < d^(-k) and r d^(-k) < (c/d)^k."""
    unit = Fraction(1, self.d ** self.k)
    for y, p in enumerate(self.dist):
      if not 0 <= p - self.q(y) < unit:
        raise AssertionError(f"rounding of p_{y} = {p} outside [0, d^-k)")
    if not self.rho < Fraction(c, self.d) ** self.k:
      raise AssertionError(f"residual mass {self.rho} not below (c/d)^k")


@dataclass
class Stage:
  """
  One stage of the uniform -> arbitrary protocol, built for a residual state.

  ``table`` maps each codeword to ("emit", y) or ("descend", None); prefixes
  holds every proper prefix of a codeword.
  """
  state: ResidualState
  table: dict[Word, tuple[str, Optional[int]]]
  prefixes: set[Word]
  child: Optional[ResidualKey]

  @property
  def expected_consumption(self) -> Fraction:
    d = self.state.d
    return sum((Fraction(len(x), d ** len(x)) for x in self.table), Fraction(0))

  @property
  def max_codeword_length(self) -> int:
    return max(len(x) for x in self.table)

  def emission_probs(self) -> tuple[Fraction, ...]:
    return tuple(self.state.q(y) for y in range(len(self.state.dist)))


def build_stage(state: ResidualState) -> Stage:
  """
  Codewords for one stage: a_{yj} of length k - j for every y (d-ary
  expansion of a_y), then the residual block from the expansion of r.
  """
  d, k = state.d, state.k
  requests: list[tuple[tuple[str, Optional[int]], int]] = []
  for y, a_y in enumerate(state.a):
    ds = digits(a_y, d)
    for j in range(len(ds) - 1, -1, -1):
      requests.extend([(("emit", y), k - j)] * ds[j])
  rs = digits(state.r, d)
  for j in range(len(rs) - 1, -1, -1):
    requests.extend([(("descend", None), k - j)] * rs[j])

  table = {code: label for label, code in assign_requests(requests, d)}
  prefixes = {x[:i] for x in table for i in range(len(x))}
  return Stage(state, table, prefixes, state.residual())


class ResidualProtocol(Protocol):
  """
  Lazily generated uniform -> arbitrary protocol.

  States are (residual key, prefix) pairs. Stages are built on first visit
  and memoised by the exact residual distribution, so targets whose
  residuals cycle yield a finite protocol.
  """

  def __init__(self, d: int, target: Dist, k: int):
    self.d = d
    self.k = k
    self.target = target
    self.c = target.size
    self.root: ResidualKey = target.product(k)
    self._stages: dict[ResidualKey, Stage] = {}
    self._stage_lock = threading.Lock()
    super().__init__((self.root, EMPTY), self._step, Alphabet(d), target.alphabet,
                     name=f"uniform_arbitrary(d={d},k={k})")

  @property
  def stage_count(self) -> int:
    return len(self._stages)

  def stage(self, key: ResidualKey) -> Stage:
    found = self._stages.get(key)
    if found is not None:
      return found
    built = build_stage(ResidualState(key, self.d, self.k))
    built.state.check(self.c)
    with self._stage_lock:
      found = self._stages.setdefault(key, built)
    logger.debug(f"{self.name}: stage #{len(self._stages)} (r={built.state.r}).")
    return found

  def output_word(self, y: int) -> Word:
    return int_to_word(y, self.c, self.k)

  def _step(self, state, a: int):
    try:
      key, u = state
      stage = self.stage(key)
    except (TypeError, ValueError):
      raise StateError(f"invalid state {state!r} for {self.name}")

    w = u + (a,)
    label = stage.table.get(w)
    if label is None:
      if w in stage.prefixes:
        return (key, w), EMPTY
      raise StateError(f"{u} is not a state of stage {key}")
    kind, y = label
    if kind == "emit":
      return (self.root, EMPTY), self.output_word(y)
    return (stage.child, EMPTY), EMPTY


def uniform_to_arbitrary(d: int, target: Dist, k: int) -> ResidualProtocol:
  """
  d-uniform input to an arbitrary exact-rational target, k symbols per emission.

  Raises:
    PreconditionError: If d <= 1/min p*, k < 1, or the target has fewer
      than two symbols or zero-probability symbols.
  """
  if k < 1:
    raise PreconditionError(f"need k >= 1, got {k}")
  if target.size < 2 or not target.strict:
    raise PreconditionError("target needs at least two symbols, all with positive probability")
  if d * target.min_prob <= 1:
    raise PreconditionError(f"need d > 1/min p* = {1 / target.min_prob}, got d = {d}")
  logger.info(f"Building lazy uniform_arbitrary protocol (d={d}, k={k}).")
  protocol = ResidualProtocol(d, target, k)
  protocol.stage(protocol.root)
  return protocol


# ---------------------------------------------------------------------------
# Chains of residual stages
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class StageChain:
  """
  Stages visited by successive residual descents from the root.

  Attributes:
    stages (list[Stage]): s_0 (root), s_1, ... in descent order.
    cycle_start (Optional[int]): Index the last stage descends back to.
    truncated (bool): The depth limit was reached before the chain closed.
  """
  stages: list[Stage]
  cycle_start: Optional[int]
  truncated: bool

  @property
  def complete(self) -> bool:
    return not self.truncated

  @property
  def lost_mass(self) -> Fraction:
    """Probability of descending past the explored stages (0 when complete)."""
    if not self.truncated:
      return Fraction(0)
    return math.prod((s.state.rho for s in self.stages), start=Fraction(1))


def stage_chain(protocol: ResidualProtocol, depth: int) -> StageChain:
  """Follow residual descents from the root, exploring at most ``depth`` stages."""
  if depth < 1:
    raise ValueError(f"depth must be >= 1, got {depth}")
  keys: list[ResidualKey] = []
  index: dict[ResidualKey, int] = {}
  key: Optional[ResidualKey] = protocol.root
  while key is not None:
    if key in index:
      return StageChain([protocol.stage(k) for k in keys], index[key], False)
    if len(keys) == depth:
      return StageChain([protocol.stage(k) for k in keys], None, True)
    index[key] = len(keys)
    keys.append(key)
    key = protocol.stage(key).child
  return StageChain([protocol.stage(k) for k in keys], None, False)


def solve_chain(chain: StageChain, values: Sequence[Sequence[Fraction]]) -> list[Fraction]:
  """
  Root value of V(s) = A(s) + ρ(s)·V(child(s)) along a stage chain.

  ``values[i]`` is the vector A(s_i). Cycles are closed with the geometric
  series; a truncated chain drops the unexplored tail.
  """
  n = len(chain.stages)
  rhos = [s.state.rho for s in chain.stages]
  dim = len(values[0])

  def axpy(a: Sequence[Fraction], rho: Fraction, v: Sequence[Fraction]) -> list[Fraction]:
    return [x + rho * y for x, y in zip(a, v)]

  if chain.cycle_start is None:
    v = [Fraction(0)] * dim
    for i in range(n - 1, -1, -1):
      v = axpy(values[i], rhos[i], v)
    return v

  start = chain.cycle_start
  # V(s_start) = Σ_t (Π_{u<t} ρ_u) A(s_t) / (1 - Π ρ) over the cycle
  acc = [Fraction(0)] * dim
  weight = Fraction(1)
  for t in range(start, n):
    acc = axpy(acc, weight, values[t])
    weight *= rhos[t]
  v = [x / (1 - weight) for x in acc]
  for i in range(start - 1, -1, -1):
    v = axpy(values[i], rhos[i], v)
  return v


@dataclass(frozen=True)
class StagedStats:
  """
  Epoch accounting of a uniform -> arbitrary protocol.

  Attributes:
    stage_consumption (list[Fraction]): Expected consumption of each stage.
    rhos (list[Fraction]): Residual probability of each stage.
    stage_bound (int): Longest codeword over the explored stages (m_k).
    epoch_consumption (Fraction): Expected inputs per epoch; a lower bound
      when the chain is truncated.
    complete (bool): The chain closed (cycle or exact rounding).
    lost_mass (Fraction): Probability mass beyond the explored stages.
    k (int): Output symbols per epoch.
    efficiency_bits (float): k·H(target) / (epoch_consumption·log2 d).
  """
  stage_consumption: list[Fraction]
  rhos: list[Fraction]
  stage_bound: int
  epoch_consumption: Fraction
  complete: bool
  lost_mass: Fraction
  k: int
  efficiency_bits: float

  @property
  def latency(self) -> Fraction:
    """Every epoch ends with exactly k symbols, so latency is the epoch consumption."""
    return self.epoch_consumption


def staged_stats(protocol: ResidualProtocol, depth: int = 32) -> StagedStats:
  """Per-stage and per-epoch consumption of a lazy uniform -> arbitrary protocol."""
  chain = stage_chain(protocol, depth)
  consumption = [s.expected_consumption for s in chain.stages]
  epoch = solve_chain(chain, [[e] for e in consumption])[0]
  eff = protocol.k * entropy(protocol.target) / (float(epoch) * math.log2(protocol.d))
  return StagedStats(
    stage_consumption=consumption,
    rhos=[s.state.rho for s in chain.stages],
    stage_bound=max(s.max_codeword_length for s in chain.stages),
    epoch_consumption=epoch,
    complete=chain.complete,
    lost_mass=chain.lost_mass,
    k=protocol.k,
    efficiency_bits=eff,
  )
