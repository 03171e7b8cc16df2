from __future__ import annotations

from collections import defaultdict
from dataclasses import dataclass
from fractions import Fraction
from typing import Callable, Iterable, Iterator, Mapping, Optional

from alphabet import EMPTY, Dist, Word, entropy
from errors import PrefixCodeError, StateError, UnproductiveError
from logger import AppLogger
from prefix_codes import PrefixCode, find_prefix_violation
from protocol import Protocol

logger = AppLogger("[Restart]")


@dataclass(frozen=True)
class OutcomeClass:
  """
  A group of codewords with identical accounting.

  Attributes:
    count (int): Number of codewords in the group.
    in_len (int): Length of each codeword (input symbols consumed).
    out_len (int): Length of each emitted word.
    prob (Fraction): μ-probability of each single codeword.
  """
  count: int
  in_len: int
  out_len: int
  prob: Fraction

  @property
  def mass(self) -> Fraction:
    return self.count * self.prob


class RestartSpec:
  """
  Exhaustive prefix code A over Σ with an output map f: A -> Γ*.

  Subclasses decide how codewords are looked up; the accounting goes through
  :meth:`outcome_classes`, which lets huge block codes report exact epoch
  statistics without listing their codewords.
  """

  def __init__(self, mu: Dist, nu: Dist, name: str):
    self.mu = mu
    self.nu = nu
    self.name = name

  def __repr__(self) -> str:
    return f"{type(self).__name__}({self.name})"

  def lookup(self, word: Word) -> Optional[Word]:
    """f(word) if word is a codeword, None if it is a proper prefix of one."""
    raise NotImplementedError

  def entries(self) -> Iterator[tuple[Word, Word]]:
    """All (codeword, output) pairs."""
    raise NotImplementedError

  def outcome_classes(self) -> list[OutcomeClass]:
    groups: dict[tuple[int, int, Fraction], int] = defaultdict(int)
    for x, y in self.entries():
      groups[(len(x), len(y), self.mu.word_prob(x))] += 1
    return [OutcomeClass(n, i, o, p) for (i, o, p), n in groups.items()]

  def word_law(self) -> dict[Word, Fraction]:
    """W(w) = Σ_{f(x) = w} μ(x): the law of the word emitted per iteration."""
    law: dict[Word, Fraction] = defaultdict(Fraction)
    for x, y in self.entries():
      law[y] += self.mu.word_prob(x)
    return dict(law)

  def code(self) -> PrefixCode:
    return PrefixCode(tuple(x for x, _ in self.entries()), self.mu.size)

  def validate(self) -> None:
    """
    Raises:
      PrefixCodeError: If the code is not exhaustive (mass != 1).
    """
    mass = sum((c.mass for c in self.outcome_classes()), Fraction(0))
    if mass != 1:
      raise PrefixCodeError(f"{self.name}: code is not exhaustive (μ-mass {mass})")

  def to_explicit(self) -> "ExplicitSpec":
    return ExplicitSpec(self.mu, self.nu, dict(self.entries()), name=self.name)


class ExplicitSpec(RestartSpec):
  """
  Restart spec given by a codeword table.

  The table may be passed directly (checked for prefix-freeness) or as a
  factory built on first use, for constructions whose canonical codes are
  prefix-free by design and whose classes are known up front.
  """

  def __init__(
    self,
    mu: Dist,
    nu: Dist,
    table: Optional[Mapping[Word, Word]] = None,
    name: str = "explicit",
    table_factory: Optional[Callable[[], Mapping[Word, Word]]] = None,
    classes: Optional[list[OutcomeClass]] = None,
  ):
    super().__init__(mu, nu, name)
    if (table is None) == (table_factory is None):
      raise ValueError("give exactly one of table / table_factory")
    self._table = {tuple(x): tuple(y) for x, y in table.items()} if table is not None else None
    self._factory = table_factory
    self._classes = classes
    self._prefixes: Optional[set[Word]] = None

  @property
  def table(self) -> dict[Word, Word]:
    if self._table is None:
      logger.debug(f"Materialising codeword table of {self.name}.")
      self._table = {tuple(x): tuple(y) for x, y in self._factory().items()}
    return self._table

  def _proper_prefixes(self) -> set[Word]:
    if self._prefixes is None:
      self._prefixes = {x[:i] for x in self.table for i in range(len(x))}
    return self._prefixes

  def lookup(self, word: Word) -> Optional[Word]:
    out = self.table.get(word)
    if out is not None:
      return out
    if word in self._proper_prefixes():
      return None
    raise PrefixCodeError(f"{self.name}: {word} neither is nor extends to a codeword")

  def entries(self) -> Iterator[tuple[Word, Word]]:
    return iter(self.table.items())

  def outcome_classes(self) -> list[OutcomeClass]:
    if self._classes is not None:
      return self._classes
    return super().outcome_classes()

  def validate(self) -> None:
    """
    Raises:
      PrefixCodeError: Not prefix-free, contains ε, or not exhaustive.
      AlphabetError: A codeword or output uses an unknown symbol.
    """
    if self._table is not None:
      if EMPTY in self._table:
        raise PrefixCodeError(f"{self.name}: the empty word cannot be a codeword")
      violation = find_prefix_violation(self._table)
      if violation is not None:
        u, w = violation
        raise PrefixCodeError(f"{self.name}: codeword {u} is a prefix of {w}")
      for x, y in self._table.items():
        self.mu.alphabet.check_word(x)
        self.nu.alphabet.check_word(y)
    super().validate()


class BlockSpec(RestartSpec):
  """
  Restart spec whose code is every word of length k (A = Σ^k).

  ``output_fn`` maps a k-word to its output; ``classes`` summarise the
  accounting so epoch statistics never enumerate Σ^k.
  """

  def __init__(
    self,
    mu: Dist,
    nu: Dist,
    k: int,
    output_fn: Callable[[Word], Word],
    classes: list[OutcomeClass],
    name: str,
  ):
    super().__init__(mu, nu, name)
    if k < 1:
      raise ValueError(f"block length must be >= 1, got {k}")
    self.k = k
    self._output_fn = output_fn
    self._classes = classes

  def lookup(self, word: Word) -> Optional[Word]:
    if len(word) < self.k:
      return None
    if len(word) == self.k:
      return self._output_fn(word)
    raise PrefixCodeError(f"{self.name}: {word} is longer than the block length {self.k}")

  def entries(self) -> Iterator[tuple[Word, Word]]:
    for x in self.mu.alphabet.words(self.k):
      yield x, self._output_fn(x)

  def outcome_classes(self) -> list[OutcomeClass]:
    return self._classes


def explicit_spec(mu: Dist, nu: Dist, pairs: Iterable[tuple[Iterable[int], Iterable[int]]],
                  name: str = "explicit") -> ExplicitSpec:
  """Build and validate an explicit spec from (codeword, output) pairs."""
  table: dict[Word, Word] = {}
  for x, y in pairs:
    x, y = tuple(x), tuple(y)
    if x in table:
      raise PrefixCodeError(f"{name}: duplicate codeword {x}")
    table[x] = y
  spec = ExplicitSpec(mu, nu, table, name=name)
  spec.validate()
  return spec


def build_restart(spec: RestartSpec) -> Protocol:
  """
  Restart protocol of a spec.

  States are proper prefixes of codewords (the start state is ε). Reading a
  symbol either extends the prefix silently or completes a codeword x, in
  which case f(x) is emitted and control returns to ε.

  Raises:
    PrefixCodeError: If the code is not prefix-free or not exhaustive.
  """
  logger.info(f"Building restart protocol for {spec.name}.")
  spec.validate()

  def step(u: Word, a: int) -> tuple[Word, Word]:
    if not isinstance(u, tuple):
      raise StateError(f"invalid state {u!r} for {spec.name}")
    w = u + (a,)
    try:
      out = spec.lookup(w)
    except PrefixCodeError:
      raise StateError(f"{u} is not a state of {spec.name}")
    if out is None:
      return w, EMPTY
    return EMPTY, out

  return Protocol(EMPTY, step, spec.mu.alphabet, spec.nu.alphabet, name=spec.name)


@dataclass(frozen=True)
class EpochStats:
  """
  Exact per-iteration accounting of a restart spec.

  Attributes:
    c (Fraction): Expected input symbols per iteration.
    p (Fraction): Expected output symbols per iteration.
    p_succ (Fraction): Probability an iteration emits at least one symbol.
    latency (Optional[Fraction]): c / p_succ; None when unproductive.
    m (int): Longest codeword (maximum consumption of one iteration).
    h_mu (float): Entropy of the input distribution, bits.
    h_nu (float): Entropy of the output distribution, bits.
  """
  c: Fraction
  p: Fraction
  p_succ: Fraction
  latency: Optional[Fraction]
  m: int
  h_mu: float
  h_nu: float

  @property
  def productive(self) -> bool:
    return self.p_succ > 0

  @property
  def ratio(self) -> Fraction:
    """Output symbols per input symbol, p / c."""
    return self.p / self.c

  @property
  def efficiency_bits(self) -> float:
    """(p·H(ν)) / (c·H(μ))"""
    if self.h_mu == 0:
      raise ValueError("input distribution has zero entropy")
    return float(self.p) * self.h_nu / (float(self.c) * self.h_mu)

  @property
  def latency_bits(self) -> Optional[float]:
    """Latency weighted by H(μ): entropy consumed per epoch (display value)."""
    return None if self.latency is None else float(self.latency) * self.h_mu

  def require_productive(self) -> "EpochStats":
    if not self.productive:
      raise UnproductiveError("protocol never emits; latency is infinite")
    return self


def epoch_stats(spec: RestartSpec) -> EpochStats:
  """
  Exact expected consumption, production, success probability and latency.

  An unproductive spec (p_succ = 0) is still returned, with latency None;
  callers that need a latency use :meth:`EpochStats.require_productive`.

  Raises:
    PrefixCodeError: If the classes do not carry total mass one.
  """
  classes = spec.outcome_classes()
  mass = sum((cl.mass for cl in classes), Fraction(0))
  if mass != 1:
    raise PrefixCodeError(f"{spec.name}: code is not exhaustive (μ-mass {mass})")

  c = sum((cl.mass * cl.in_len for cl in classes), Fraction(0))
  p = sum((cl.mass * cl.out_len for cl in classes), Fraction(0))
  p_succ = sum((cl.mass for cl in classes if cl.out_len >= 1), Fraction(0))
  latency = c / p_succ if p_succ > 0 else None
  if latency is None:
    logger.warning(f"{spec.name} is unproductive: no codeword emits a symbol.")

  return EpochStats(
    c=c,
    p=p,
    p_succ=p_succ,
    latency=latency,
    m=max(cl.in_len for cl in classes),
    h_mu=entropy(spec.mu),
    h_nu=entropy(spec.nu),
  )
