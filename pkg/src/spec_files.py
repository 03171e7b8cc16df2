"""
Protocol spec files: JSON documents naming a reduction family and its
parameters. Rationals are always [numerator, denominator] integer pairs.

  {"family": "uniform_uniform", "d": 10, "c": 2, "k": 1}
  {"family": "uniform_rational", "d": 4, "numerators": [1, 3], "k": 1}
  {"family": "uniform_arbitrary", "d": 4, "target": [[1, 3], [2, 3]], "k": 1}
  {"family": "arbitrary_uniform", "source": [[1, 3], [2, 3]], "c": 2, "k": 4}
  {"family": "biased_uniform", "r": 3, "k": 2}
  {"family": "explicit",
   "input": {"glyphs": "01", "probs": [[1, 2], [1, 2]]},
   "output": {"glyphs": "ab", "probs": [[1, 2], [1, 2]]},
   "code": [{"in": "0", "out": "a"}, {"in": "1", "out": "b"}]}
  {"family": "compose", "first": {...}, "second": {...}}
  {"family": "serial", "components": [{...}, ...]}
  {"family": "serial", "template": {...without k...}, "k_start": 1}

Errors carry the JSON path of the offending value, e.g. ``$.components[1].k``.
"""
import json
from dataclasses import dataclass
from fractions import Fraction
from pathlib import Path
from typing import Any, Optional

from alphabet import Alphabet, Dist
from composition import SerialChain, build_serial, compose
from errors import ReductionError, SpecFileError
from logger import AppLogger
from protocol import Protocol
from reductions import (
  arbitrary_to_uniform,
  biased_to_uniform,
  uniform_to_rational,
  uniform_to_uniform,
)
from residual import ResidualProtocol, uniform_to_arbitrary
from restart import RestartSpec, build_restart, explicit_spec

logger = AppLogger("[SpecFiles]")

FAMILIES = (
  "uniform_uniform",
  "uniform_rational",
  "uniform_arbitrary",
  "arbitrary_uniform",
  "biased_uniform",
  "explicit",
  "compose",
  "serial",
)

# families whose spec is a finite restart code
RESTART_FAMILIES = ("uniform_uniform", "uniform_rational", "arbitrary_uniform", "biased_uniform", "explicit")


@dataclass
class LoadedSpec:
  """
  A spec file turned into a runnable protocol.

  Attributes:
    family (str): Family named in the file.
    protocol (Protocol): The protocol, ready to run.
    mu (Dist): Input distribution.
    nu (Dist): Claimed output distribution.
    restart (Optional[RestartSpec]): The restart spec for finite families.
    chain (Optional[SerialChain]): The chain for the serial family.
  """
  family: str
  protocol: Protocol
  mu: Dist
  nu: Dist
  restart: Optional[RestartSpec] = None
  chain: Optional[SerialChain] = None

  @property
  def lazy(self) -> Optional[ResidualProtocol]:
    return self.protocol if isinstance(self.protocol, ResidualProtocol) else None


# ---------------------------------------------------------------------------
# Field readers
# ---------------------------------------------------------------------------

def _field(obj: dict, key: str, path: str) -> Any:
  if key not in obj:
    raise SpecFileError(path, f"missing field {key!r}")
  return obj[key]


def _int(obj: dict, key: str, path: str, minimum: int = 0, default: Optional[int] = None) -> int:
  if key not in obj and default is not None:
    return default
  value = _field(obj, key, path)
  if isinstance(value, bool) or not isinstance(value, int):
    raise SpecFileError(f"{path}.{key}", f"expected an integer, got {value!r}")
  if value < minimum:
    raise SpecFileError(f"{path}.{key}", f"must be >= {minimum}, got {value}")
  return value


def _int_list(obj: dict, key: str, path: str) -> list[int]:
  value = _field(obj, key, path)
  if not isinstance(value, list):
    raise SpecFileError(f"{path}.{key}", "expected a list of integers")
  for i, item in enumerate(value):
    if isinstance(item, bool) or not isinstance(item, int):
      raise SpecFileError(f"{path}.{key}[{i}]", f"expected an integer, got {item!r}")
  return value


def _rationals(obj: dict, key: str, path: str) -> list[Fraction]:
  value = _field(obj, key, path)
  if not isinstance(value, list):
    raise SpecFileError(f"{path}.{key}", "expected a list of [numerator, denominator] pairs")
  out = []
  for i, pair in enumerate(value):
    where = f"{path}.{key}[{i}]"
    if not (isinstance(pair, list) and len(pair) == 2
            and all(isinstance(v, int) and not isinstance(v, bool) for v in pair)):
      raise SpecFileError(where, f"expected [numerator, denominator] integers, got {pair!r}")
    if pair[1] <= 0:
      raise SpecFileError(where, "denominator must be positive")
    out.append(Fraction(pair[0], pair[1]))
  return out


def _glyphs(obj: dict, path: str) -> Optional[str]:
  value = obj.get("glyphs")
  if value is not None and not isinstance(value, str):
    raise SpecFileError(f"{path}.glyphs", "expected a string")
  return value


def _dist(obj: Any, path: str) -> Dist:
  if not isinstance(obj, dict):
    raise SpecFileError(path, "expected an object with 'probs' and optional 'glyphs'")
  probs = _rationals(obj, "probs", path)
  try:
    return Dist(Alphabet(len(probs), _glyphs(obj, path)), tuple(probs))
  except ReductionError as e:
    raise SpecFileError(path, str(e))


def _parse_word(alphabet: Alphabet, text: Any, path: str) -> tuple[int, ...]:
  if not isinstance(text, str):
    raise SpecFileError(path, f"expected a glyph string, got {text!r}")
  try:
    return alphabet.parse(text)
  except ReductionError as e:
    raise SpecFileError(path, str(e))


# ---------------------------------------------------------------------------
# Loading
# ---------------------------------------------------------------------------

def _restart_spec(doc: dict, family: str, path: str, k: Optional[int] = None) -> RestartSpec:
  k = k if k is not None else _int(doc, "k", path, minimum=1) if family != "explicit" else None

  if family == "uniform_uniform":
    return uniform_to_uniform(_int(doc, "d", path, 2), _int(doc, "c", path, 2), k)
  if family == "uniform_rational":
    return uniform_to_rational(_int(doc, "d", path, 2), _int_list(doc, "numerators", path), k)
  if family == "arbitrary_uniform":
    source = Dist.of(_rationals(doc, "source", path))
    return arbitrary_to_uniform(source, _int(doc, "c", path, 2), k, _int(doc, "inner_depth", path, 1, default=1))
  if family == "biased_uniform":
    return biased_to_uniform(_int(doc, "r", path, 3), k)

  mu = _dist(_field(doc, "input", path), f"{path}.input")
  nu = _dist(_field(doc, "output", path), f"{path}.output")
  entries = _field(doc, "code", path)
  if not isinstance(entries, list):
    raise SpecFileError(f"{path}.code", "expected a list of {in, out} objects")
  pairs = []
  for i, entry in enumerate(entries):
    where = f"{path}.code[{i}]"
    if not isinstance(entry, dict):
      raise SpecFileError(where, "expected an object with 'in' and 'out'")
    pairs.append((
      _parse_word(mu.alphabet, _field(entry, "in", where), f"{where}.in"),
      _parse_word(nu.alphabet, _field(entry, "out", where), f"{where}.out"),
    ))
  return explicit_spec(mu, nu, pairs, name=doc.get("name", "explicit"))


def _family(doc: Any, path: str) -> str:
  if not isinstance(doc, dict):
    raise SpecFileError(path, "expected a JSON object")
  family = _field(doc, "family", path)
  if family not in FAMILIES:
    raise SpecFileError(f"{path}.family", f"unknown family {family!r}; expected one of {', '.join(FAMILIES)}")
  return family


def _serial_chain(doc: dict, path: str) -> SerialChain:
  if "components" in doc:
    items = doc["components"]
    if not isinstance(items, list) or not items:
      raise SpecFileError(f"{path}.components", "expected a non-empty list of restart specs")
    specs = []
    for i, item in enumerate(items):
      where = f"{path}.components[{i}]"
      family = _family(item, where)
      if family not in RESTART_FAMILIES:
        raise SpecFileError(f"{where}.family", f"serial components must be restart families, got {family!r}")
      specs.append(_restart_spec(item, family, where))
    return SerialChain(specs, name=doc.get("name", "serial"))

  template = _field(doc, "template", path)
  where = f"{path}.template"
  family = _family(template, where)
  if family not in RESTART_FAMILIES or family == "explicit":
    raise SpecFileError(f"{where}.family", f"a serial template needs a family with a k parameter, got {family!r}")
  k_start = _int(doc, "k_start", path, 1, default=1)
  k_stop = doc.get("k_stop")
  if k_stop is not None:
    k_stop = _int(doc, "k_stop", path, k_start)
    specs = [_restart_spec(template, family, where, k=k) for k in range(k_start, k_stop + 1)]
    return SerialChain(specs, name=doc.get("name", f"serial({family})"))
  return SerialChain(lambda i: _restart_spec(template, family, where, k=k_start + i),
                     name=doc.get("name", f"serial({family})"))


def load_spec(doc: Any, path: str = "$") -> LoadedSpec:
  """
  Build the protocol described by a parsed spec document.

  Raises:
    SpecFileError: If the document does not match the schema or the family
      rejects its parameters.
  """
  family = _family(doc, path)
  try:
    if family in RESTART_FAMILIES:
      spec = _restart_spec(doc, family, path)
      return LoadedSpec(family, build_restart(spec), spec.mu, spec.nu, restart=spec)

    if family == "uniform_arbitrary":
      target = Dist.of(_rationals(doc, "target", path))
      p = uniform_to_arbitrary(_int(doc, "d", path, 2), target, _int(doc, "k", path, 1))
      return LoadedSpec(family, p, Dist.uniform(p.d), target)

    if family == "compose":
      first = load_spec(_field(doc, "first", path), f"{path}.first")
      second = load_spec(_field(doc, "second", path), f"{path}.second")
      return LoadedSpec(family, compose(first.protocol, second.protocol), first.mu, second.nu)

    chain = _serial_chain(doc, path)
    first = chain.component(0)
    return LoadedSpec(family, build_serial(chain), first.mu, first.nu, chain=chain)
  except SpecFileError:
    raise
  except ReductionError as e:
    raise SpecFileError(path, str(e))


def load_spec_file(filepath: str) -> LoadedSpec:
  """Read and load a spec file; unreadable or malformed JSON is a SpecFileError at ``$``."""
  path = Path(filepath)
  logger.info(f"Loading spec file {path}")

  # 1. Read & parse JSON
  try:
    doc = json.loads(path.read_text(encoding="utf-8"))
  except OSError as e:
    raise SpecFileError("$", f"cannot read {path}: {e.strerror}")
  except json.JSONDecodeError as e:
    raise SpecFileError("$", f"invalid JSON at line {e.lineno}, column {e.colno}: {e.msg}")

  # 2. Build protocol
  loaded = load_spec(doc)
  logger.debug(f"Loaded {loaded.family} spec as {loaded.protocol.name}.")
  return loaded


def _pairs(dist: Dist) -> list[list[int]]:
  return [[p.numerator, p.denominator] for p in dist.probs]


def dump_explicit(spec: RestartSpec) -> dict:
  """Serialise any finite restart spec as an "explicit" document."""
  mu, nu = spec.mu, spec.nu
  return {
    "family": "explicit",
    "name": spec.name,
    "input": {"glyphs": mu.alphabet.glyph_table, "probs": _pairs(mu)},
    "output": {"glyphs": nu.alphabet.glyph_table, "probs": _pairs(nu)},
    "code": [
      {"in": mu.alphabet.format(x), "out": nu.alphabet.format(y)}
      for x, y in sorted(spec.entries())
    ],
  }
