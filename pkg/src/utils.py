from fractions import Fraction
from typing import Iterator, Optional

from alphabet import Alphabet
from errors import InputDataError


def format_rational(value: Optional[Fraction]) -> Optional[str]:
  """
  Render an exact rational as "num/den" (integers keep "/1").

  Args:
    value (Optional[Fraction]): The value, or None.

  Returns:
    Optional[str]: e.g. "9/4", "1/1"; None passes through.
  """
  if value is None:
    return None
  value = Fraction(value)
  return f"{value.numerator}/{value.denominator}"


def parse_rational(text: str) -> Fraction:
  """Parse "num/den" or an integer string; decimals are rejected."""
  text = text.strip()
  if "." in text or "e" in text.lower():
    raise ValueError(f"rationals must be written as num/den, got {text!r}")
  return Fraction(text)


def parse_rational_list(text: str) -> list[Fraction]:
  """Comma-separated rationals, e.g. "1/3,2/3"."""
  return [parse_rational(part) for part in text.split(",") if part.strip()]


def parse_int_list(text: str) -> list[int]:
  return [int(part) for part in text.split(",") if part.strip()]


def iter_glyphs(text: str, alphabet: Alphabet, limit: Optional[int] = None) -> Iterator[int]:
  """
  Symbols of a glyph stream. Whitespace is skipped; positions count raw characters.

  Raises:
    InputDataError: On the first glyph outside the alphabet.
  """
  table = alphabet.glyph_table
  taken = 0
  for position, ch in enumerate(text):
    if limit is not None and taken >= limit:
      return
    if ch.isspace():
      continue
    idx = table.find(ch)
    if idx < 0:
      raise InputDataError(position, ch)
    taken += 1
    yield idx
