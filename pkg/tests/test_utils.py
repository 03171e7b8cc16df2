from fractions import Fraction

import pytest

from alphabet import Alphabet
from errors import InputDataError
from utils import format_rational, iter_glyphs, parse_int_list, parse_rational, parse_rational_list


def test_format_rational():
  assert format_rational(Fraction(9, 4)) == "9/4"
  assert format_rational(Fraction(1)) == "1/1"
  assert format_rational(None) is None


def test_parse_rational():
  assert parse_rational(" 2/6 ") == Fraction(1, 3)
  assert parse_rational("3") == 3
  with pytest.raises(ValueError):
    parse_rational("0.5")
  with pytest.raises(ValueError):
    parse_rational("1e3")


def test_parse_lists():
  assert parse_rational_list("1/3, 2/3") == [Fraction(1, 3), Fraction(2, 3)]
  assert parse_int_list("1,3,") == [1, 3]


def test_iter_glyphs_skips_whitespace_and_honours_limit():
  assert list(iter_glyphs("7 3\n9", Alphabet(10))) == [7, 3, 9]
  assert list(iter_glyphs("7 3\n9", Alphabet(10), limit=2)) == [7, 3]


def test_iter_glyphs_reports_raw_position():
  with pytest.raises(InputDataError) as info:
    list(iter_glyphs("01 x", Alphabet(2)))
  assert info.value.position == 3
  assert info.value.glyph == "x"
