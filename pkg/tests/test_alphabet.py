from fractions import Fraction

import pytest

from alphabet import Alphabet, Dist, entropy, int_to_word, is_prefix, word_to_int
from errors import AlphabetError, DistributionError


def test_default_glyphs_are_digits_then_letters():
  assert Alphabet(12).glyph_table == "0123456789ab"


def test_parse_and_format():
  a = Alphabet(2, "ht")
  assert a.parse("htth") == (0, 1, 1, 0)
  assert a.format((1, 0)) == "th"


def test_parse_rejects_unknown_glyph():
  with pytest.raises(AlphabetError):
    Alphabet(2).parse("012")


def test_repeated_glyph_rejected():
  with pytest.raises(AlphabetError):
    Alphabet(2, "aa")


def test_words_are_lexicographic():
  assert list(Alphabet(2).words(2)) == [(0, 0), (0, 1), (1, 0), (1, 1)]


def test_dist_requires_exact_normalisation():
  with pytest.raises(DistributionError):
    Dist.of(["1/3", "1/3"])


def test_dist_rejects_negative():
  with pytest.raises(DistributionError):
    Dist.of([Fraction(3, 2), Fraction(-1, 2)])


def test_strict_dist_rejects_zero():
  with pytest.raises(DistributionError):
    Dist.of([0, 1])
  assert Dist.of([0, 1], strict=False).probs == (0, 1)


def test_from_pairs_and_denominator():
  d = Dist.from_pairs([[1, 3], [1, 6], [1, 2]])
  assert d.probs == (Fraction(1, 3), Fraction(1, 6), Fraction(1, 2))
  assert d.denominator == 6
  assert d.cumulative_weights == (2, 3, 6)


def test_product_and_word_prob():
  d = Dist.of(["1/3", "2/3"])
  assert d.product(2) == (Fraction(1, 9), Fraction(2, 9), Fraction(2, 9), Fraction(4, 9))
  assert d.word_prob((1, 1, 0)) == Fraction(4, 27)
  assert d.word_prob(()) == 1


def test_entropy_in_bits():
  assert entropy(Dist.uniform(8)) == pytest.approx(3.0)
  assert entropy(Dist.of(["1/4", "3/4"])) == pytest.approx(0.8112781244591328)


def test_word_int_conversions():
  assert word_to_int((1, 0, 1), 2) == 5
  assert int_to_word(5, 2, 4) == (0, 1, 0, 1)
  with pytest.raises(AlphabetError):
    int_to_word(8, 2, 3)


def test_is_prefix():
  assert is_prefix((), (1, 2))
  assert is_prefix((1,), (1, 2))
  assert not is_prefix((2,), (1, 2))
  assert not is_prefix((1, 2, 3), (1, 2))
