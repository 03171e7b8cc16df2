from fractions import Fraction

import pytest

from alphabet import Dist
from errors import InfeasibleCodeError, PrefixCodeError
from prefix_codes import (
  CanonicalCode,
  PrefixCode,
  assign_codewords,
  assign_requests,
  find_prefix_violation,
  kraft_sum,
)


def test_kraft_sum_is_exact():
  assert kraft_sum([1, 2, 2], 2) == 1
  assert kraft_sum([1, 1, 2], 3) == Fraction(7, 9)


def test_find_prefix_violation():
  assert find_prefix_violation([(0,), (0, 0)]) == ((0,), (0, 0))
  assert find_prefix_violation([(0,), (1, 0), (1, 1)]) is None


def test_prefix_code_rejects_prefix_pairs():
  with pytest.raises(PrefixCodeError):
    PrefixCode(((0,), (0, 0)), 2)


def test_prefix_code_mass_and_exhaustiveness():
  code = PrefixCode(((0,), (1, 0), (1, 1)), 2)
  assert code.kraft() == 1
  assert code.is_exhaustive(Dist.uniform(2))
  assert code.mass(Dist.of(["1/3", "2/3"])) == 1


def test_canonical_code_layout():
  code = CanonicalCode({1: 1, 2: 2}, 2)
  assert code.words() == [(0,), (1, 0), (1, 1)]
  assert code.kraft == 1


def test_canonical_code_skips_empty_lengths():
  code = CanonicalCode({1: 1, 3: 4}, 2)
  assert code.words() == [(0,), (1, 0, 0), (1, 0, 1), (1, 1, 0), (1, 1, 1)]


def test_canonical_code_indexing():
  code = CanonicalCode({2: 3, 3: 4}, 3)
  assert code.codeword(2, 0) == (0, 0)
  assert code.codeword(3, 0) == (1, 0, 0)
  with pytest.raises(IndexError):
    code.codeword(2, 3)


def test_infeasible_lengths():
  with pytest.raises(InfeasibleCodeError):
    CanonicalCode({1: 3}, 2)


def test_assign_codewords_ascending():
  code = assign_codewords([2, 1, 2], 2)
  assert code.words == ((0,), (1, 0), (1, 1))


@pytest.mark.parametrize("lengths,d", [([1, 2, 3, 3], 2), ([1, 1, 2, 2, 2], 3), ([2] * 16, 4), ([1, 3, 3, 3], 3)])
def test_assigned_codes_are_prefix_free(lengths, d):
  code = assign_codewords(lengths, d)
  assert sorted(code.lengths) == sorted(lengths)
  assert find_prefix_violation(code.words) is None


def test_assign_requests_keeps_order_within_a_length():
  out = assign_requests([("b", 2), ("a", 1), ("c", 2)], 2)
  assert out == [("a", (0,)), ("b", (1, 0)), ("c", (1, 1))]
