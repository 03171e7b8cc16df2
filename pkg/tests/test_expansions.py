import itertools
import math
from fractions import Fraction

import mpmath
import pytest

from alphabet import Dist
from errors import PreconditionError
from expansions import (
  binomialary_bounds,
  binomialary_increment,
  binomialary_representation,
  binomialary_value,
  coin_output_length,
  digit_sum_bounds,
  digits,
  find_dirichlet_k,
  floor_log,
  multinomial,
  multinomial_rank,
  multinomial_unrank,
  type_classes,
)


def test_digits_and_floor_log():
  assert digits(0, 10) == []
  assert digits(13, 2) == [1, 0, 1, 1]
  assert floor_log(1, 3) == 0
  assert floor_log(81, 3) == 4
  assert floor_log(80, 3) == 3
  with pytest.raises(ValueError):
    floor_log(0, 2)


@pytest.mark.parametrize("d", [2, 3, 10])
def test_digit_sum_bounds_hold(d):
  for a in range(1, 10 ** 5 + 1):
    bounds = digit_sum_bounds(a, d)
    assert bounds.holds(), bounds


def _brute_force_targets(r, k):
  bounds = binomialary_bounds(r, k, shifted=False)
  seen = set()
  for coeffs in itertools.product(*(range(b + 1) for b in bounds)):
    seen.add(binomialary_value(coeffs, r))
  return seen


@pytest.mark.parametrize("k", [1, 2, 3, 4])
def test_every_value_is_representable_for_r3(k):
  top = (3 ** k - 1) // 2
  assert _brute_force_targets(3, k) == set(range(top + 1))


@pytest.mark.parametrize("r,k", [(3, 1), (3, 3), (3, 6), (4, 2), (4, 4), (5, 3), (5, 4)])
def test_greedy_representation_is_valid(r, k):
  bounds = binomialary_bounds(r, k, shifted=False)
  for target in range((r ** k - 1) // (r - 1) + 1):
    coeffs = binomialary_representation(r, k, target, shifted=False)
    assert binomialary_value(coeffs, r) == target
    assert all(0 <= a <= b for a, b in zip(coeffs, bounds))


@pytest.mark.parametrize("r,k", [(3, 2), (3, 4), (4, 2), (4, 3)])
def test_increment_walk_is_valid(r, k):
  bounds = binomialary_bounds(r, k, shifted=False)
  for target in range((r ** k - 1) // (r - 1) + 1):
    coeffs = binomialary_representation(r, k, target, shifted=False, method="increment")
    assert binomialary_value(coeffs, r) == target
    assert all(0 <= a <= b for a, b in zip(coeffs, bounds))


@pytest.mark.parametrize("r", [3, 4, 5])
def test_greedy_matches_carry_rule_on_coin_targets(r):
  for k in range(max(1, r - 2), 9):
    target = (r - 1) ** coin_output_length(r, k)
    greedy = binomialary_representation(r, k, target)
    carried = binomialary_representation(r, k, target, method="increment")
    assert greedy == carried, (r, k)


def test_gap_below_minimum_k():
  # r = 5, k = 2: weights 1 and 4 with bounds 2 and 1 leave 3 unreachable
  assert 3 not in _brute_force_targets(5, 2)


def test_increment_from_maximum_raises():
  bounds = binomialary_bounds(3, 2, shifted=False)
  with pytest.raises(PreconditionError):
    binomialary_increment(bounds, bounds, 3)


def test_shifted_representation():
  coeffs = binomialary_representation(3, 3, 20)
  assert coeffs[0] == 0
  assert binomialary_value(coeffs, 3) == 20
  assert all(a <= b for a, b in zip(coeffs, binomialary_bounds(3, 3)))


@pytest.mark.parametrize("target", [-2, 3, 28])
def test_shifted_representation_rejects_bad_targets(target):
  with pytest.raises(PreconditionError):
    binomialary_representation(3, 3, target)


def test_coin_output_length():
  assert coin_output_length(3, 2) == 3
  assert coin_output_length(3, 7) == 11


def _oracle_dirichlet(r, k_min, k_max):
  with mpmath.workdps(100):
    u = mpmath.log(r) / mpmath.log(r - 1)
    for k in range(k_min, k_max + 1):
      x = k * u
      m = int(mpmath.floor(x))
      if m > k and x - m < mpmath.mpf(1) / k:
        return k
  return None


def test_dirichlet_k_examples():
  assert find_dirichlet_k(3, 1, 20) == 2
  assert find_dirichlet_k(3, 3, 20) == 7
  assert find_dirichlet_k(3, 8, 20) == 12
  assert find_dirichlet_k(3, 13, 13) is None


@pytest.mark.parametrize("r", [3, 4])
def test_dirichlet_k_matches_high_precision_oracle(r):
  k_min = max(1, r - 2)
  for start in range(k_min, 201):
    assert find_dirichlet_k(r, start, 200) == _oracle_dirichlet(r, start, 200)


def test_dirichlet_k_preconditions():
  with pytest.raises(PreconditionError):
    find_dirichlet_k(2, 1, 10)
  with pytest.raises(PreconditionError):
    find_dirichlet_k(5, 2, 10)


def test_multinomial():
  assert multinomial((2, 1, 1)) == 12
  assert multinomial((3,)) == 1
  assert multinomial(()) == 1


def test_rank_follows_lexicographic_order():
  words = sorted(set(itertools.permutations((0, 0, 1, 2))))
  for expected, w in enumerate(words):
    assert multinomial_rank(w, 3) == ((2, 1, 1), expected)
    assert multinomial_unrank((2, 1, 1), expected) == w


def test_unrank_rejects_out_of_range():
  with pytest.raises(ValueError):
    multinomial_unrank((1, 1), 2)


def test_type_classes():
  classes = type_classes(Dist.of(["1/3", "2/3"]), 3)
  assert [c.sigma for c in classes] == [(3, 0), (2, 1), (1, 2), (0, 3)]
  assert sum(c.q for c in classes) == 1
  assert classes[2].q == Fraction(4, 9)
  assert classes[2].word_prob == Fraction(4, 27)
  assert sum(c.t for c in classes) == 2 ** 3
  assert math.isclose(float(classes[0].q), 1 / 27)
