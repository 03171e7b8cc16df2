import math
from fractions import Fraction

import numpy as np
import pytest

from alphabet import Alphabet, Dist
from composition import compose
from errors import AlphabetError, StateError
from protocol import (
  absolute_bound,
  identity,
  output_length_bound,
  prefix_code_of,
  reachable_states,
  run_stream,
  step_word,
)
from reductions import biased_to_uniform, uniform_to_rational, uniform_to_uniform
from residual import uniform_to_arbitrary
from restart import build_restart
from sampler import ExactSampler


def test_identity_echoes():
  p = identity(Alphabet(3))
  assert step_word(p, p.start, (2, 0, 1)) == (0, (2, 0, 1))


def test_identity_rejects_foreign_state():
  p = identity(Alphabet(2))
  with pytest.raises(StateError):
    p.step(5, 0)


def test_step_rejects_symbol_outside_alphabet():
  p = identity(Alphabet(2))
  with pytest.raises(AlphabetError):
    p.step(0, 2)


def test_memo_fills_on_use():
  p = build_restart(uniform_to_uniform(3, 2, 2))
  assert p.memo_size == 0
  step_word(p, p.start, (0, 1, 2, 2))
  assert p.memo_size == 4


def test_run_stream_matches_step_word():
  p = build_restart(uniform_to_uniform(10, 2, 1))
  mu = Dist.uniform(10)
  out = run_stream(p, ExactSampler(mu, 3), 200)
  xs = ExactSampler(mu, 3).draw_word(200)
  assert out == step_word(p, p.start, xs)[1]


def test_run_stream_checks_alphabet():
  p = identity(Alphabet(2))
  with pytest.raises(AlphabetError):
    run_stream(p, ExactSampler(Dist.uniform(3), 1), 10)


def test_prefix_code_of_empty_word():
  p = identity(Alphabet(2))
  search = prefix_code_of(p, p.start, (), 4)
  assert search.words == ((),)
  assert search.complete


def test_prefix_code_of_identity():
  p = identity(Alphabet(2))
  search = prefix_code_of(p, p.start, (1, 0), 5)
  assert search.words == ((1, 0),)
  assert search.complete
  assert search.mass(Dist.uniform(2)) == Fraction(1, 4)


def test_prefix_code_of_restart_protocol():
  # digit 9 emits "1", a proper prefix of "11", so the search goes one level deeper
  p = build_restart(uniform_to_uniform(10, 2, 1))
  search = prefix_code_of(p, p.start, (1, 1), 4)
  assert search.complete
  assert set(search.words) == {(6,), (7,), (9, 4), (9, 5), (9, 6), (9, 7), (9, 9)}
  assert search.mass(Dist.uniform(10)) == Fraction(1, 4)


def test_prefix_code_of_is_cut_at_depth():
  p = build_restart(uniform_to_uniform(10, 2, 1))
  mu = Dist.uniform(10)
  search = prefix_code_of(p, p.start, (1, 1, 1, 1), 3)
  assert not search.complete
  assert search.frontier == ((9, 9, 9),)
  assert search.mass(mu) < Fraction(1, 16) <= search.mass(mu) + search.residual_mass(mu)


def test_restart_state_count():
  p = build_restart(uniform_to_uniform(3, 2, 2))
  assert len(reachable_states(p)) == (3 ** 2 - 1) // (3 - 1)


def test_reachable_states_cap():
  p = build_restart(uniform_to_uniform(3, 2, 2))
  with pytest.raises(StateError):
    reachable_states(p, cap=2)


def test_absolute_bound():
  mu, nu = Dist.uniform(10), Dist.uniform(2)
  assert absolute_bound(mu, nu) == pytest.approx(math.log2(10))
  assert absolute_bound(mu, nu, entropy_units=True) == pytest.approx(1.0)
  assert output_length_bound(mu, nu, length=3) == pytest.approx(3 * math.log2(10))


MASS_LAW_SPECS = [
  uniform_to_uniform(10, 2, 1),
  uniform_to_uniform(3, 2, 2),
  uniform_to_rational(4, [1, 3], 2),
  biased_to_uniform(3, 2),
]


@pytest.mark.parametrize("spec", MASS_LAW_SPECS, ids=lambda s: s.name)
def test_prefix_code_mass_equals_target_probability(spec):
  p = build_restart(spec)
  for n in range(1, 4):
    for y in spec.nu.alphabet.words(n):
      search = prefix_code_of(p, p.start, y, 8)
      found, rest = search.mass(spec.mu), search.residual_mass(spec.mu)
      if search.complete:
        assert found == spec.nu.word_prob(y)
      else:
        assert found <= spec.nu.word_prob(y) <= found + rest


@pytest.mark.parametrize("spec", MASS_LAW_SPECS, ids=lambda s: s.name)
def test_output_never_exceeds_absolute_bound(spec):
  p = build_restart(spec)
  sampler = ExactSampler(spec.mu, 17)
  for _ in range(50):
    x = sampler.draw_word(12)
    _, out = step_word(p, p.start, x)
    assert len(out) <= output_length_bound(spec.mu, spec.nu, x) + 1e-9


def _split_word_protocols():
  thirds = Dist.of(["1/3", "2/3"])
  return [
    (build_restart(uniform_to_uniform(10, 2, 1)), Dist.uniform(10)),
    (build_restart(biased_to_uniform(3, 2)), Dist.of(["1/3", "2/3"])),
    (compose(build_restart(uniform_to_uniform(10, 2, 1)), build_restart(uniform_to_uniform(2, 3, 2))), Dist.uniform(10)),
    (uniform_to_arbitrary(4, thirds, 1), Dist.uniform(4)),
  ]


@pytest.mark.parametrize("p, mu", _split_word_protocols(), ids=lambda v: getattr(v, "name", ""))
def test_step_word_splits_at_any_point(p, mu):
  sampler = ExactSampler(mu, 21)
  lengths = np.random.default_rng(21)
  for _ in range(40):
    state, _ = step_word(p, p.start, sampler.draw_word(int(lengths.integers(0, 5))))
    x = sampler.draw_word(int(lengths.integers(1, 8)))
    y = sampler.draw_word(int(lengths.integers(1, 8)))
    mid, out_x = step_word(p, state, x)
    end, out_y = step_word(p, mid, y)
    assert step_word(p, state, x + y) == (end, out_x + out_y)
