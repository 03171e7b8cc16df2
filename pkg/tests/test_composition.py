from fractions import Fraction

import pytest

from alphabet import Alphabet, Dist
from composition import (
  SerialChain,
  build_serial,
  check_growth_condition,
  compose,
  constant_chain,
  serial_epoch_trace,
  serial_partial_efficiency,
)
from errors import AlphabetError, PreconditionError, StateError
from protocol import identity, step_word
from reductions import uniform_to_uniform
from restart import build_restart
from sampler import ExactSampler


def test_compose_with_identity_changes_nothing(decimal_digits):
  p = build_restart(uniform_to_uniform(10, 2, 1))
  both = compose(p, identity(Alphabet(2)))
  xs = ExactSampler(decimal_digits, 4).draw_word(300)
  assert step_word(both, both.start, xs)[1] == step_word(p, p.start, xs)[1]


def test_compose_chains_the_outputs():
  p1 = build_restart(uniform_to_uniform(10, 2, 1))
  p2 = build_restart(uniform_to_uniform(2, 3, 2))
  both = compose(p1, p2)
  # 7 -> "111"; "11" is outcome 3 of 4 = 3 + 1, the empty slot, so p2 emits nothing
  state, out = both.step(both.start, 7)
  assert out == ()
  assert state == ((), (1,))
  assert both.input_alphabet.size == 10 and both.output_alphabet.size == 3


def test_compose_rejects_mismatched_alphabets():
  with pytest.raises(AlphabetError):
    compose(identity(Alphabet(3)), identity(Alphabet(2)))


def test_compose_rejects_bad_state():
  both = compose(identity(Alphabet(2)), identity(Alphabet(2)))
  with pytest.raises(StateError):
    both.step(0, 1)


def _decimal_chain():
  return SerialChain(lambda i: uniform_to_uniform(10, 2, i + 1), name="decimal-growing")


def test_growing_chain_is_nearly_optimal():
  chain = _decimal_chain()
  eff = serial_partial_efficiency(chain, 100)
  assert eff.bits > 0.99
  assert eff.n == 100


def test_growth_condition_ratios_vanish():
  ratios = check_growth_condition(_decimal_chain(), 100)
  assert len(ratios) == 99
  assert ratios[0] == 2
  assert ratios[9] == Fraction(2, 10)
  assert ratios[-1] == Fraction(2, 99)
  assert ratios[-1] < 0.05


def test_growth_condition_needs_two_components():
  with pytest.raises(ValueError):
    check_growth_condition(_decimal_chain(), 1)


def test_finite_chain_repeats_its_last_component():
  a, b = uniform_to_uniform(3, 2, 1), uniform_to_uniform(3, 2, 2)
  chain = SerialChain([a, b])
  assert chain.finite
  assert chain.component(0) is a
  assert chain.component(7) is b
  assert chain.next_index(1) == 1
  with pytest.raises(IndexError):
    chain.component(-1)


def test_chain_components_must_share_distributions():
  with pytest.raises(AlphabetError):
    SerialChain([uniform_to_uniform(3, 2, 1), uniform_to_uniform(10, 2, 1)])
  chain = SerialChain(lambda i: uniform_to_uniform(3 if i == 0 else 10, 2, 1))
  with pytest.raises(AlphabetError):
    chain.component(1)


def test_empty_chain_rejected():
  with pytest.raises(PreconditionError):
    SerialChain([])


def test_serial_protocol_moves_through_components():
  p = build_serial(SerialChain([uniform_to_uniform(10, 2, 1), uniform_to_uniform(10, 2, 2)]))
  assert p.start == (0, ())
  state, out = p.step(p.start, 7)
  assert (state, out) == ((1, ()), (1, 1, 1))
  state, out = p.step(state, 9)
  assert (state, out) == ((1, (9,)), ())
  state, out = p.step(state, 9)
  assert (state, out) == ((1, ()), (1, 1))


def test_serial_protocol_rejects_bad_states():
  p = build_serial(constant_chain(uniform_to_uniform(10, 2, 1)))
  with pytest.raises(StateError):
    p.step("x", 0)
  with pytest.raises(StateError):
    p.step((0, (1, 2)), 0)


def test_constant_chain_matches_restart_protocol(decimal_digits):
  spec = uniform_to_uniform(10, 2, 2)
  serial = build_serial(constant_chain(spec))
  restart = build_restart(spec)
  xs = ExactSampler(decimal_digits, 9).draw_word(500)
  assert step_word(serial, serial.start, xs)[1] == step_word(restart, restart.start, xs)[1]


def test_epoch_trace():
  rows = serial_epoch_trace(_decimal_chain(), 3)
  assert [r.index for r in rows] == [0, 1, 2]
  assert [r.m for r in rows] == [1, 2, 3]
  assert rows[0].p == Fraction(13, 5)
  assert rows[1].c == 2


def test_constant_chain_efficiency_equals_component():
  spec = uniform_to_uniform(3, 2, 2)
  eff = serial_partial_efficiency(constant_chain(spec), 5)
  assert eff.ratio == Fraction(4, 3)
  assert Dist.uniform(3) == spec.mu


def test_composite_matches_pipelined_simulation(decimal_digits):
  p1 = build_restart(uniform_to_uniform(10, 2, 4))
  p2 = build_restart(uniform_to_uniform(2, 3, 4))
  both = compose(p1, p2)
  for seed in range(10):
    xs = ExactSampler(decimal_digits, seed).draw_word(10_000)
    _, middle = step_word(p1, p1.start, xs)
    _, expected = step_word(p2, p2.start, middle)
    assert step_word(both, both.start, xs)[1] == expected


def test_trace_feeds_growth_ratios():
  chain = _decimal_chain()
  rows = serial_epoch_trace(chain, 5)
  consumed = [sum(row.c for row in rows[:i]) for i in range(1, 5)]
  assert check_growth_condition(chain, 5) == [Fraction(row.m) / c for row, c in zip(rows[1:], consumed)]
