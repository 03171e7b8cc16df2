import json

import pytest

from errors import SpecFileError
from protocol import step_word
from residual import ResidualProtocol
from restart import epoch_stats
from spec_files import dump_explicit, load_spec, load_spec_file

DECIMAL = {"family": "uniform_uniform", "d": 10, "c": 2, "k": 1}


@pytest.mark.parametrize("doc", [
  DECIMAL,
  {"family": "uniform_rational", "d": 4, "numerators": [1, 3], "k": 2},
  {"family": "arbitrary_uniform", "source": [[1, 3], [2, 3]], "c": 2, "k": 3},
  {"family": "arbitrary_uniform", "source": [[1, 3], [2, 3]], "c": 2, "k": 2, "inner_depth": 2},
  {"family": "biased_uniform", "r": 3, "k": 2},
], ids=lambda d: d["family"])
def test_restart_families_load(doc):
  loaded = load_spec(doc)
  assert loaded.family == doc["family"]
  assert loaded.restart is not None
  assert loaded.lazy is None
  assert loaded.mu == loaded.restart.mu


def test_explicit_family():
  doc = {
    "family": "explicit",
    "name": "skewed",
    "input": {"glyphs": "01", "probs": [[1, 2], [1, 2]]},
    "output": {"glyphs": "ab", "probs": [[1, 2], [1, 2]]},
    "code": [{"in": "0", "out": "a"}, {"in": "10", "out": "a"}, {"in": "11", "out": "b"}],
  }
  loaded = load_spec(doc)
  assert loaded.restart.name == "skewed"
  assert step_word(loaded.protocol, loaded.protocol.start, (1, 1, 0))[1] == (1, 0)


def test_lazy_family():
  loaded = load_spec({"family": "uniform_arbitrary", "d": 4, "target": [[1, 3], [2, 3]], "k": 1})
  assert isinstance(loaded.lazy, ResidualProtocol)
  assert loaded.mu.size == 4


def test_compose_family():
  doc = {"family": "compose", "first": DECIMAL, "second": {"family": "uniform_uniform", "d": 2, "c": 3, "k": 2}}
  loaded = load_spec(doc)
  assert loaded.mu.size == 10 and loaded.nu.size == 3
  assert loaded.restart is None


def test_serial_families():
  listed = load_spec({"family": "serial", "components": [DECIMAL, dict(DECIMAL, k=2)]})
  assert listed.chain.finite and listed.chain.length == 2
  ranged = load_spec({"family": "serial", "template": {"family": "uniform_uniform", "d": 10, "c": 2},
                      "k_start": 2, "k_stop": 4})
  assert ranged.chain.length == 3
  assert ranged.chain.component(0).k == 2
  unbounded = load_spec({"family": "serial", "template": {"family": "uniform_uniform", "d": 10, "c": 2}})
  assert not unbounded.chain.finite
  assert unbounded.chain.component(49).k == 50


@pytest.mark.parametrize("doc,path", [
  ([1, 2], "$"),
  ({"family": "warp"}, "$.family"),
  ({"family": "uniform_uniform", "d": 10, "c": 2}, "$"),
  ({"family": "uniform_uniform", "d": 10, "c": "2", "k": 1}, "$.c"),
  ({"family": "uniform_arbitrary", "d": 4, "target": [[1, 3], [2, 0]], "k": 1}, "$.target[1]"),
  ({"family": "serial", "components": [DECIMAL, dict(DECIMAL, k=0)]}, "$.components[1].k"),
  ({"family": "serial", "components": [{"family": "compose"}]}, "$.components[0].family"),
  ({"family": "compose", "first": DECIMAL, "second": {"family": "biased_uniform", "r": 3}}, "$.second"),
])
def test_errors_carry_json_path(doc, path):
  with pytest.raises(SpecFileError) as info:
    load_spec(doc)
  assert info.value.path == path


def test_family_precondition_becomes_spec_error():
  with pytest.raises(SpecFileError) as info:
    load_spec({"family": "biased_uniform", "r": 5, "k": 2})
  assert info.value.path == "$"


def test_explicit_code_errors():
  doc = {
    "family": "explicit",
    "input": {"probs": [[1, 2], [1, 2]]},
    "output": {"probs": [[1, 2], [1, 2]]},
    "code": [{"in": "0", "out": "0"}, {"in": "2", "out": "1"}],
  }
  with pytest.raises(SpecFileError) as info:
    load_spec(doc)
  assert info.value.path == "$.code[1].in"


def test_unreadable_and_malformed_files(tmp_path):
  with pytest.raises(SpecFileError):
    load_spec_file(str(tmp_path / "missing.json"))
  bad = tmp_path / "bad.json"
  bad.write_text("{not json", encoding="utf-8")
  with pytest.raises(SpecFileError) as info:
    load_spec_file(str(bad))
  assert "line 1" in str(info.value)


def test_dump_explicit_round_trip(tmp_path):
  original = load_spec({"family": "uniform_rational", "d": 4, "numerators": [1, 3], "k": 2}).restart
  doc = dump_explicit(original)
  target = tmp_path / "explicit.json"
  target.write_text(json.dumps(doc), encoding="utf-8")
  reloaded = load_spec_file(str(target)).restart
  assert dict(reloaded.entries()) == dict(original.entries())
  assert epoch_stats(reloaded) == epoch_stats(original)
