import pytest

from alphabet import Dist
from settings import load_settings


@pytest.fixture(autouse=True)
def fresh_settings():
  load_settings.cache_clear()
  yield
  load_settings.cache_clear()


@pytest.fixture
def fair_bits() -> Dist:
  return Dist.uniform(2)


@pytest.fixture
def decimal_digits() -> Dist:
  return Dist.uniform(10)
