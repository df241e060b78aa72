import pytest

from algebra.abelian_group import make_group
from algebra.automorphisms import enumerate_monoid_automorphisms
from algebra.power_monoid import make_context
from utils.settings import get_settings

# Every abelian group of order <= 9 except the trivial one.
SMALL_GROUPS = [
    (2,), (3,), (4,), (2, 2), (5,), (6,), (7,), (8,), (2, 4), (2, 2, 2), (9,), (3, 3),
]


@pytest.fixture
def ctx_of():
    """Build (cached) power monoid contexts from a factor list."""

    def build(*factors: int):
        return make_context(make_group(factors))

    return build


@pytest.fixture(scope="session")
def automorphisms_of():
    cache = {}

    def build(*factors: int):
        if factors not in cache:
            cache[factors] = enumerate_monoid_automorphisms(make_context(make_group(factors)))
        return cache[factors]

    return build


@pytest.fixture
def env(monkeypatch):
    """monkeypatch for POWMON_* variables, with the settings cache reset around the test."""
    get_settings.cache_clear()
    yield monkeypatch
    get_settings.cache_clear()
