from functools import lru_cache

import pytest

from ncca.engine import enumerate_catalog
from ncca.neighborhood import StateSet


@lru_cache(maxsize=None)
def _catalog(d, qstar):
    return tuple(enumerate_catalog(d, StateSet.upto(qstar)))


@pytest.fixture(scope="session")
def catalog():
    """``catalog(d, qstar)`` -> tuple of CatalogEntry, computed once per session."""
    return _catalog
