from __future__ import annotations

import pytest

from microarena.knowledge import load_knowledge_base
from microarena.units import default_catalog


@pytest.fixture(scope="session")
def catalog():
    return default_catalog()


@pytest.fixture(scope="session")
def store(catalog):
    return load_knowledge_base(catalog=catalog)
