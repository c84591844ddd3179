from __future__ import annotations

import pytest

from eeorder.fixtures import ToyLanguage, toy_language
from eeorder.phonology import LanguageProfile, load_profile


@pytest.fixture(scope="session")
def hmong() -> LanguageProfile:
    return load_profile("hmong")


@pytest.fixture(scope="session")
def lahu() -> LanguageProfile:
    return load_profile("lahu")


@pytest.fixture(scope="session")
def toy() -> ToyLanguage:
    return toy_language(seed=3)
