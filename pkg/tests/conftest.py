from __future__ import annotations

from pathlib import Path

import pytest

from chainshare.descriptor import parse_chain_descriptor

FIXTURES = Path(__file__).parent / "fixtures"


@pytest.fixture(scope="session")
def mini_path() -> Path:
    return FIXTURES / "mini.json"


@pytest.fixture(scope="session")
def listing_path() -> Path:
    return FIXTURES / "listing1.json"


@pytest.fixture(scope="session")
def badquota_path() -> Path:
    return FIXTURES / "badquota.json"


@pytest.fixture()
def mini_chain(mini_path):
    return parse_chain_descriptor(mini_path.read_bytes())


@pytest.fixture()
def listing_chain(listing_path):
    return parse_chain_descriptor(listing_path.read_bytes())
