import random
from collections import Counter
from pathlib import Path

import pytest

from conjsig.ledger import FactorLedger
from conjsig.platform_group import PlatformDescriptor
from conjsig.signature_core import PrivateKey, Profile, PublicKey, setup

FIXED_TIME = 1_700_000_000


@pytest.fixture()
def toy_profile() -> Profile:
    return Profile.from_name("toy")


@pytest.fixture()
def desc(toy_profile: Profile) -> PlatformDescriptor:
    return toy_profile.descriptor


@pytest.fixture()
def rng() -> random.Random:
    return random.Random(20240611)


@pytest.fixture()
def ledger_path(tmp_path: Path) -> Path:
    return tmp_path / "conjsig.ledger"


@pytest.fixture()
def ledger(ledger_path: Path) -> FactorLedger:
    return FactorLedger.load(ledger_path, clock=lambda: FIXED_TIME)


@pytest.fixture()
def keys(toy_profile: Profile, rng: random.Random) -> tuple[PublicKey, PrivateKey]:
    return setup(toy_profile.descriptor, toy_profile.hash_params, toy_profile, rng)


def assert_uniform(values: list[int], low: int, high: int) -> None:
    """Every value in [low, high] occurs within 5 sigma of its binomial expectation."""
    counts = Counter(values)
    assert set(counts) <= set(range(low, high + 1))
    p = 1 / (high - low + 1)
    expected = len(values) * p
    sigma = (len(values) * p * (1 - p)) ** 0.5
    for value in range(low, high + 1):
        assert abs(counts[value] - expected) <= 5 * sigma, (value, counts[value])
