import sys
from pathlib import Path

import pytest

sys.path.insert(0, str(Path(__file__).parent))

from oracles import simple_sieve  # noqa: E402


@pytest.fixture(scope="session")
def primes_1e5() -> list[int]:
    return simple_sieve(100_000)


@pytest.fixture(scope="session")
def prime_set_1e5(primes_1e5) -> set[int]:
    return set(primes_1e5)


@pytest.fixture(scope="session")
def data_dir() -> Path:
    return Path(__file__).parent / "data"
