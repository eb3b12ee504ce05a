import os

# The run ledger binds its engine at import time
os.environ.setdefault("DATABASE_URL", "sqlite:///:memory:")

import pytest

from instanton.core.field import PrimeField, make_rng
from instanton.services.construct import assemble_from_BC, sample_bc, sample_invertible
from instanton.models.pydantic_models import SamplingStrategy

PRIME = 2147483629


@pytest.fixture(scope="session")
def field():
    return PrimeField(PRIME)


@pytest.fixture(scope="session")
def small_field():
    return PrimeField(10007)


@pytest.fixture(scope="session")
def tiny_field():
    return PrimeField(7)


@pytest.fixture
def rng():
    return make_rng(12345)


@pytest.fixture(scope="session")
def invertible_hyperwebs(field):
    """(n, n)-instantons for n = 1, 2, 3"""
    return {n: [sample_invertible(field, n, seed) for seed in range(3)] for n in (1, 2, 3)}


@pytest.fixture(scope="session")
def vacuous_hyperwebs(field):
    """Assembled (n, r) = (2, 1), (3, 2), (4, 3) hyperwebs of charges 3, 4, 5"""
    built = {}
    for n, r in [(2, 1), (3, 2), (4, 3)]:
        built[(n, r)] = [assemble_from_BC(sample_bc(field, n, r, SamplingStrategy.VACUOUS, seed, trials=10))
                         for seed in range(3)]
    return built
