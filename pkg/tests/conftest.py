import os
import random

import pytest

# One seed governs every randomized property run; override via EQUIBUNDLE_SEED.
DEFAULT_SEED = 20260810


def make_rng(salt: int = 0) -> random.Random:
    return random.Random(int(os.environ.get("EQUIBUNDLE_SEED", DEFAULT_SEED)) + salt)


@pytest.fixture
def rng():
    return make_rng()
