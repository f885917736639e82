import random

import pytest

from repnu.specialize import validate_avoidance_rule


@pytest.fixture(scope="session", autouse=True)
def _specialization_rule_guard():
    # the whole suite leans on the specialization matrices as the oracle,
    # so cross-check them against the generator factorization route first
    validate_avoidance_rule(random.Random(2026))
