import pytest

from combspec.generator import GenLimits


@pytest.fixture
def fo2_limits():
    return GenLimits(max_literals=5, max_clauses=2, unary=1, binary=1, max_count=0)


@pytest.fixture
def c2_limits():
    return GenLimits(max_literals=5, max_clauses=2, unary=1, binary=1, max_count=1)
