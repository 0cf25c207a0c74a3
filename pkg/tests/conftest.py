import random

import pytest
from hypothesis import strategies as st

from treedist.generate import random_binary_tree
from treedist.newick import parse_one


@pytest.fixture
def t():
    """Shorthand Newick parser for building fixture trees inline."""
    return parse_one


def tree_strategy(min_leaves=3, max_leaves=16, rooted=True, weighted=False):
    """Hypothesis strategy: seeded random binary trees (shrinks over seed
    and size, which is plenty for structural properties)."""
    return st.builds(
        lambda n, seed: random_binary_tree(
            n, seed=seed, rooted=rooted, weighted=weighted
        ),
        st.integers(min_leaves, max_leaves),
        st.integers(0, 2**20),
    )


def tree_pool(n, count, seed, rooted=True, weighted=False):
    """Deterministic list of random trees over one label set."""
    rng = random.Random(seed)
    return [
        random_binary_tree(n, rng=rng, rooted=rooted, weighted=weighted)
        for _ in range(count)
    ]
