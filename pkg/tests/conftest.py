import numpy as np
import pytest

from corrtherm import Dist


@pytest.fixture
def rng():
    return np.random.default_rng(20240817)


def random_dist(rng, dim, full_rank=True):
    """Random point on the simplex; optionally with a forced zero entry."""
    v = rng.dirichlet(np.ones(dim))
    if full_rank:
        v = 0.95 * v + 0.05 / dim
    else:
        v[rng.integers(dim)] = 0.0
    v = v / v.sum()
    return Dist(v.tolist())


def random_rational_dist(rng, dim, denom=60):
    """Exact-rational random distribution with positive entries."""
    from fractions import Fraction

    counts = rng.integers(1, denom, size=dim)
    total = int(counts.sum())
    return Dist([Fraction(int(c), total) for c in counts])
