"""Shared fixtures: reference distributions and seeded random generators."""

from fractions import Fraction

import numpy as np
import pytest

from coordbounds import build_distribution


@pytest.fixture(scope="session")
def example_dist():
    """Equal mass on (0,0), (0,1), (1,0): the running worked example."""
    third = Fraction(1, 3)
    return build_distribution(
        [0, 1], [0, 1], [((0, 0), third), ((0, 1), third), ((1, 0), third)]
    )


@pytest.fixture(scope="session")
def product_dist():
    """Independent pair: zero coordination variance."""
    entries = []
    p_u = [Fraction(1, 2), Fraction(1, 2)]
    p_v = [Fraction(1, 4), Fraction(3, 4)]
    for u in (0, 1):
        for v in (0, 1):
            entries.append((((u, v)), p_u[u] * p_v[v]))
    return build_distribution([0, 1], [0, 1], entries)


@pytest.fixture(scope="session")
def point_mass_dist():
    return build_distribution([0, 1], [0, 1], [((0, 0), Fraction(1))])


@pytest.fixture(scope="session")
def identity_dist():
    """Uniform input copied to the output: one bit, constant divergence."""
    half = Fraction(1, 2)
    return build_distribution([0, 1], [0, 1], [((0, 0), half), ((1, 1), half)])


def random_joint(rng: np.random.Generator, nu: int, nv: int, allow_zeros: bool = True):
    """Random exact-rational joint distribution on an nu x nv alphabet."""
    while True:
        low = 0 if allow_zeros else 1
        weights = rng.integers(low, 10, size=(nu, nv))
        total = int(weights.sum())
        if total == 0:
            continue
        entries = [
            ((u, v), Fraction(int(weights[u, v]), total))
            for u in range(nu)
            for v in range(nv)
            if weights[u, v] > 0
        ]
        return build_distribution(list(range(nu)), list(range(nv)), entries)
