import sys
from pathlib import Path

import numpy as np
import pytest

sys.path.insert(0, str(Path(__file__).parent))

from epitau import (CliqueParams, PolyParams, build_clique_layer,
                    build_household_layer, build_polynomial_layer)


@pytest.fixture
def rng():
    return np.random.default_rng(12345)


@pytest.fixture
def clique_graph(rng):
    """n=900 divides by both N_hh=5 and N_wp=9: no leftover vertices."""
    g = build_household_layer(900, 5)
    return build_clique_layer(g, CliqueParams(N_wp=9, w=0.4), rng)


@pytest.fixture
def poly_graph(rng):
    g = build_household_layer(1000, 5)
    return build_polynomial_layer(g, PolyParams(0.0, 0.7, 0.3, m=4, n0=50), 0.4, rng)


def pair_set(edges):
    return {(min(u, v), max(u, v)) for u, v in edges.tolist()}
