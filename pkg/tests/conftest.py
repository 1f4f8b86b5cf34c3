import numpy as np
from hypothesis import settings, strategies as st

from utopian_gap.core import KnownSet, minimal_mask, unknown_coalitions
from utopian_gap.generators import Distribution

settings.register_profile("default", deadline=None, max_examples=60)
settings.load_profile("default")

# factory_exp is left out: it is not superadditive
SUPERADDITIVE_KINDS = (
    "factory", "factory_square", "noisy_factory", "graph", "graph_decreasing",
    "graph_poisson", "totally_monotonic", "symmetric", "unanimity",
)


@st.composite
def games(draw, n=st.integers(2, 5), kinds=SUPERADDITIVE_KINDS):
    """A superadditive game on a random affine scale."""
    n = draw(n)
    g = Distribution(draw(st.sampled_from(kinds)), n).sample(draw(st.integers(0, 2**32 - 1)))
    return g


@st.composite
def known_sets(draw, n):
    pool = unknown_coalitions(n)
    picks = draw(st.lists(st.booleans(), min_size=len(pool), max_size=len(pool)))
    return KnownSet.of(n, [s for s, keep in zip(pool, picks) if keep])


@st.composite
def game_and_known(draw, n=st.integers(2, 5)):
    g = draw(games(n=n))
    return g, draw(known_sets(g.n))


def random_known(rng, n, p=0.3):
    mask = minimal_mask(n)
    pool = np.array(unknown_coalitions(n), dtype=int)
    mask[pool[rng.random(pool.size) < p]] = True
    return KnownSet(n, mask)
