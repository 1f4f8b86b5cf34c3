"""Seeded samplers for the game families used in experiments.

Each sampler is a pure function of ``(n, rng, params)``. ``Distribution``
bundles a family with its parameters and draws sample ``j`` from an RNG
derived from ``(seed, j)``, so batches are reproducible regardless of how
they are split.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .core import Game, GameError, sizes, unanimity

KINDS = (
    "factory", "factory_square", "factory_exp", "noisy_factory",
    "graph", "graph_decreasing", "graph_poisson",
    "totally_monotonic", "symmetric", "unanimity",
)


# independent substreams under one user seed
GAME_STREAM, ESTIMATE_STREAM, POLICY_STREAM = 0, 1, 2


def rng_for(seed: int, index: int = 0, stream: int = GAME_STREAM) -> np.random.Generator:
    """PCG64 generator for item ``index`` of ``stream`` under ``seed``."""
    key = (index,) if stream == GAME_STREAM else (stream, index)
    return np.random.Generator(np.random.PCG64(np.random.SeedSequence(seed, spawn_key=key)))


def _owner(n, rng, fixed_owner):
    if fixed_owner is None:
        return int(rng.integers(n))
    if not 0 <= fixed_owner < n:
        raise GameError(f"owner {fixed_owner} out of range for n={n}")
    return int(fixed_owner)


def factory_game(n: int, owner: int) -> Game:
    """``|S| - 1`` if the owner is in S, else 0."""
    size = sizes(n)
    has = (np.arange(1 << n) >> owner) & 1
    return Game(n, np.where(has == 1, size - 1, 0).astype(float))


def sample_factory(n: int, seed: int, fixed_owner: int | None = None) -> Game:
    """Owner uniform over players unless ``fixed_owner`` is given."""
    return Distribution("factory", n, _owner_param(fixed_owner)).sample(seed)


def factory_variant_game(kind: str, n: int, owner: int, productivity=None) -> Game:
    size = sizes(n)
    has = ((np.arange(1 << n) >> owner) & 1) == 1
    if kind == "factory_square":
        values = np.where(has, (size - 1.0) ** 2, 0.0)
    elif kind == "factory_exp":
        values = np.where(has, np.exp(size - 1.0), 1.0)
        values[0] = 0.0
    elif kind == "noisy_factory":
        p = np.array(productivity, dtype=float)
        p[owner] = 0.0
        bits = (np.arange(1 << n)[:, None] >> np.arange(n)) & 1
        values = np.where(has, bits @ p, 0.0)
    else:
        raise GameError(f"unknown factory variant {kind!r}")
    return Game(n, values)


def sample_factory_variant(kind: str, n: int, seed: int, fixed_owner: int | None = None) -> Game:
    if kind not in ("factory_square", "factory_exp", "noisy_factory"):
        raise GameError(f"unknown factory variant {kind!r}")
    return Distribution(kind, n, _owner_param(fixed_owner)).sample(seed)


def _owner_param(fixed_owner):
    return {} if fixed_owner is None else {"fixed_owner": fixed_owner}


def graph_game(weights) -> Game:
    """Total weight of the edges inside each coalition."""
    w = np.asarray(weights, dtype=float)
    n = w.shape[0]
    upper = np.triu(w, 1)
    bits = ((np.arange(1 << n)[:, None] >> np.arange(n)) & 1).astype(float)
    return Game(n, np.einsum("si,ij,sj->s", bits, upper, bits))


def _edge_weights(kind: str, n: int, rng: np.random.Generator) -> np.ndarray:
    m = n * (n - 1) // 2
    if kind == "graph":
        draws = rng.uniform(0.0, 1.0, size=m)
    elif kind == "graph_decreasing":
        # inverse CDF of the density 2 - 2x on [0, 1]
        draws = 1.0 - np.sqrt(1.0 - rng.uniform(0.0, 1.0, size=m))
    elif kind == "graph_poisson":
        draws = rng.poisson(1.0, size=m).astype(float)
    else:
        raise GameError(f"unknown graph kind {kind!r}")
    w = np.zeros((n, n))
    w[np.triu_indices(n, 1)] = draws
    return w + w.T


def sample_graph(kind: str, n: int, seed: int) -> Game:
    if not kind.startswith("graph"):
        raise GameError(f"unknown graph kind {kind!r}")
    return Distribution(kind, n).sample(seed)


def from_mobius(n: int, coefficients) -> Game:
    """Game whose Mobius coefficients (unanimity weights) are ``coefficients``."""
    v = np.array(coefficients, dtype=float)
    idx = np.arange(1 << n)
    for i in range(n):
        bit = 1 << i
        hi = idx[(idx & bit) != 0]
        v[hi] += v[hi ^ bit]
    return Game(n, v)


def _tm_coefficients(n, rng, density):
    if not 0.0 < density <= 1.0:
        raise GameError(f"density must be in (0, 1], got {density}")
    eligible = np.flatnonzero(sizes(n) >= 2)
    coef = np.zeros(1 << n)
    chosen = rng.random(eligible.size) < density
    if not chosen.any():
        chosen[rng.integers(eligible.size)] = True
    coef[eligible[chosen]] = rng.uniform(0.0, 1.0, size=int(chosen.sum()))
    return coef


def sample_totally_monotonic(n: int, seed: int, density: float = 1.0) -> Game:
    """Nonnegative random combination of unanimity games on coalitions of size >= 2."""
    return Distribution("totally_monotonic", n, {"density": density}).sample(seed)


def symmetric_game(levels) -> Game:
    """Symmetric game with ``v(S) = levels[|S|]``; ``levels[0]`` must be 0."""
    levels = np.asarray(levels, dtype=float)
    n = levels.size - 1
    return Game(n, levels[sizes(n)])


def _symmetric_levels(n, rng):
    s = np.zeros(n + 1)
    for k in range(2, n + 1):
        s[k] = max(s[j] + s[k - j] for j in range(1, k)) + rng.uniform(0.0, 1.0)
    return s


def sample_symmetric(n: int, seed: int) -> Game:
    """Each size level exceeds its best split by a Uniform(0, 1) increment."""
    return Distribution("symmetric", n).sample(seed)


def sample_unanimity(n: int, seed: int) -> Game:
    return Distribution("unanimity", n).sample(seed)


_PARAMS = {
    "factory": {"fixed_owner"},
    "factory_square": {"fixed_owner"},
    "factory_exp": {"fixed_owner"},
    "noisy_factory": {"fixed_owner"},
    "totally_monotonic": {"density"},
}


@dataclass(frozen=True)
class Distribution:
    """A named game family on ``n`` players with its parameters."""

    kind: str
    n: int
    params: dict = field(default_factory=dict)

    def __post_init__(self):
        if self.kind not in KINDS:
            raise GameError(f"unknown distribution kind {self.kind!r}; expected one of {KINDS}")
        extra = set(self.params) - _PARAMS.get(self.kind, set())
        if extra:
            raise GameError(f"unexpected parameters for {self.kind}: {sorted(extra)}")

    def draw(self, rng: np.random.Generator) -> Game:
        n, kind, p = self.n, self.kind, self.params
        if kind == "factory":
            return factory_game(n, _owner(n, rng, p.get("fixed_owner")))
        if kind in ("factory_square", "factory_exp", "noisy_factory"):
            owner = _owner(n, rng, p.get("fixed_owner"))
            prod = rng.uniform(0.0, 1.0, size=n) if kind == "noisy_factory" else None
            return factory_variant_game(kind, n, owner, prod)
        if kind.startswith("graph"):
            return graph_game(_edge_weights(kind, n, rng))
        if kind == "totally_monotonic":
            return from_mobius(n, _tm_coefficients(n, rng, p.get("density", 1.0)))
        if kind == "symmetric":
            return symmetric_game(_symmetric_levels(n, rng))
        return unanimity(n, int(rng.choice(np.flatnonzero(sizes(n) >= 2))))

    def sample(self, seed: int, index: int = 0, stream: int = GAME_STREAM) -> Game:
        return self.draw(rng_for(seed, index, stream))

    def sample_values(self, count: int, seed: int, stream: int = GAME_STREAM) -> np.ndarray:
        """Stacked values of samples ``0 .. count-1``, shape ``(count, 2**n)``."""
        return np.stack([self.sample(seed, j, stream).values for j in range(count)])

    def to_json(self) -> dict:
        return {"kind": self.kind, "n": self.n, "params": dict(self.params)}


def sample_values(source, count: int, seed: int, stream: int = GAME_STREAM) -> np.ndarray:
    """``count`` samples from a Distribution, or copies of a fixed Game."""
    if isinstance(source, Game):
        return np.broadcast_to(source.values, (count, source.values.size)).copy()
    return source.sample_values(count, seed, stream)


def n_players(source) -> int:
    return source.n
