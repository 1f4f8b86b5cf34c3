"""Lower and upper games bounding every superadditive extension.

The lower game takes the best partition of a coalition into known parts;
the upper game takes the tightest known superset minus the lower value of
the remainder. Both routines accept values batched along leading axes, so
many games sharing one known set are bounded in a single pass.
"""

from __future__ import annotations

from dataclasses import dataclass
from functools import lru_cache

import numpy as np

from .core import (
    EPS, Game, GameError, KnownSet, MissingMinimalInfo, minimal_mask, sizes, submasks,
    supersets,
)


class NotNormalized(GameError):
    """Bounds are only defined here for normalized games."""


@dataclass(frozen=True)
class BoundsPair:
    lower: np.ndarray
    upper: np.ndarray

    @property
    def delta(self) -> np.ndarray:
        return self.upper - self.lower


@lru_cache(maxsize=None)
def _layers(n: int) -> tuple:
    """Coalitions grouped by size, as int arrays, sizes 1..n."""
    size = sizes(n)
    idx = np.arange(1 << n)
    return tuple(idx[size == k] for k in range(1, n + 1))


def lower_values(values: np.ndarray, mask: np.ndarray, n: int) -> np.ndarray:
    """Best partition into known parts, for values of shape ``(..., 2**n)``.

    Coalitions are filled in increasing size, so the remainder ``S - T`` is
    final whenever a known ``T`` is peeled off ``S``. A 2-D ``mask`` gives one
    known set per row of ``values``.
    """
    mask = np.asarray(mask, dtype=bool)
    if not np.all(mask[..., minimal_mask(n)]):
        raise MissingMinimalInfo(
            "known set must contain the empty set, N and every singleton")
    values = np.asarray(values, dtype=float)
    if mask.ndim > 1:
        return _lower_per_row(values, mask, n)
    low = np.full(values.shape, -np.inf)
    low[..., 0] = 0.0
    known = [int(t) for t in np.flatnonzero(mask) if t]
    for k, layer in enumerate(_layers(n), start=1):
        for t in known:
            if bin(t).count("1") > k:
                continue
            s = layer[(layer & t) == t]
            if s.size:
                cand = values[..., t, None] + low[..., s ^ t]
                low[..., s] = np.maximum(low[..., s], cand)
    return low


def _lower_per_row(values, mask, n):
    # unknown parts contribute -inf, so every T can be tried on every row
    values = np.broadcast_to(values, mask.shape)
    pieces = np.where(mask, values, -np.inf)
    low = np.full(mask.shape, -np.inf)
    low[..., 0] = 0.0
    size = sizes(n)
    for k, layer in enumerate(_layers(n), start=1):
        for t in range(1, 1 << n):
            if size[t] > k:
                continue
            s = layer[(layer & t) == t]
            if s.size:
                cand = pieces[..., t, None] + low[..., s ^ t]
                low[..., s] = np.maximum(low[..., s], cand)
    return low


def upper_values(values: np.ndarray, mask: np.ndarray, low: np.ndarray, n: int) -> np.ndarray:
    """``min over known T >= S of v(T) - lower(T - S)``, batched like ``values``."""
    values = np.asarray(values, dtype=float)
    mask = np.asarray(mask, dtype=bool)
    if mask.ndim > 1:
        values = np.broadcast_to(values, mask.shape)
        tops = np.where(mask, values, np.inf)
        known = range(1 << n)
    else:
        tops = values
        known = np.flatnonzero(mask)
    up = np.full(np.broadcast_shapes(values.shape, mask.shape), np.inf)
    for t in known:
        s = submasks(n, int(t))
        cand = tops[..., t, None] - low[..., s ^ t]
        up[..., s] = np.minimum(up[..., s], cand)
    return up


def _require_normalized(values: np.ndarray, n: int, eps: float = EPS) -> None:
    single = values[..., [1 << i for i in range(n)]]
    if np.any(np.abs(single) > eps) or np.any(np.abs(values[..., -1] - 1.0) > eps):
        raise NotNormalized("bounds need singletons at 0 and v(N) at 1; normalize first")


def lower_game(g: Game, k: KnownSet) -> np.ndarray:
    _require_normalized(g.values, g.n)
    return lower_values(g.values, k.mask, g.n)


def upper_game(g: Game, k: KnownSet, lower: np.ndarray) -> np.ndarray:
    return upper_values(g.values, k.mask, lower, g.n)


def bounds(g: Game, k: KnownSet) -> BoundsPair:
    if g.n != k.n:
        raise GameError(f"game has {g.n} players but known set has {k.n}")
    low = lower_game(g, k)
    return BoundsPair(low, upper_game(g, k, low))


def delta(bp: BoundsPair) -> np.ndarray:
    return bp.delta


def extension_at(bp: BoundsPair, n: int, s: int) -> np.ndarray:
    """Upper bound on supersets of ``s``, lower bound elsewhere.

    ``s = N`` gives the lower game; ``s = {i}`` gives player i's utopian game.
    """
    out = bp.lower.copy()
    sup = supersets(n, s)
    out[sup] = bp.upper[sup]
    return out
