"""Shapley values, utopian games and the cumulative utopian gap.

Every public gap function accepts games on their own scale: the game is
normalized internally and the result mapped back, so gaps scale linearly
with the game.
"""

from __future__ import annotations

from functools import lru_cache
from math import factorial

import numpy as np

from .bounds import BoundsPair, extension_at, lower_values, upper_values
from .core import EPS, Game, GameError, KnownSet, normalization_params, sizes, strategic_transform


@lru_cache(maxsize=None)
def gap_weights(n: int) -> np.ndarray:
    """``|S|! (n - |S|)! / n!`` for every coalition ``S``."""
    by_size = np.array([factorial(k) * factorial(n - k) / factorial(n) for k in range(n + 1)])
    out = by_size[sizes(n)]
    out.setflags(write=False)
    return out


@lru_cache(maxsize=None)
def _shapley_tables(n: int):
    idx = np.arange(1 << n)
    size = sizes(n)
    weight = np.array([factorial(k) * factorial(n - k - 1) / factorial(n) for k in range(n)])
    tables = []
    for i in range(n):
        s = idx[(idx >> i) & 1 == 0]
        tables.append((s, s | (1 << i), weight[size[s]]))
    return tables


def shapley_values(values: np.ndarray, n: int) -> np.ndarray:
    """Shapley value of batched games, shape ``(..., 2**n) -> (..., n)``."""
    values = np.asarray(values, dtype=float)
    out = np.empty(values.shape[:-1] + (n,))
    for i, (without, with_i, w) in enumerate(_shapley_tables(n)):
        out[..., i] = (values[..., with_i] - values[..., without]) @ w
    return out


def shapley(g: Game) -> np.ndarray:
    return shapley_values(g.values, g.n)


# -- bounds on the game's own scale ------------------------------------------

def _scaled_bounds(values: np.ndarray, mask: np.ndarray, n: int):
    """Bounds for batched games in their original scale, plus the gap scale.

    Inessential rows (``v(N)`` equal to the singleton sum) are additive when
    superadditive, so their bounds collapse onto the game itself.
    """
    values = np.asarray(values, dtype=float)
    single = values[..., [1 << i for i in range(n)]]
    essential = values[..., -1] - single.sum(axis=-1)
    if np.any(essential < -EPS):
        raise GameError("v(N) is below the sum of singleton values; game is not superadditive")
    flat = np.abs(essential) <= EPS * np.maximum(1.0, np.abs(values[..., -1]))
    safe = np.where(flat[..., None], _unit_game(n), values)
    scale, shift = normalization_params(safe, n)
    w = strategic_transform(safe, n, scale, shift)
    w[..., [1 << i for i in range(n)]] = 0.0
    w[..., -1] = 1.0
    w_low = lower_values(w, mask, n)
    w_up = upper_values(w, mask, w_low, n)
    # invert w = scale * v + shift . bits
    def back(x):
        return strategic_transform(x, n, 1.0 / scale, -shift / scale[..., None])

    low, up = back(w_low), back(w_up)
    low = np.where(flat[..., None], values, low)
    up = np.where(flat[..., None], values, up)
    inv_scale = np.where(flat, 0.0, 1.0 / scale)
    return low, up, w_up - w_low, inv_scale


@lru_cache(maxsize=None)
def _unit_game(n: int) -> np.ndarray:
    out = np.zeros(1 << n)
    out[-1] = 1.0
    return out


def game_bounds(g: Game, k: KnownSet) -> BoundsPair:
    """Lower and upper games of ``(g, k)`` on ``g``'s own scale."""
    _check_pair(g, k)
    low, up, _, _ = _scaled_bounds(g.values, k.mask, g.n)
    for arr in (low, up):
        arr[k.mask] = g.values[k.mask]
    return BoundsPair(low, up)


def _check_pair(g: Game, k: KnownSet) -> None:
    if g.n != k.n:
        raise GameError(f"game has {g.n} players but known set has {k.n}")


def utopian_game(g: Game, k: KnownSet, i: int) -> Game:
    """Upper bound on coalitions containing ``i``, lower bound elsewhere."""
    if not 0 <= i < g.n:
        raise GameError(f"player {i} out of range for n={g.n}")
    return Game(g.n, extension_at(game_bounds(g, k), g.n, 1 << i))


def gap_batch(values: np.ndarray, mask: np.ndarray, n: int, normalized: bool = False) -> np.ndarray:
    """Closed-form gap for batched games sharing one known set.

    With ``normalized=True`` the gap of each game's normalization is returned
    instead (0 for inessential games).
    """
    _, _, w_delta, inv_scale = _scaled_bounds(values, mask, n)
    out = w_delta @ gap_weights(n)
    if normalized:
        return np.where(inv_scale == 0.0, 0.0, out)
    return inv_scale * out


def gap_closed_form(g: Game, k: KnownSet) -> float:
    """Weighted sum of bound widths, ``sum_S |S|!(n-|S|)!/n! * delta(S)``."""
    _check_pair(g, k)
    return float(gap_batch(g.values, k.mask, g.n))


def gap_definitional(g: Game, k: KnownSet) -> float:
    """Sum of each player's Shapley payoff in their utopian game, minus v(N)."""
    _check_pair(g, k)
    total = sum(shapley(utopian_game(g, k, i))[i] for i in range(g.n))
    return float(total - g.grand_value)


def gap(g: Game, k: KnownSet) -> float:
    return gap_closed_form(g, k)


def gap_delta_quad(g: Game, k_base: KnownSet, s: int, z: int) -> float:
    """``G(K+S+Z) - G(K+S) - G(K+Z) + G(K)``; negative values break supermodularity."""
    _check_pair(g, k_base)
    if s == z:
        raise GameError("the two revealed coalitions must differ")
    if s in k_base or z in k_base:
        raise GameError("revealed coalitions must be unknown in the base set")
    masks = np.stack([
        k_base.with_revealed(s, z).mask,
        k_base.with_revealed(s).mask,
        k_base.with_revealed(z).mask,
        k_base.mask,
    ])
    g_sz, g_s, g_z, g_0 = (gap_batch(g.values, m, g.n) for m in masks)
    return float(g_sz - g_s - g_z + g_0)
