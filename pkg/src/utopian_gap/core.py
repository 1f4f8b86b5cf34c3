"""Games over bitmask-indexed coalitions.

A coalition is an ``int`` whose bit ``i`` is set iff player ``i`` belongs to
it. A game on ``n`` players stores its characteristic function densely as a
float array of length ``2**n`` indexed by that bitmask.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from functools import lru_cache
from typing import Iterable

import numpy as np

MAX_PLAYERS = 16
EPS = 1e-9


class GameError(ValueError):
    """Invalid game or known-set data."""


class DegenerateGame(GameError):
    """The grand coalition is worth exactly the sum of the singletons."""


class MissingMinimalInfo(GameError):
    """A known set lacks the empty set, the grand coalition or a singleton."""


class SizeLimit(GameError):
    """The requested operation is not supported for this many players."""


# -- coalition arithmetic ---------------------------------------------------

def popcount(s: int) -> int:
    return bin(s).count("1")


def grand(n: int) -> int:
    return (1 << n) - 1


def coalition(players: Iterable[int]) -> int:
    """Bitmask of 0-based ``players``."""
    s = 0
    for i in players:
        s |= 1 << int(i)
    return s


def members(s: int) -> list[int]:
    """Sorted 0-based players of ``s``."""
    out = []
    i = 0
    while s:
        if s & 1:
            out.append(i)
        s >>= 1
        i += 1
    return out


def parse_coalition(text: str) -> int:
    """Parse a 1-based player list such as ``"1,2,3"`` or ``"{1,2,3}"``."""
    text = text.strip().strip("{}[]() ")
    if not text:
        return 0
    players = [int(tok) for tok in text.replace(" ", ",").split(",") if tok]
    if any(p < 1 for p in players):
        raise GameError(f"players are 1-based, got {text!r}")
    return coalition(p - 1 for p in players)


def format_coalition(s: int) -> str:
    """1-based rendering, e.g. ``{1,2,3}``."""
    return "{" + ",".join(str(i + 1) for i in members(s)) + "}"


@lru_cache(maxsize=None)
def sizes(n: int) -> np.ndarray:
    """``sizes(n)[S]`` is ``|S|`` for every coalition ``S``."""
    idx = np.arange(1 << n, dtype=np.int64)
    out = np.zeros(1 << n, dtype=np.int64)
    for i in range(n):
        out += (idx >> i) & 1
    out.setflags(write=False)
    return out


@lru_cache(maxsize=None)
def submasks(n: int, t: int) -> np.ndarray:
    """All subsets of ``t`` in increasing order."""
    idx = np.arange(1 << n, dtype=np.int64)
    out = idx[(idx & t) == idx]
    out.setflags(write=False)
    return out


@lru_cache(maxsize=None)
def supersets(n: int, t: int) -> np.ndarray:
    idx = np.arange(1 << n, dtype=np.int64)
    out = idx[(idx & t) == t]
    out.setflags(write=False)
    return out


def minimal_mask(n: int) -> np.ndarray:
    """Boolean mask of the minimal information: empty set, N, singletons."""
    mask = np.zeros(1 << n, dtype=bool)
    mask[0] = mask[grand(n)] = True
    for i in range(n):
        mask[1 << i] = True
    return mask


def unknown_coalitions(n: int) -> list[int]:
    """Coalitions outside the minimal information, ascending by bitmask."""
    base = minimal_mask(n)
    return [s for s in range(1 << n) if not base[s]]


def _check_n(n: int) -> None:
    if not 2 <= n <= MAX_PLAYERS:
        raise SizeLimit(f"player count must be in [2, {MAX_PLAYERS}], got {n}")


# -- games ------------------------------------------------------------------

@dataclass(frozen=True, eq=False)
class Game:
    """Characteristic function on ``n`` players, ``values[S] = v(S)``."""

    n: int
    values: np.ndarray = field(repr=False)

    def __post_init__(self):
        _check_n(self.n)
        values = np.array(self.values, dtype=float)
        if values.shape != (1 << self.n,):
            raise GameError(
                f"expected {1 << self.n} values for n={self.n}, got shape {values.shape}")
        if not np.all(np.isfinite(values)):
            raise GameError("game values must be finite")
        if values[0] != 0.0:
            raise GameError(f"v(empty set) must be 0, got {values[0]}")
        values.setflags(write=False)
        object.__setattr__(self, "values", values)

    @classmethod
    def from_function(cls, n: int, fn) -> "Game":
        """Build from ``fn(S: int) -> float``; ``fn`` is never called on 0."""
        return cls(n, [0.0] + [float(fn(s)) for s in range(1, 1 << n)])

    def __call__(self, s: int) -> float:
        return float(self.values[s])

    def __eq__(self, other):
        if not isinstance(other, Game):
            return NotImplemented
        return self.n == other.n and np.array_equal(self.values, other.values)

    __hash__ = None

    @property
    def singletons(self) -> np.ndarray:
        return self.values[[1 << i for i in range(self.n)]]

    @property
    def grand_value(self) -> float:
        return float(self.values[-1])

    def excess(self) -> np.ndarray:
        """``v(S) - sum_{i in S} v({i})`` for every S."""
        return self.values - additive_values(self.n, self.singletons)

    def to_json(self) -> dict:
        return {"n": self.n, "values": [float(x) for x in self.values]}

    @classmethod
    def from_json(cls, obj: dict) -> "Game":
        try:
            return cls(int(obj["n"]), obj["values"])
        except KeyError as exc:
            raise GameError(f"game JSON is missing field {exc.args[0]!r}") from None


def additive_values(n: int, weights) -> np.ndarray:
    """Values of the additive game ``S -> sum_{i in S} weights[i]``."""
    weights = np.asarray(weights, dtype=float)
    idx = np.arange(1 << n)
    bits = (idx[:, None] >> np.arange(n)) & 1
    return bits @ weights


def unanimity(n: int, t: int) -> Game:
    """``u_T(S) = 1`` iff ``T`` is a subset of ``S``."""
    if t == 0:
        raise GameError("unanimity game needs a nonempty carrier")
    idx = np.arange(1 << n)
    return Game(n, ((idx & t) == t).astype(float))


@dataclass(frozen=True, eq=False)
class KnownSet:
    """Coalitions with revealed values; always contains the minimal information."""

    n: int
    mask: np.ndarray = field(repr=False)

    def __post_init__(self):
        _check_n(self.n)
        mask = np.array(self.mask, dtype=bool)
        if mask.shape != (1 << self.n,):
            raise GameError(
                f"expected {1 << self.n} mask entries for n={self.n}, got shape {mask.shape}")
        if not np.all(mask[minimal_mask(self.n)]):
            raise MissingMinimalInfo(
                "known set must contain the empty set, N and every singleton")
        mask.setflags(write=False)
        object.__setattr__(self, "mask", mask)

    @classmethod
    def minimal(cls, n: int) -> "KnownSet":
        return cls(n, minimal_mask(n))

    @classmethod
    def full(cls, n: int) -> "KnownSet":
        return cls(n, np.ones(1 << n, dtype=bool))

    @classmethod
    def of(cls, n: int, revealed: Iterable[int] = ()) -> "KnownSet":
        mask = minimal_mask(n)
        for s in revealed:
            if not 0 <= s < 1 << n:
                raise GameError(f"coalition {s} out of range for n={n}")
            mask[s] = True
        return cls(n, mask)

    def __contains__(self, s: int) -> bool:
        return bool(self.mask[s])

    def __eq__(self, other):
        if not isinstance(other, KnownSet):
            return NotImplemented
        return self.n == other.n and np.array_equal(self.mask, other.mask)

    __hash__ = None

    def __len__(self):
        return int(self.mask.sum())

    def with_revealed(self, *coalitions: int) -> "KnownSet":
        mask = self.mask.copy()
        for s in coalitions:
            mask[s] = True
        return KnownSet(self.n, mask)

    def revealed(self) -> list[int]:
        """Known coalitions outside the minimal information."""
        extra = self.mask & ~minimal_mask(self.n)
        return [int(s) for s in np.flatnonzero(extra)]

    def unknown(self) -> list[int]:
        return [int(s) for s in np.flatnonzero(~self.mask)]

    def to_json(self) -> dict:
        return {"n": self.n, "mask": [bool(x) for x in self.mask]}

    @classmethod
    def from_json(cls, obj: dict) -> "KnownSet":
        try:
            return cls(int(obj["n"]), obj["mask"])
        except KeyError as exc:
            raise GameError(f"known-set JSON is missing field {exc.args[0]!r}") from None


def load_game(path) -> Game:
    with open(path) as fh:
        return Game.from_json(json.load(fh))


# -- predicates -------------------------------------------------------------

def is_superadditive(g: Game, eps: float = EPS) -> bool:
    """``v(S) + v(T) <= v(S | T)`` for all disjoint S, T."""
    v = g.values
    full = grand(g.n)
    for s in range(1, 1 << g.n):
        t = submasks(g.n, full & ~s)
        if np.any(v[s] + v[t] > v[s | t] + eps):
            return False
    return True


def is_supermodular(g: Game, eps: float = EPS) -> bool:
    """Marginal contributions never decrease as the coalition grows."""
    v = g.values
    idx = np.arange(1 << g.n)
    for i in range(g.n):
        for j in range(i + 1, g.n):
            bi, bj = 1 << i, 1 << j
            s = idx[(idx & (bi | bj)) == 0]
            if np.any(v[s | bj] - v[s] > v[s | bi | bj] - v[s | bi] + eps):
                return False
    return True


def is_additive(g: Game, eps: float = EPS) -> bool:
    return bool(np.all(np.abs(g.excess()) <= eps))


def is_normalized(g: Game, eps: float = EPS) -> bool:
    return bool(np.all(np.abs(g.singletons) <= eps) and abs(g.grand_value - 1.0) <= eps)


# -- strategic equivalence --------------------------------------------------

def normalization_params(values: np.ndarray, n: int):
    """Scale and per-player shifts mapping singletons to 0 and N to 1.

    ``values`` may be batched with shape ``(..., 2**n)``. Returns ``(scale,
    shift)`` with shapes ``(...)`` and ``(..., n)``.
    """
    values = np.asarray(values, dtype=float)
    single = values[..., [1 << i for i in range(n)]]
    essential = values[..., -1] - single.sum(axis=-1)
    if np.any(essential == 0):
        raise DegenerateGame("v(N) equals the sum of singleton values")
    if np.any(essential < 0):
        raise GameError("v(N) is below the sum of singleton values; game is not superadditive")
    scale = 1.0 / essential
    shift = -scale[..., None] * single
    return scale, shift


def strategic_transform(values: np.ndarray, n: int, scale, shift) -> np.ndarray:
    """``scale * v(S) + sum_{i in S} shift_i``, batched like the input."""
    scale = np.asarray(scale, dtype=float)
    shift = np.asarray(shift, dtype=float)
    idx = np.arange(1 << n)
    bits = ((idx[:, None] >> np.arange(n)) & 1).astype(float)
    return scale[..., None] * values + shift @ bits.T


def normalize(g: Game):
    """Return ``(w, scale, shift)`` with ``w({i}) = 0`` and ``w(N) = 1``.

    ``w(S) = scale * v(S) + sum_{i in S} shift[i]``; raises
    :class:`DegenerateGame` for inessential games.
    """
    scale, shift = normalization_params(g.values, g.n)
    w = strategic_transform(g.values, g.n, scale, shift)
    # pin the defining entries so downstream tolerance checks see exact values
    w[[1 << i for i in range(g.n)]] = 0.0
    w[-1] = 1.0
    w[0] = 0.0
    return Game(g.n, w), float(scale), shift
