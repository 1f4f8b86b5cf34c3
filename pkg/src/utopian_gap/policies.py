"""Coalition-revelation strategies and trajectory execution.

All gaps here are measured on normalized games, so games of different
scale contribute equally to averages. ``source`` arguments accept either a
:class:`~utopian_gap.generators.Distribution` or a fixed :class:`Game`
(a point mass).
"""

from __future__ import annotations

from dataclasses import dataclass, field
from itertools import combinations

import numpy as np

from .core import Game, GameError, KnownSet, SizeLimit, grand, minimal_mask, sizes, unknown_coalitions
from .gap import gap_batch
from .generators import ESTIMATE_STREAM, POLICY_STREAM, rng_for, sample_values

OPTIMAL_MAX_PLAYERS = 5
TIE_TOL = 1e-12
POLICY_NAMES = (
    "random", "offline-greedy", "offline-optimal", "oracle-greedy", "oracle-optimal",
    "largest-first",
)


class BudgetInfeasible(GameError):
    """More coalitions requested than there are unknown ones."""


class HiddenValue(GameError):
    """A policy asked for the value of a coalition it has not seen."""


def default_kappa(n: int) -> int:
    return 100 if n <= 4 else 10


def _check_budget(n: int, t: int) -> None:
    limit = (1 << n) - (n + 2)
    if not 0 <= t <= limit:
        raise BudgetInfeasible(f"budget {t} outside [0, {limit}] for n={n}")


def _mask(n: int, revealed) -> np.ndarray:
    mask = minimal_mask(n)
    mask[list(revealed)] = True
    return mask


@dataclass
class Trajectory:
    """Revealed coalitions in order, with ``gaps[k]`` the gap after ``k`` reveals."""

    revealed: list = field(default_factory=list)
    gaps: list = field(default_factory=list)


# -- expectation over a source -----------------------------------------------

class GapEstimator:
    """Mean normalized gap over a fixed sample of games, memoized per revealed set."""

    def __init__(self, source, kappa: int = 1, seed: int = 0):
        if kappa < 1:
            raise GameError(f"kappa must be >= 1, got {kappa}")
        self.n = source.n
        kappa = 1 if isinstance(source, Game) else kappa
        self.values = sample_values(source, kappa, seed, ESTIMATE_STREAM)
        self._cache = {}

    def __call__(self, revealed) -> float:
        key = frozenset(revealed)
        if key not in self._cache:
            self._cache[key] = float(gap_batch(self.values, _mask(self.n, key), self.n,
                                               normalized=True).mean())
        return self._cache[key]

    def many(self, revealed_sets, chunk: int = 2048) -> np.ndarray:
        """Scores of many revealed sets, batched over per-row masks."""
        keys = [frozenset(r) for r in revealed_sets]
        todo = list(dict.fromkeys(k for k in keys if k not in self._cache))
        base = minimal_mask(self.n)
        for start in range(0, len(todo), chunk):
            part = todo[start:start + chunk]
            masks = np.broadcast_to(base, (len(part), base.size)).copy()
            for row, key in enumerate(part):
                masks[row, list(key)] = True
            total = np.zeros(len(part))
            for game in self.values:
                total += gap_batch(game, masks, self.n, normalized=True)
            self._cache.update(zip(part, (total / len(self.values)).tolist()))
        return np.array([self._cache[k] for k in keys])


def expected_gap(source, revealed, kappa: int = 1, seed: int = 0) -> float:
    """Mean normalized gap over ``kappa`` seeded samples once ``revealed`` is known."""
    return GapEstimator(source, kappa, seed)(revealed)


def _argmin(candidates, score, key=lambda c: c):
    """First candidate whose score beats all earlier ones by more than TIE_TOL."""
    candidates = list(candidates)
    if hasattr(score, "many"):
        vals = score.many([key(c) for c in candidates])
    else:
        vals = [score(key(c)) for c in candidates]
    best, best_val = None, np.inf
    for c, val in zip(candidates, vals):
        if val < best_val - TIE_TOL:
            best, best_val = c, val
    return best, best_val


def greedy_sequence(score, n: int, t: int) -> list[int]:
    """Extend the prefix one coalition at a time by the minimizer of ``score``."""
    _check_budget(n, t)
    chosen: list[int] = []
    for _ in range(t):
        taken = set(chosen)
        rest = [s for s in unknown_coalitions(n) if s not in taken]
        best, _ = _argmin(rest, score, key=lambda s: chosen + [s])
        chosen.append(best)
    return chosen


def optimal_set(score, n: int, t: int) -> list[int]:
    """Size-``t`` subset of unknown coalitions minimizing ``score``.

    Subsets are scanned in lexicographic order of their sorted bitmasks, so
    ties resolve to the lexicographically smallest one.
    """
    if n > OPTIMAL_MAX_PLAYERS:
        raise SizeLimit(f"exhaustive subset search is limited to n <= {OPTIMAL_MAX_PLAYERS}")
    _check_budget(n, t)
    best, _ = _argmin(combinations(unknown_coalitions(n), t), score)
    return list(best)


def offline_optimal(source, t: int, kappa: int | None = None, seed: int = 0) -> list[int]:
    kappa = default_kappa(source.n) if kappa is None else kappa
    if source.n > OPTIMAL_MAX_PLAYERS:
        raise SizeLimit(f"exhaustive subset search is limited to n <= {OPTIMAL_MAX_PLAYERS}")
    return optimal_set(GapEstimator(source, kappa, seed), source.n, t)


def offline_greedy(source, t: int, kappa: int | None = None, seed: int = 0) -> list[int]:
    kappa = default_kappa(source.n) if kappa is None else kappa
    return greedy_sequence(GapEstimator(source, kappa, seed), source.n, t)


def oracle_optimal(g: Game, t: int) -> list[int]:
    return optimal_set(GapEstimator(g), g.n, t)


def oracle_greedy(g: Game, t: int) -> list[int]:
    return greedy_sequence(GapEstimator(g), g.n, t)


def optimal_sweep(score, n: int, t_max: int) -> list[list[int]]:
    """Optimal subsets for every budget ``0 .. t_max``, sharing ``score``'s memo."""
    return [optimal_set(score, n, t) for t in range(t_max + 1)]


def random_policy(n: int, t: int, seed: int = 0) -> list[int]:
    """Uniform draw without replacement from the unknown coalitions."""
    _check_budget(n, t)
    pool = unknown_coalitions(n)
    order = rng_for(seed, 0, POLICY_STREAM).permutation(len(pool))[:t]
    return [pool[i] for i in order]


def largest_first(n: int, t: int) -> list[int]:
    """Unknown coalitions by decreasing size, ties by ascending bitmask."""
    _check_budget(n, t)
    size = sizes(n)
    return sorted(unknown_coalitions(n), key=lambda s: (-size[s], s))[:t]


# -- online execution ---------------------------------------------------------

class MaskedGame:
    """Read-only view exposing only the values of known coalitions."""

    def __init__(self, game: Game, known: KnownSet):
        self.n = game.n
        self._game = game
        self.known = known

    def value(self, s: int) -> float:
        if s not in self.known:
            raise HiddenValue(f"value of coalition {s} has not been revealed")
        return self._game(s)


class Policy:
    """Chooses the next coalition from what has been revealed so far.

    ``start`` is called once per trajectory. Policies with ``oracle = True``
    receive the full game in ``choose``; all others receive a
    :class:`MaskedGame`.
    """

    name = "policy"
    oracle = False

    def start(self, n: int, t: int, rng: np.random.Generator) -> None:
        pass

    def choose(self, view, known: KnownSet) -> int:
        raise NotImplementedError


class SequencePolicy(Policy):
    """Replays a precomputed order of coalitions, skipping those already known."""

    def __init__(self, name: str, sequence):
        self.name = name
        self.sequence = list(sequence)

    def choose(self, view, known):
        for s in self.sequence:
            if s not in known:
                return s
        raise BudgetInfeasible(f"{self.name} has no coalitions left to reveal")


class RandomPolicy(Policy):
    name = "random"

    def start(self, n, t, rng):
        self.rng = rng

    def choose(self, view, known):
        return int(self.rng.choice(known.unknown()))


class LargestFirst(Policy):
    name = "largest-first"

    def choose(self, view, known):
        size = sizes(known.n)
        return min(known.unknown(), key=lambda s: (-size[s], s))


class OracleGreedy(Policy):
    name = "oracle-greedy"
    oracle = True

    def choose(self, game, known):
        score = GapEstimator(game)
        base = known.revealed()
        best, _ = _argmin(known.unknown(), score, key=lambda s: base + [s])
        return best


class OracleOptimal(Policy):
    """Reveals the oracle-optimal size-``t`` set in ascending bitmask order."""

    name = "oracle-optimal"
    oracle = True

    def start(self, n, t, rng):
        self.t = t
        self._plan = None

    def choose(self, game, known):
        if self._plan is None:
            self._plan = oracle_optimal(game, self.t)
        return next(s for s in self._plan if s not in known)


def make_policy(name: str, source=None, t: int = 0, kappa: int | None = None,
                seed: int = 0) -> Policy:
    """Instantiate a policy by CLI name; offline ones are fitted to ``source`` here."""
    if name == "random":
        return RandomPolicy()
    if name == "largest-first":
        return LargestFirst()
    if name == "oracle-greedy":
        return OracleGreedy()
    if name == "oracle-optimal":
        return OracleOptimal()
    if name == "offline-greedy":
        return SequencePolicy(name, offline_greedy(source, t, kappa, seed))
    if name == "offline-optimal":
        return SequencePolicy(name, offline_optimal(source, t, kappa, seed))
    raise GameError(f"unknown policy {name!r}; expected one of {POLICY_NAMES}")


def run_trajectory(policy: Policy, game: Game, t: int, rng: np.random.Generator | None = None,
                   known: KnownSet | None = None) -> Trajectory:
    """Let ``policy`` reveal ``t`` coalitions of ``game``, recording normalized gaps."""
    _check_budget(game.n, t)
    known = KnownSet.minimal(game.n) if known is None else known
    rng = np.random.default_rng(0) if rng is None else rng
    policy.start(game.n, t, rng)
    score = GapEstimator(game)
    traj = Trajectory([], [score(known.revealed())])
    for _ in range(t):
        view = game if policy.oracle else MaskedGame(game, known)
        s = int(policy.choose(view, known))
        if not 0 < s < grand(game.n) or s in known:
            raise GameError(f"{policy.name} chose coalition {s}, which is not unknown")
        known = known.with_revealed(s)
        traj.revealed.append(s)
        traj.gaps.append(score(known.revealed()))
    return traj


def size_limit_for(name: str, n: int) -> None:
    if name in ("offline-optimal", "oracle-optimal") and n > OPTIMAL_MAX_PLAYERS:
        raise SizeLimit(f"{name} is limited to n <= {OPTIMAL_MAX_PLAYERS}, got n={n}")

