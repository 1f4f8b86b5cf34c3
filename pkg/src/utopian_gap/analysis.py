"""Auditing whether the gap, as a function of the known set, is supermodular.

A violation is a base known set ``K`` and two unknown coalitions ``S != Z``
with ``G(K+S+Z) - G(K+S) - G(K+Z) + G(K) < 0``.

Five-player violations exist among symmetric and graph games (quad -0.1
at ``K = K0 + {1,2,3}``, ``S = {1,2}``, ``Z = {3,4}``). The totally monotonic
game ``u_{3,4} + u_{1,2,3}`` gives exactly 0 at that configuration, so it is
not a witness there.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from itertools import combinations, permutations
from math import comb

import numpy as np

from .core import (
    EPS, Game, GameError, SizeLimit, coalition, format_coalition, grand, minimal_mask,
    submasks, unknown_coalitions,
)
from .gap import gap_batch

EXHAUSTIVE_MAX_PLAYERS = 5
DEFAULT_MAX_EXTRA = 4


@dataclass(frozen=True)
class Witness:
    known: tuple  # revealed coalitions beyond the minimal information
    s: int
    z: int
    value: float

    def to_json(self) -> dict:
        return {
            "known": [format_coalition(c) for c in self.known],
            "S": format_coalition(self.s),
            "Z": format_coalition(self.z),
            "gap_delta": self.value,
        }


@dataclass(frozen=True)
class AuditReport:
    supermodular: bool
    witness: Witness | None
    quads_checked: int
    exhaustive: bool = False

    def to_json(self) -> dict:
        return {
            "supermodular": self.supermodular,
            "witness": None if self.witness is None else self.witness.to_json(),
            "quads_checked": self.quads_checked,
            "exhaustive": self.exhaustive,
        }


class _GapTable:
    """Normalized gaps of one game keyed by the set of revealed coalitions."""

    def __init__(self, g: Game):
        self.n = g.n
        self.values = g.values
        single = g.singletons
        essential = g.grand_value - single.sum()
        # raw gap = normalized gap / scale = normalized gap * essential excess
        self.raw_factor = float(essential)
        self._cache = {}

    def fill(self, revealed_sets, chunk: int = 4096) -> None:
        """Evaluate many revealed sets at once."""
        todo = [r for r in revealed_sets if r not in self._cache]
        base = minimal_mask(self.n)
        for start in range(0, len(todo), chunk):
            part = todo[start:start + chunk]
            masks = np.broadcast_to(base, (len(part), base.size)).copy()
            for row, revealed in enumerate(part):
                masks[row, list(revealed)] = True
            gaps = gap_batch(self.values, masks, self.n, normalized=True)
            self._cache.update(zip(part, gaps.tolist()))

    def __call__(self, revealed: frozenset) -> float:
        if revealed not in self._cache:
            mask = minimal_mask(self.n)
            mask[list(revealed)] = True
            self._cache[revealed] = float(gap_batch(self.values, mask, self.n, normalized=True))
        return self._cache[revealed]

    def quad(self, known: frozenset, s: int, z: int) -> float:
        return (self(known | {s, z}) - self(known | {s}) - self(known | {z}) + self(known))


def audit_gap_supermodularity(g: Game, exhaustive: bool = True, budget: int = 10_000,
                              seed: int = 0, max_extra: int | None = DEFAULT_MAX_EXTRA,
                              probes=(), eps: float = EPS) -> AuditReport:
    """Search for a violation of the gap's supermodularity.

    Exhaustive mode scans base sets by increasing size (capped at
    ``max_extra`` revealed coalitions; ``None`` removes the cap), then pairs
    ``S < Z`` in bitmask order, and stops at the first violation. Randomized
    mode checks ``probes`` first, then ``budget`` random quads.
    """
    if exhaustive and g.n > EXHAUSTIVE_MAX_PLAYERS:
        raise SizeLimit(f"exhaustive audit is limited to n <= {EXHAUSTIVE_MAX_PLAYERS}")
    table = _GapTable(g)
    checked = 0

    def verdict(known, s, z):
        value = table.quad(known, s, z)
        if value < -eps:
            raw = value * table.raw_factor
            return Witness(tuple(sorted(known)), s, z, raw)
        return None

    for known, s, z in probes:
        checked += 1
        w = verdict(frozenset(known), s, z)
        if w:
            return AuditReport(False, w, checked, exhaustive)

    pool = unknown_coalitions(g.n)
    if exhaustive:
        top = len(pool) - 2 if max_extra is None else min(max_extra, len(pool) - 2)
        for k in range(top + 1):
            # a base of size k needs gaps of revealed sets up to size k + 2
            for size in range(0 if k == 0 else k + 2, k + 3):
                table.fill([frozenset(c) for c in combinations(pool, size)])
            for base in combinations(pool, k):
                known = frozenset(base)
                rest = [c for c in pool if c not in known]
                for s, z in combinations(rest, 2):
                    checked += 1
                    w = verdict(known, s, z)
                    if w:
                        return AuditReport(False, w, checked, True)
        return AuditReport(True, None, checked, True)

    rng = np.random.Generator(np.random.PCG64(seed))
    m = len(pool)
    for _ in range(budget):
        picks = rng.permutation(m)
        k = int(rng.integers(0, m - 1))
        known = frozenset(pool[i] for i in picks[:k])
        s, z = sorted((pool[picks[k]], pool[picks[k + 1]]))
        checked += 1
        w = verdict(known, s, z)
        if w:
            return AuditReport(False, w, checked, False)
    return AuditReport(True, None, checked, False)


def criterion_coefficient(n: int) -> Fraction:
    """``C(n,2) / C(n, n//2) * (2**(n-3) - n + 2) - 1``, exactly."""
    if n < 5:
        raise GameError(f"the criterion is stated for n >= 5, got {n}")
    return Fraction(comb(n, 2), comb(n, n // 2)) * (2 ** (n - 3) - n + 2) - 1


def check_criterion(g: Game, eps: float = EPS):
    """First ordered quadruple ``(i, j, k, l)`` of distinct players with
    ``e(ij) <= e(jk) <= e(kl) < C(n) e(ij)``, where ``e`` is the excess over
    singleton values; ``None`` if there is none. Players are 0-based.
    """
    if g.n < 6:
        raise SizeLimit(f"the criterion needs n >= 6, got {g.n}")
    coef = float(criterion_coefficient(g.n))
    ex = g.excess()

    def pair(a, b):
        return ex[(1 << a) | (1 << b)]

    for i, j, k, l in permutations(range(g.n), 4):
        a, b, c = pair(i, j), pair(j, k), pair(k, l)
        if a <= b + eps and b <= c + eps and c < coef * a - eps:
            return (i, j, k, l)
    return None


def criterion_probe(quad):
    """Base set and revealed pair at which a criterion witness breaks supermodularity."""
    i, j, k, l = quad
    return (coalition((j, k)),), coalition((i, j)), coalition((k, l))


def is_strictly_superadditive(g: Game, eps: float = EPS) -> bool:
    v = g.values
    full = grand(g.n)
    for s in range(1, 1 << g.n):
        t = submasks(g.n, full & ~s)[1:]
        if np.any(v[s] + v[t] >= v[s | t] - eps):
            return False
    return True


def zero_gap_requires_all(g: Game, eps: float = EPS) -> bool:
    """Check that hiding any single coalition leaves a positive gap."""
    if not is_strictly_superadditive(g, eps):
        raise GameError("game is not strictly superadditive")
    return all(value > eps for value in hidden_gaps(g).values())


def hidden_gaps(g: Game) -> dict:
    """Gap with each single coalition outside the minimal information hidden."""
    out = {}
    for s in unknown_coalitions(g.n):
        mask = np.ones(1 << g.n, dtype=bool)
        mask[s] = False
        out[s] = float(gap_batch(g.values, mask, g.n))
    return out
