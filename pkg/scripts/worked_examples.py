"""Print the small hand-checkable examples: exact fractions and five-player quads."""

from fractions import Fraction

import numpy as np

from utopian_gap.core import Game, KnownSet, coalition
from utopian_gap.gap import gap, gap_delta_quad
from utopian_gap.generators import factory_game, graph_game, symmetric_game, unanimity
from utopian_gap.policies import GapEstimator, oracle_greedy, oracle_optimal


def c(*players):
    return coalition(p - 1 for p in players)


def show(label, value):
    print(f"{label:<48} {value:+.12f}  ~ {Fraction(value).limit_denominator(1000)}")


def main():
    g = factory_game(4, 0)
    score = GapEstimator(g)
    seq = oracle_greedy(g, 4)
    for step in range(5):
        show(f"factory(4), owner 1, greedy step {step}", score(seq[:step]))
    show("factory(4), owner 1, optimal at 4", score(oracle_optimal(g, 4)))

    g5 = factory_game(5, 0)
    k = KnownSet.of(5, [c(1, 2, 3), c(1, 4)])
    s, z = c(1, 2), c(1, 2, 3, 5)
    for label, known in [("K", k), ("K+S", k.with_revealed(s)), ("K+Z", k.with_revealed(z)),
                         ("K+S+Z", k.with_revealed(s, z))]:
        show(f"factory(5) raw gap at {label}", gap(g5, known))
    show("factory(5) quad", gap_delta_quad(g5, k, s, z))

    k = KnownSet.of(5, [c(1, 2, 3)])
    w = np.zeros((5, 5))
    w[0, 1] = w[1, 0] = w[2, 3] = w[3, 2] = 1.0
    tm = Game(5, unanimity(5, c(3, 4)).values + unanimity(5, c(1, 2, 3)).values)
    for label, game in [("symmetric", symmetric_game([0, 0, 1, 1, 2, 2])),
                        ("graph", graph_game(w)), ("totally monotonic", tm)]:
        show(f"{label} quad", gap_delta_quad(game, k, c(1, 2), c(3, 4)))


if __name__ == "__main__":
    main()
