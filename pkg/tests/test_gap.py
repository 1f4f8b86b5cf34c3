from fractions import Fraction

import numpy as np
import pytest
from hypothesis import given, strategies as st

from utopian_gap.core import Game, GameError, KnownSet, coalition, is_superadditive, popcount
from utopian_gap.bounds import extension_at
from utopian_gap.gap import (
    gap, gap_batch, gap_closed_form, gap_definitional, gap_delta_quad, gap_weights, game_bounds,
    shapley, shapley_values, utopian_game,
)
from utopian_gap.generators import factory_game

import oracle
from conftest import game_and_known, games, known_sets


def c(*players):
    """0-based coalition from 1-based players."""
    return coalition(p - 1 for p in players)


def test_weights_are_exact():
    w = gap_weights(4)
    assert w[0] == 1.0 and w[0b1111] == 1.0
    assert w[0b0011] == pytest.approx(float(Fraction(2 * 2, 24)))
    assert w[0b0111] == pytest.approx(0.25)


@given(games())
def test_shapley_matches_permutations(g):
    np.testing.assert_allclose(shapley(g), oracle.shapley(g.values, g.n), atol=1e-9)
    assert shapley(g).sum() == pytest.approx(g.grand_value)


def test_shapley_batched():
    gs = [factory_game(4, i) for i in range(4)]
    batch = shapley_values(np.stack([g.values for g in gs]), 4)
    for row, g in zip(batch, gs):
        np.testing.assert_allclose(row, shapley(g))
    np.testing.assert_allclose(shapley(factory_game(4, 0)), [1.5, 0.5, 0.5, 0.5])


@given(game_and_known())
def test_closed_form_equals_definition(pair):
    g, k = pair
    assert gap_closed_form(g, k) == pytest.approx(gap_definitional(g, k), abs=1e-9)


@given(game_and_known())
def test_utopian_games_are_superadditive_extensions(pair):
    g, k = pair
    bp = game_bounds(g, k)
    for i in range(g.n):
        u = utopian_game(g, k, i)
        assert is_superadditive(u)
        np.testing.assert_allclose(u.values[k.mask], g.values[k.mask], atol=1e-9)
        # player i claims at least their true Shapley value
        assert shapley(u)[i] >= shapley(g)[i] - 1e-9
        np.testing.assert_allclose(u.values, np.clip(u.values, bp.lower, bp.upper))


@given(game_and_known(), st.integers(0, 2**32 - 1))
def test_utopian_payoff_bounds_every_sampled_extension(pair, seed):
    g, k = pair
    bp = game_bounds(g, k)
    rng = np.random.default_rng(seed)
    corners = np.stack([extension_at(bp, g.n, s) for s in range(1, 1 << g.n)])
    best = [shapley(utopian_game(g, k, i))[i] for i in range(g.n)]
    for _ in range(5):
        ext = rng.dirichlet(np.ones(len(corners))) @ corners
        assert oracle.superadditive(ext, g.n)
        phi = shapley_values(ext, g.n)
        assert np.all(phi <= np.array(best) + 1e-9)


@given(game_and_known())
def test_gap_non_negative_and_monotone(pair):
    g, k = pair
    base = gap(g, k)
    assert base >= -1e-9
    for s in k.unknown():
        assert gap(g, k.with_revealed(s)) <= base + 1e-9


@given(games(), st.data())
def test_gap_subadditive_over_disjoint_sets(g, data):
    k = data.draw(known_sets(g.n))
    rest = [s for s in k.unknown() if data.draw(st.booleans())]
    l = KnownSet.of(g.n, rest)
    union = KnownSet(g.n, k.mask | l.mask)
    assert gap(g, k) + gap(g, l) >= gap(g, union) - 1e-9


@given(game_and_known(), st.floats(0.1, 20.0), st.lists(st.floats(-5, 5), min_size=5, max_size=5))
def test_gap_scales_under_strategic_equivalence(pair, alpha, beta):
    g, k = pair
    bits = (np.arange(1 << g.n)[:, None] >> np.arange(g.n)) & 1
    moved = Game(g.n, alpha * g.values + bits @ np.array(beta[:g.n]))
    assert gap(moved, k) == pytest.approx(alpha * gap(g, k), rel=1e-7, abs=1e-9)


def test_gap_zero_with_full_information():
    g = factory_game(4, 1)
    assert gap(g, KnownSet.full(4)) == pytest.approx(0.0, abs=1e-12)


def test_inessential_game_has_no_gap():
    additive = Game.from_function(3, lambda s: 2.0 * popcount(s))
    assert gap(additive, KnownSet.minimal(3)) == 0.0
    assert gap_batch(additive.values, KnownSet.minimal(3).mask, 3, normalized=True) == 0.0


def test_gap_rejects_negative_excess():
    with pytest.raises(GameError):
        gap(Game(2, [0.0, 1.0, 1.0, 1.0]), KnownSet.minimal(2))


def test_player_count_mismatch():
    with pytest.raises(GameError, match="players"):
        gap(factory_game(3, 0), KnownSet.minimal(4))
    with pytest.raises(GameError):
        utopian_game(factory_game(3, 0), KnownSet.minimal(3), 3)


def test_fixed_owner_factory_four_trajectory():
    """Owner 1, greedy reveals {2,3,4}, {1,2,3}, {1,4}, {1,2,4}; raw gap is 3x normalized."""
    g = factory_game(4, 0)
    k = KnownSet.minimal(4)
    expected = [2, Fraction(5, 4), Fraction(8, 9), Fraction(5, 9), Fraction(7, 18)]
    order = [c(2, 3, 4), c(1, 2, 3), c(1, 4), c(1, 2, 4)]
    for step, value in enumerate(expected):
        assert gap(g, k) / 3 == pytest.approx(float(value), abs=1e-12)
        if step < len(order):
            k = k.with_revealed(order[step])
    three = KnownSet.of(4, [c(1, 2, 3), c(1, 2, 4), c(1, 3, 4), c(2, 3, 4)])
    assert gap(g, three) / 3 == pytest.approx(1 / 3, abs=1e-12)
    alt = KnownSet.of(4, [c(2, 3, 4), c(1, 2, 3), c(1, 2, 4)])
    assert gap(g, alt) / 3 == pytest.approx(7 / 12, abs=1e-12)


def test_factory_five_quad_components():
    g = factory_game(5, 0)
    k = KnownSet.of(5, [c(1, 2, 3), c(1, 4)])
    s, z = c(1, 2), c(1, 2, 3, 5)
    parts = [gap(g, k), gap(g, k.with_revealed(s)), gap(g, k.with_revealed(z)),
             gap(g, k.with_revealed(s, z))]
    # G(K), G(K+S), G(K+Z), G(K+S+Z)
    np.testing.assert_allclose(parts, [8.6, 8.1, 7.9, 7.3], atol=1e-9)
    assert gap_delta_quad(g, k, s, z) == pytest.approx(-0.1, abs=1e-9)


def test_quad_argument_checks():
    g, k = factory_game(4, 0), KnownSet.of(4, [0b0011])
    with pytest.raises(GameError):
        gap_delta_quad(g, k, 0b0101, 0b0101)
    with pytest.raises(GameError):
        gap_delta_quad(g, k, 0b0011, 0b0101)
