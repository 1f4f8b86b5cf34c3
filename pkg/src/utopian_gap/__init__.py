"""Ambiguity in incomplete cooperative games: bounds, utopian gap, revelation policies."""

from .core import (
    DegenerateGame, Game, GameError, KnownSet, MissingMinimalInfo, SizeLimit, coalition,
    format_coalition, is_additive, is_superadditive, is_supermodular, members, normalize,
    parse_coalition, unanimity,
)
from .gap import gap, gap_closed_form, gap_definitional, gap_delta_quad, shapley, utopian_game

__all__ = [
    "DegenerateGame", "Game", "GameError", "KnownSet", "MissingMinimalInfo", "SizeLimit",
    "coalition", "format_coalition", "gap", "gap_closed_form", "gap_definitional",
    "gap_delta_quad", "is_additive", "is_superadditive", "is_supermodular", "members",
    "normalize", "parse_coalition", "shapley", "unanimity", "utopian_game",
]
__version__ = "0.1.0"
