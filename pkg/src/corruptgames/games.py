"""Classical 2x2 bimatrix games.

Holds the builtin Prisoner's Dilemma, Samaritan's Dilemma, and Battle of
Sexes tables, expected payoffs over outcome distributions, and classical
Nash equilibria (pure by best-response enumeration, mixed by the 2x2
indifference equations).

Action index 0 is the move implemented by sigma_0 in the physical scheme
and index 1 the one implemented by i*sigma_y, for both players.
"""

from __future__ import annotations

import json
from dataclasses import dataclass
from pathlib import Path

import numpy as np

DIST_ENTRY_TOL = 1e-12
DIST_SUM_TOL = 1e-10

PayoffPair = tuple[float, float]


@dataclass(frozen=True)
class BimatrixGame:
    """A two-player game with two actions per player.

    payoffs[i][j] is the (alice, bob) payoff pair when Alice plays her
    action i and Bob plays his action j.
    """

    name: str
    alice_actions: tuple[str, str]
    bob_actions: tuple[str, str]
    payoffs: tuple[tuple[PayoffPair, PayoffPair], tuple[PayoffPair, PayoffPair]]

    def __post_init__(self):
        if len(self.alice_actions) != 2 or len(self.bob_actions) != 2:
            raise ValueError("exactly two actions per player")
        flat = [v for row in self.payoffs for cell in row for v in cell]
        if len(flat) != 8 or not np.isfinite(flat).all():
            raise ValueError("payoffs must be a 2x2 table of finite (alice, bob) pairs")

    @property
    def alice_matrix(self) -> np.ndarray:
        return np.array([[self.payoffs[i][j][0] for j in (0, 1)] for i in (0, 1)])

    @property
    def bob_matrix(self) -> np.ndarray:
        return np.array([[self.payoffs[i][j][1] for j in (0, 1)] for i in (0, 1)])

    def payoff_vectors(self) -> tuple[np.ndarray, np.ndarray]:
        """Payoffs indexed by measurement outcome n = 2*j + l."""
        return self.alice_matrix.reshape(4), self.bob_matrix.reshape(4)

    def mean_payoffs(self) -> PayoffPair:
        return float(self.alice_matrix.mean()), float(self.bob_matrix.mean())


def _game(name, alice_actions, bob_actions, table) -> BimatrixGame:
    payoffs = tuple(tuple((float(a), float(b)) for a, b in row) for row in table)
    return BimatrixGame(name, tuple(alice_actions), tuple(bob_actions), payoffs)


PRISONERS_DILEMMA = _game(
    "pd", ("Deny", "Confess"), ("Deny", "Confess"),
    [[(3, 3), (0, 5)], [(5, 0), (1, 1)]],
)
SAMARITANS_DILEMMA = _game(
    "sd", ("Aid", "No-aid"), ("Work", "Loaf"),
    [[(3, 2), (-1, 3)], [(-1, 1), (0, 0)]],
)
BATTLE_OF_SEXES = _game(
    "bos", ("Ballet", "Football"), ("Ballet", "Football"),
    [[(2, 1), (0, 0)], [(0, 0), (1, 2)]],
)

BUILTIN_GAMES = {
    "pd": PRISONERS_DILEMMA,
    "sd": SAMARITANS_DILEMMA,
    "bos": BATTLE_OF_SEXES,
}


def builtin_game(game_id: str) -> BimatrixGame:
    """Look up a builtin game by id ("pd", "sd", or "bos", case-insensitive)."""
    try:
        return BUILTIN_GAMES[game_id.lower()]
    except KeyError:
        raise ValueError(f"unknown game id {game_id!r}; expected one of {sorted(BUILTIN_GAMES)}") from None


def validate_distribution(dist) -> np.ndarray:
    """Check a length-4 outcome distribution: entries in [0, 1], summing to 1."""
    p = np.asarray(dist, dtype=float)
    if p.shape != (4,):
        raise ValueError(f"outcome distribution must have 4 entries, got shape {p.shape}")
    if not np.isfinite(p).all():
        raise ValueError("outcome probabilities must be finite")
    if p.min() < -DIST_ENTRY_TOL or p.max() > 1 + DIST_ENTRY_TOL:
        raise ValueError("outcome probabilities must lie in [0, 1]")
    if abs(p.sum() - 1.0) > DIST_SUM_TOL:
        raise ValueError(f"outcome probabilities must sum to 1, got {p.sum()}")
    return p


def expected_payoffs(game: BimatrixGame, dist) -> PayoffPair:
    """Average payoffs under a distribution over outcomes n = 2*j + l."""
    p = validate_distribution(dist)
    a, b = game.payoff_vectors()
    return float(a @ p), float(b @ p)


def mixed_payoffs(game: BimatrixGame, alice_p0: float, bob_p0: float) -> PayoffPair:
    """Expected payoffs when each player independently mixes over actions."""
    for label, p in (("alice_p0", alice_p0), ("bob_p0", bob_p0)):
        if not 0.0 <= p <= 1.0:
            raise ValueError(f"{label} must be in [0, 1], got {p}")
    pa = np.array([alice_p0, 1 - alice_p0])
    pb = np.array([bob_p0, 1 - bob_p0])
    dist = np.outer(pa, pb).reshape(4)
    a, b = game.payoff_vectors()
    return float(a @ dist), float(b @ dist)


@dataclass(frozen=True)
class ClassicalEquilibrium:
    """A classical NE profile; p0 values are the weights on action 0."""

    kind: str  # "pure" or "mixed"
    alice_p0: float
    bob_p0: float
    payoffs: PayoffPair


def classical_equilibria(game: BimatrixGame) -> list[ClassicalEquilibrium]:
    """All pure NE plus the interior mixed NE of a 2x2 game.

    Pure equilibria come from the exhaustive best-response check over the
    four cells.  The mixed profile solves the indifference equations; it is
    reported only when both weights are strictly interior, and omitted for
    degenerate games where an indifference denominator vanishes.
    """
    a, b = game.alice_matrix, game.bob_matrix
    found: list[ClassicalEquilibrium] = []
    for i in (0, 1):
        for j in (0, 1):
            if a[i, j] >= a[1 - i, j] and b[i, j] >= b[i, 1 - j]:
                found.append(ClassicalEquilibrium(
                    "pure", 1.0 - i, 1.0 - j, (float(a[i, j]), float(b[i, j]))))

    # Bob's weight q on action 0 equalizes Alice's two actions, and vice versa.
    den_q = a[0, 0] - a[0, 1] - a[1, 0] + a[1, 1]
    den_p = b[0, 0] - b[1, 0] - b[0, 1] + b[1, 1]
    if den_q != 0.0 and den_p != 0.0:
        q = (a[1, 1] - a[0, 1]) / den_q
        p = (b[1, 1] - b[1, 0]) / den_p
        if 0.0 < p < 1.0 and 0.0 < q < 1.0:
            found.append(ClassicalEquilibrium("mixed", float(p), float(q),
                                              mixed_payoffs(game, float(p), float(q))))
    return found


# -- game-definition files ---------------------------------------------------
#
# JSON schema (all fields required):
#   {
#     "name": str,
#     "alice_actions": [str, str],
#     "bob_actions": [str, str],
#     "payoffs": [[[aliceP, bobP], [aliceP, bobP]],
#                 [[aliceP, bobP], [aliceP, bobP]]]
#   }
# payoffs[i][j] belongs to (alice action i, bob action j); action order
# defines the operator mapping (index 0 -> sigma_0, index 1 -> i*sigma_y).

def game_to_dict(game: BimatrixGame) -> dict:
    return {
        "name": game.name,
        "alice_actions": list(game.alice_actions),
        "bob_actions": list(game.bob_actions),
        "payoffs": [[list(cell) for cell in row] for row in game.payoffs],
    }


def game_from_dict(data: dict) -> BimatrixGame:
    try:
        return _game(str(data["name"]), data["alice_actions"], data["bob_actions"],
                     data["payoffs"])
    except (KeyError, TypeError, IndexError) as exc:
        raise ValueError(f"malformed game definition: {exc}") from exc


def load_game(path) -> BimatrixGame:
    """Read a game-definition JSON file."""
    with open(Path(path), encoding="utf-8") as fh:
        data = json.load(fh)
    return game_from_dict(data)
