"""Two-player quantum games played through an entangler fed by a corrupt source.

Simulates the referee/entangler protocol with a noisy initial-state source,
reproduces payoff-vs-corruption curves and critical corruption rates for
Prisoner's Dilemma, Samaritan's Dilemma, and Battle of Sexes, and searches
the two-parameter strategy space for certified Nash equilibria.
"""

from .analysis import (
    Crossing,
    EquilibriumCandidate,
    EquilibriumFamily,
    FamilyDescriptor,
    ScenarioTableRow,
    SweepCurve,
    best_response,
    certify_ne,
    classical_reference_profile,
    default_quantum_profile,
    find_crossings,
    minimize_series,
    ne_search,
    payoff_grid,
    samaritan_case,
    scenario1_sweep,
    scenario2_table,
)
from .games import (
    BATTLE_OF_SEXES,
    PRISONERS_DILEMMA,
    SAMARITANS_DILEMMA,
    BimatrixGame,
    ClassicalEquilibrium,
    builtin_game,
    classical_equilibria,
    expected_payoffs,
    game_from_dict,
    game_to_dict,
    load_game,
    mixed_payoffs,
)
from .linalg import NonUnitaryError
from .protocol import (
    ISIGMA_Y_MOVE,
    ISIGMA_Z_MOVE,
    RISK_FREE_MOVE,
    SIGMA0_MOVE,
    OutOfRangeError,
    classical_payoffs,
    corrupt_input,
    corruption_weights,
    entangled_mixture,
    entangler,
    outcome_distribution,
    outcome_distribution_batch,
    quantum_payoffs,
    quantum_payoffs_batch,
    strategy_unitary,
)

__version__ = "0.1.0"
