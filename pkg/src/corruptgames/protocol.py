"""The physical scheme: entangler, strategy unitaries, and corrupt source.

The referee feeds a two-qubit product state through the entangler J, the
players act locally with two-parameter SU(2) unitaries U(theta, phi), the
referee disentangles with J^dag and measures in the computational basis.
The source is corrupt: each qubit is flipped away from its intended basis
value independently with probability r, so the input is a diagonal mixed
state and all evolution here is density-matrix based.

Conventions, used everywhere in this package:
  * basis order |00>, |01>, |10>, |11>; the first bit is Alice's qubit;
  * measurement outcome n = 2*j + l maps to (alice action j, bob action l);
  * a strategy is a pair (theta, phi) with 0 <= theta <= pi and
    0 <= phi <= pi/2;
  * a classical move is a mixture over {sigma_0, i*sigma_y}, given as the
    weight p0 on sigma_0.

Batched variants accept arrays of strategy pairs and are validated against
the scalar density-matrix path in the test suite.
"""

from __future__ import annotations

import math

import numpy as np

from . import linalg
from .games import BimatrixGame, PayoffPair, expected_payoffs

Strategy = tuple[float, float]

SIGMA0_MOVE: Strategy = (0.0, 0.0)
ISIGMA_Y_MOVE: Strategy = (math.pi, 0.0)
ISIGMA_Z_MOVE: Strategy = (0.0, math.pi / 2)
RISK_FREE_MOVE: Strategy = (math.pi / 2, 0.0)  # (sigma_0 + i*sigma_y)/sqrt(2)


class OutOfRangeError(ValueError):
    """A parameter fell outside its documented domain."""


def _build_entangler() -> np.ndarray:
    # Column 2f+g is the image of |fg>: (|fg> + i(-1)^(f+g) |(1-f)(1-g)>)/sqrt(2)
    j = np.zeros((4, 4), dtype=complex)
    for f in (0, 1):
        for g in (0, 1):
            col = 2 * f + g
            j[col, col] = 1 / math.sqrt(2)
            j[2 * (1 - f) + (1 - g), col] = 1j * (-1) ** (f + g) / math.sqrt(2)
    j.setflags(write=False)
    return j


_ENTANGLER = _build_entangler()
_ENTANGLER_DAG = linalg.adjoint(_ENTANGLER).copy()
_ENTANGLER_DAG.setflags(write=False)


def entangler() -> np.ndarray:
    """The referee's fixed entangling unitary J (read-only)."""
    return _ENTANGLER


def validate_strategy(strategy) -> Strategy:
    theta, phi = float(strategy[0]), float(strategy[1])
    if not (math.isfinite(theta) and 0.0 <= theta <= math.pi):
        raise OutOfRangeError(f"theta must be in [0, pi], got {theta}")
    if not (math.isfinite(phi) and 0.0 <= phi <= math.pi / 2):
        raise OutOfRangeError(f"phi must be in [0, pi/2], got {phi}")
    return theta, phi


def validate_rate(r) -> float:
    r = float(r)
    if not (math.isfinite(r) and 0.0 <= r <= 1.0):
        raise OutOfRangeError(f"corruption rate must be in [0, 1], got {r}")
    return r


def validate_mix(p0, label: str = "p0") -> float:
    p0 = float(p0)
    if not (math.isfinite(p0) and 0.0 <= p0 <= 1.0):
        raise OutOfRangeError(f"{label} must be in [0, 1], got {p0}")
    return p0


def _validate_base(base) -> tuple[int, int]:
    f, g = base
    if f not in (0, 1) or g not in (0, 1):
        raise OutOfRangeError(f"base state bits must be 0 or 1, got {base}")
    return int(f), int(g)


def strategy_unitary(strategy) -> np.ndarray:
    """The two-parameter SU(2) move [[e^{i phi} cos(t/2), sin(t/2)],
    [-sin(t/2), e^{-i phi} cos(t/2)]]."""
    theta, phi = validate_strategy(strategy)
    c, s = math.cos(theta / 2), math.sin(theta / 2)
    return np.array([[np.exp(1j * phi) * c, s], [-s, np.exp(-1j * phi) * c]])


def strategy_unitaries(strategies) -> np.ndarray:
    """Batched strategy unitaries: [N, 2] angles -> [N, 2, 2]."""
    params = np.asarray(strategies, dtype=float)
    if params.ndim != 2 or params.shape[1] != 2:
        raise ValueError(f"expected an [N, 2] array of (theta, phi), got {params.shape}")
    theta, phi = params[:, 0], params[:, 1]
    if not np.isfinite(params).all() or theta.min() < 0 or theta.max() > math.pi:
        raise OutOfRangeError("theta must be in [0, pi]")
    if phi.min() < 0 or phi.max() > math.pi / 2:
        raise OutOfRangeError("phi must be in [0, pi/2]")
    c, s = np.cos(theta / 2), np.sin(theta / 2)
    u = np.empty((len(params), 2, 2), dtype=complex)
    u[:, 0, 0] = np.exp(1j * phi) * c
    u[:, 0, 1] = s
    u[:, 1, 0] = -s
    u[:, 1, 1] = np.exp(-1j * phi) * c
    return u


def corruption_weights(r, base=(0, 0)) -> np.ndarray:
    """Probabilities of the four basis inputs |fg> from the corrupt source."""
    r = validate_rate(r)
    f0, g0 = _validate_base(base)
    w = np.empty(4)
    for f in (0, 1):
        for g in (0, 1):
            pf = r if f != f0 else 1 - r
            pg = r if g != g0 else 1 - r
            w[2 * f + g] = pf * pg
    return w


def corrupt_input(r, base=(0, 0)) -> np.ndarray:
    """The diagonal two-qubit state emitted by the corrupt source.

    Each qubit is prepared in its base value but flipped with probability r,
    independently, giving rho_1 (x) rho_2 as a diagonal 4x4 density matrix.
    """
    return linalg.density_matrix(np.diag(corruption_weights(r, base).astype(complex)))


def entangled_mixture(r) -> np.ndarray:
    """The state after the entangler: a mixture of four maximally entangled states.

    Weights (1-r)^2, r^2, r(1-r), r(1-r) on (|00> + i|11>)/sqrt(2),
    (|00> - i|11>)/sqrt(2), (|01> + i|10>)/sqrt(2), (|01> - i|10>)/sqrt(2).
    Equals corrupt_input(r) conjugated by the entangler.
    """
    r = validate_rate(r)
    isq = 1 / math.sqrt(2)
    psi_plus = np.array([isq, 0, 0, 1j * isq])
    psi_minus = np.array([isq, 0, 0, -1j * isq])
    phi_plus = np.array([0, isq, 1j * isq, 0])
    phi_minus = np.array([0, isq, -1j * isq, 0])
    rho = ((1 - r) ** 2 * np.outer(psi_plus, psi_plus.conj())
           + r ** 2 * np.outer(psi_minus, psi_minus.conj())
           + r * (1 - r) * (np.outer(phi_plus, phi_plus.conj())
                            + np.outer(phi_minus, phi_minus.conj())))
    return linalg.density_matrix(rho)


def outcome_distribution(r, alice: Strategy, bob: Strategy, base=(0, 0)) -> np.ndarray:
    """Probabilities of the four measurement outcomes, indexed n = 2*j + l.

    Full density-matrix path: the corrupt input is conjugated by the overall
    circuit unitary J^dag (U_A (x) U_B) J and the diagonal is read out.
    """
    rho = corrupt_input(r, base)
    circuit = _ENTANGLER_DAG @ linalg.kron(strategy_unitary(alice), strategy_unitary(bob)) @ _ENTANGLER
    evolved = linalg.conjugate_by(rho, circuit)
    return np.real(np.diagonal(evolved)).copy()


def outcome_distribution_batch(r, alice_strategies, bob_strategies, base=(0, 0)) -> np.ndarray:
    """Outcome distributions for N strategy pairs at once: returns [N, 4].

    Uses the diagonal structure of the corrupt input: p_n is the weighted sum
    of |<n| J^dag (U_A (x) U_B) J |fg>|^2 over the four basis inputs.
    """
    w = corruption_weights(r, base)
    ua = strategy_unitaries(alice_strategies)
    ub = strategy_unitaries(bob_strategies)
    uu = np.einsum("nab,ncd->nacbd", ua, ub).reshape(-1, 4, 4)
    k = _ENTANGLER_DAG @ uu @ _ENTANGLER
    return (k.real ** 2 + k.imag ** 2) @ w


def quantum_payoffs(game: BimatrixGame, r, alice: Strategy, bob: Strategy,
                    base=(0, 0)) -> PayoffPair:
    """Average payoffs when the players apply quantum strategies."""
    return expected_payoffs(game, outcome_distribution(r, alice, bob, base))


def quantum_payoffs_batch(game: BimatrixGame, r, alice_strategies, bob_strategies,
                          base=(0, 0)) -> tuple[np.ndarray, np.ndarray]:
    """Batched payoffs for N strategy pairs: returns (alice [N], bob [N])."""
    p = outcome_distribution_batch(r, alice_strategies, bob_strategies, base)
    a, b = game.payoff_vectors()
    return p @ a, p @ b


def classical_payoffs(game: BimatrixGame, r, alice_p0, bob_p0, base=(0, 0)) -> PayoffPair:
    """Average payoffs for classical (possibly mixed) play through the scheme.

    Each player draws sigma_0 with their p0 weight and i*sigma_y otherwise;
    the result is the convex combination of the four pure-operator runs.
    """
    pa = validate_mix(alice_p0, "alice_p0")
    pb = validate_mix(bob_p0, "bob_p0")
    total_a = total_b = 0.0
    for move_a, wa in ((SIGMA0_MOVE, pa), (ISIGMA_Y_MOVE, 1 - pa)):
        for move_b, wb in ((SIGMA0_MOVE, pb), (ISIGMA_Y_MOVE, 1 - pb)):
            if wa * wb == 0.0:
                continue
            va, vb = quantum_payoffs(game, r, move_a, move_b, base)
            total_a += wa * wb * va
            total_b += wa * wb * vb
    return total_a, total_b
