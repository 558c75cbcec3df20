"""Fixed-size complex linear algebra for the two-qubit engine.

Everything in the protocol is a 2x2 unitary, a 4x4 unitary, or a 4x4
density matrix, so the helpers here enforce exact shapes instead of
supporting general dimensions.  All returned arrays are read-only.
"""

from __future__ import annotations

import numpy as np

HERMITIAN_TOL = 1e-12
TRACE_TOL = 1e-12
EIGENVALUE_TOL = 1e-10
UNITARY_TOL = 1e-10


class NonUnitaryError(ValueError):
    """Raised when a matrix that must be unitary is not, within tolerance."""


def _frozen(m: np.ndarray) -> np.ndarray:
    m.setflags(write=False)
    return m


IDENTITY_2 = _frozen(np.eye(2, dtype=complex))
IDENTITY_4 = _frozen(np.eye(4, dtype=complex))
SIGMA_X = _frozen(np.array([[0, 1], [1, 0]], dtype=complex))
SIGMA_Y = _frozen(np.array([[0, -1j], [1j, 0]], dtype=complex))
SIGMA_Z = _frozen(np.array([[1, 0], [0, -1]], dtype=complex))


def as_matrix(m, dim: int) -> np.ndarray:
    """Coerce to a complex dim x dim array, rejecting NaN/Inf entries."""
    out = np.asarray(m, dtype=complex)
    if out.shape != (dim, dim):
        raise ValueError(f"expected a {dim}x{dim} matrix, got shape {out.shape}")
    if not np.isfinite(out.view(float)).all():
        raise ValueError("matrix entries must be finite")
    return out


def kron(a, b) -> np.ndarray:
    """Kronecker product of two 2x2 matrices, first factor's indices major."""
    return np.kron(as_matrix(a, 2), as_matrix(b, 2))


def adjoint(m) -> np.ndarray:
    """Conjugate transpose."""
    m = np.asarray(m, dtype=complex)
    return m.conj().T


def is_unitary(u, tol: float = UNITARY_TOL) -> bool:
    """True if ||U U^dag - I||_max <= tol."""
    if tol <= 0:
        raise ValueError("tol must be positive")
    u = np.asarray(u, dtype=complex)
    if u.ndim != 2 or u.shape[0] != u.shape[1]:
        return False
    return bool(np.abs(u @ u.conj().T - np.eye(u.shape[0])).max() <= tol)


def density_matrix(mat) -> np.ndarray:
    """Validate a 4x4 density matrix (Hermitian, unit trace, PSD) and freeze it.

    Tolerances: 1e-12 entrywise Hermiticity, 1e-12 on the trace, and
    eigenvalues allowed down to -1e-10.
    """
    rho = as_matrix(mat, 4)
    herm = np.abs(rho - rho.conj().T).max()
    if herm > HERMITIAN_TOL:
        raise ValueError(f"matrix is not Hermitian (asymmetry {herm:.2e})")
    tr = np.trace(rho)
    if abs(tr - 1.0) > TRACE_TOL:
        raise ValueError(f"trace must be 1, got {tr}")
    eigs = np.linalg.eigvalsh(rho)
    if eigs.min() < -EIGENVALUE_TOL:
        raise ValueError(f"matrix is not positive semidefinite (min eigenvalue {eigs.min():.2e})")
    return _frozen(rho.copy())


def conjugate_by(rho, u, unitary_tol: float = UNITARY_TOL) -> np.ndarray:
    """Evolve a density matrix: U rho U^dag.

    Raises NonUnitaryError if U fails the unitarity check; the result is
    validated against the density-matrix invariants before it is returned.
    """
    rho = density_matrix(rho)
    u = as_matrix(u, 4)
    if not is_unitary(u, unitary_tol):
        raise NonUnitaryError("conjugating matrix is not unitary within tolerance")
    return density_matrix(u @ rho @ u.conj().T)


def trace_distance(a, b) -> float:
    """Half the sum of absolute eigenvalues of the difference of two states."""
    diff = density_matrix(a) - density_matrix(b)
    return float(0.5 * np.abs(np.linalg.eigvalsh(diff)).sum())
