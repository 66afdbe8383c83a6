"""Truncated Fock-space linear algebra.

Operators on the truncated space span{e_0, ..., e_{D-1}} are dense complex
D x D matrices; state vectors are length-D complex vectors. Raising actions
from the top basis vector e_{D-1} map to zero, so algebraic identities are
asserted only away from the boundary (see the verification engine).

Numerics are double-precision complex throughout. Default tolerances are
relative to the max-norm of the operand:

    TAU_HERM_REL  Hermiticity deviation allowed before NotHermitian
    TAU_RES_REL   residual allowed for matrix-function and root contracts
"""

from dataclasses import dataclass, field

import numpy as np

from .errors import (
    DimMismatch,
    NotDiagonalizable,
    NotHermitian,
    NotPositive,
    RejectedSequence,
)

TAU_HERM_REL = 1e-10
TAU_RES_REL = 1e-9
COND_CAP = 1e12


@dataclass(frozen=True)
class EpsilonSequence:
    """Strictly increasing eigenvalue sequence with its generalized factorials.

    ``values[0] == 0`` exactly and ``factorials[n] == factorials[n-1] * values[n]``
    holds exactly as stored (cumulative product). Construct via
    :func:`make_epsilon` or one of the named generators below.
    """

    values: np.ndarray
    factorials: np.ndarray = field(repr=False)

    def __len__(self) -> int:
        return len(self.values)

    def truncated(self, n_terms: int) -> "EpsilonSequence":
        """Leading ``n_terms`` entries as a new sequence."""
        if not 1 <= n_terms <= len(self):
            raise RejectedSequence(f"cannot truncate length {len(self)} to {n_terms}")
        return EpsilonSequence(self.values[:n_terms], self.factorials[:n_terms])

    @property
    def sqrt_values(self) -> np.ndarray:
        return np.sqrt(self.values)


def make_epsilon(values) -> EpsilonSequence:
    """Validate an eigenvalue list and attach its generalized factorials.

    Requirements: nonempty, ``values[0] == 0`` exactly, strictly increasing,
    all entries finite. Raises :class:`RejectedSequence` otherwise.
    """
    vals = np.asarray(values, dtype=float)
    if vals.ndim != 1 or vals.size == 0:
        raise RejectedSequence("need a nonempty one-dimensional sequence")
    if not np.all(np.isfinite(vals)):
        raise RejectedSequence("sequence contains a non-finite entry")
    if vals[0] != 0.0:
        raise RejectedSequence(f"sequence must start at exactly zero, got {vals[0]!r}")
    if vals.size > 1 and not np.all(np.diff(vals) > 0):
        raise RejectedSequence("sequence must be strictly increasing")
    facts = np.empty_like(vals)
    facts[0] = 1.0
    if vals.size > 1:
        facts[1:] = np.cumprod(vals[1:])
    if not np.all(np.isfinite(facts)):
        raise RejectedSequence("generalized factorials overflow at this length")
    vals.flags.writeable = False
    facts.flags.writeable = False
    return EpsilonSequence(vals, facts)


def epsilon_linear(n_terms: int) -> EpsilonSequence:
    """The undeformed spectrum 0, 1, 2, ..."""
    return make_epsilon(np.arange(n_terms, dtype=float))


def epsilon_quon(q: float, n_terms: int) -> EpsilonSequence:
    """Geometric-sum spectrum (1 - q^n) / (1 - q), stable for q near 1."""
    n = np.arange(n_terms, dtype=float)
    if q == 1.0:
        vals = n
    else:
        vals = (1.0 - np.power(q, n)) / (1.0 - q)
    vals[0] = 0.0
    return make_epsilon(vals)


def epsilon_poly_times_n(coeffs, n_terms: int) -> EpsilonSequence:
    """Spectrum n * f(n) for a polynomial f given by ascending coefficients."""
    n = np.arange(n_terms, dtype=float)
    return make_epsilon(n * np.polynomial.polynomial.polyval(n, np.asarray(coeffs, dtype=float)))


def as_operator(entries) -> np.ndarray:
    """Validate a dense operator: square, dim >= 2, finite; returns complex128."""
    mat = np.array(entries, dtype=np.complex128)
    if mat.ndim != 2 or mat.shape[0] != mat.shape[1]:
        raise DimMismatch(f"operator must be square, got shape {mat.shape}")
    if mat.shape[0] < 2:
        raise DimMismatch("operator dimension must be at least 2")
    if not np.all(np.isfinite(mat)):
        raise RejectedSequence("operator contains a non-finite entry")
    return mat


def as_state(coeffs, dim: int | None = None) -> np.ndarray:
    """Validate a state vector; optionally check its ambient dimension."""
    vec = np.array(coeffs, dtype=np.complex128)
    if vec.ndim != 1:
        raise DimMismatch(f"state must be one-dimensional, got shape {vec.shape}")
    if dim is not None and vec.size != dim:
        raise DimMismatch(f"state has length {vec.size}, expected {dim}")
    if not np.all(np.isfinite(vec)):
        raise RejectedSequence("state contains a non-finite entry")
    return vec


def adjoint(x: np.ndarray) -> np.ndarray:
    """Conjugate transpose."""
    return np.ascontiguousarray(np.asarray(x).conj().T)


def commutator(x: np.ndarray, y: np.ndarray) -> np.ndarray:
    """XY - YX. Raises DimMismatch on incompatible shapes."""
    x = np.asarray(x)
    y = np.asarray(y)
    if x.shape != y.shape:
        raise DimMismatch(f"commutator of shapes {x.shape} and {y.shape}")
    return x @ y - y @ x


def max_abs(x: np.ndarray) -> float:
    x = np.asarray(x)
    return float(np.max(np.abs(x))) if x.size else 0.0


def hermiticity_defect(x: np.ndarray) -> float:
    return max_abs(x - adjoint(x))


def positive_sqrt(x: np.ndarray, tau_herm: float | None = None) -> np.ndarray:
    """Positive-semidefinite square root of a Hermitian PSD matrix.

    ``tau_herm`` defaults to TAU_HERM_REL * max|x|. Raises NotHermitian when
    the matrix is not Hermitian within tolerance and NotPositive when the
    smallest eigenvalue falls below -tau_herm.
    """
    x = np.asarray(x, dtype=np.complex128)
    scale = max_abs(x)
    if tau_herm is None:
        tau_herm = TAU_HERM_REL * max(scale, 1.0)
    defect = hermiticity_defect(x)
    if defect > tau_herm:
        raise NotHermitian(f"hermiticity defect {defect:.3e} exceeds {tau_herm:.3e}")
    evals, evecs = np.linalg.eigh((x + adjoint(x)) / 2.0)
    if evals[0] < -tau_herm:
        raise NotPositive(f"smallest eigenvalue {evals[0]:.3e} below -{tau_herm:.3e}")
    root = (evecs * np.sqrt(np.clip(evals, 0.0, None))) @ adjoint(evecs)
    return (root + adjoint(root)) / 2.0


def apply_function(x: np.ndarray, f, cond_cap: float = COND_CAP) -> np.ndarray:
    """Matrix function f(x) via eigendecomposition.

    Hermitian input uses the unitary eigenbasis; otherwise a general
    eigendecomposition is used and NotDiagonalizable is raised when the
    eigenvector matrix has condition number above ``cond_cap``.
    """
    x = np.asarray(x, dtype=np.complex128)
    scale = max_abs(x)
    if hermiticity_defect(x) <= TAU_HERM_REL * max(scale, 1.0):
        evals, evecs = np.linalg.eigh((x + adjoint(x)) / 2.0)
        fvals = np.array([f(v) for v in evals])
        return (evecs * fvals) @ adjoint(evecs)
    evals, evecs = np.linalg.eig(x)
    cond = np.linalg.cond(evecs)
    if not np.isfinite(cond) or cond > cond_cap:
        raise NotDiagonalizable(f"eigenbasis condition number {cond:.3e} exceeds cap")
    fvals = np.array([f(v) for v in evals])
    return (evecs * fvals) @ np.linalg.inv(evecs)


def ladder_lowering(eps: EpsilonSequence) -> np.ndarray:
    """Lowering operator for a spectrum: c e_n = sqrt(eps_n) e_{n-1}.

    With the undeformed spectrum this is the standard truncated boson
    annihilation matrix.
    """
    d = len(eps)
    mat = np.zeros((d, d), dtype=np.complex128)
    idx = np.arange(1, d)
    mat[idx - 1, idx] = np.sqrt(eps.values[1:])
    return mat


def number_operator(eps: EpsilonSequence) -> np.ndarray:
    """diag(eps_0, ..., eps_{D-1}); equals c^dagger c for the lowering ladder."""
    return np.diag(eps.values).astype(np.complex128)
