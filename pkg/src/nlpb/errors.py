"""Exception taxonomy for the nlpb package.

Every failure mode that callers are expected to handle gets its own class so
that tests and the CLI can discriminate without string matching.
"""


class NlpbError(ValueError):
    """Base class for all nlpb errors."""


class RejectedSequence(NlpbError):
    """Eigenvalue sequence violates its contract (start, monotonicity, finiteness)."""


class DimMismatch(NlpbError):
    """Operands live on truncated spaces of different dimension."""


class NotHermitian(NlpbError):
    """Matrix deviates from its conjugate transpose beyond tolerance."""


class NotPositive(NlpbError):
    """Hermitian matrix has an eigenvalue below the negativity tolerance."""


class NotDiagonalizable(NlpbError):
    """Eigenbasis condition number exceeds the cap; matrix functions unreliable."""


class NoVacuum(NlpbError):
    """Operator kernel is numerically empty; no vacuum vector exists."""


class DegenerateVacuum(NlpbError):
    """Operator kernel is numerically more than one-dimensional."""


class ZeroOverlap(NlpbError):
    """Vacuum overlap too small; the unit-pairing normalization cannot be imposed."""


class SingularT(NlpbError):
    """Similarity / frame-root operator is numerically singular or too ill-conditioned."""


class LadderMismatch(NlpbError):
    """Operator fails its lowering-ladder contract on the reference basis."""


class InvalidF(NlpbError):
    """Deformation polynomial violates f(0) = 0 or positivity on the needed range."""


class NonMonotone(NlpbError):
    """Derived eigenvalue sequence is not strictly increasing."""


class InvalidParams(NlpbError):
    """Model factory parameters violate a precondition."""


class NegativeEpsilon(InvalidParams):
    """Two-level model parameters produce a negative first eigenvalue."""


class InvalidS(NlpbError):
    """Diagonal similarity weights must be strictly positive."""


class InvalidQ(NlpbError):
    """Deformation parameter q outside the open interval (-1, 1)."""


class NotHermitianS(NlpbError):
    """Similarity generator must be Hermitian."""


class OutsideRadius(NlpbError):
    """Coherent-state label outside the convergence region at this truncation."""


class BadGrid(NlpbError):
    """Discretization grid too coarse for the requested number of constraints."""


class ConfigError(NlpbError):
    """Run configuration failed validation."""
