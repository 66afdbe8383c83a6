"""Ready-made family factories with closed-form expectations.

Five constructions are provided:

  f_deformed            lowering a with raising f(N) a^dagger, spectrum n f(n)
  h_deformed            the f_deformed family with f = h^2
  two_by_two            exact two-level family from a (beta, delta) matrix pair
  similarity_diagonal   diagonal similarity of a reference ladder
  quon                  geometric-sum spectrum ladder, optionally conjugated
                        by exp(N0)

Each factory returns a fully assembled family; companion ``*_closed_form``
helpers expose the analytic ladder vectors used as test oracles.
"""

import warnings
from dataclasses import dataclass, field

import numpy as np
from numpy.polynomial import polynomial as npoly

from .core import (
    EpsilonSequence,
    adjoint,
    apply_function,
    epsilon_quon,
    ladder_lowering,
    make_epsilon,
    max_abs,
    number_operator,
)
from .engine import NlpbFamily, _assemble_family, build_by_similarity, build_from_vacua
from .errors import (
    InvalidF,
    InvalidParams,
    InvalidQ,
    InvalidS,
    LadderMismatch,
    NegativeEpsilon,
    NonMonotone,
    NotHermitianS,
)

QMUTATOR_TOL = 1e-10


@dataclass(frozen=True)
class ModelSpec:
    """Serializable description of a zoo family: kind, parameters, truncation."""

    kind: str
    params: dict = field(default_factory=dict)
    dim: int = 0
    depth: int = 0

    def to_dict(self) -> dict:
        return {"kind": self.kind, "params": dict(self.params), "dim": self.dim, "depth": self.depth}


KINDS: dict[str, dict] = {
    "f_deformed": {
        "description": "deformed raising f(N) a† over a boson pair; spectrum n f(n)",
        "params": {"f": "ascending polynomial coefficients, f(0) = 0, f(n) > 0"},
        "defaults": {"params": {"f": [0.0, 1.0]}, "dim": 30, "depth": 20},
    },
    "h_deformed": {
        "description": "f_deformed with f = h^2; spectrum n h(n)^2",
        "params": {"h": "ascending polynomial coefficients (h(0) = 0 expected)"},
        "defaults": {"params": {"h": [0.0, 1.0]}, "dim": 30, "depth": 20},
    },
    "similarity_diagonal": {
        "description": "diagonal similarity of the reference ladder for a chosen spectrum",
        "params": {
            "s": "positive diagonal weights: explicit list or {name: sin, amplitude: a}",
            "eps": "spectrum: explicit list or {name: linear|quon|poly_times_n, ...}",
        },
        "defaults": {
            "params": {"s": {"name": "sin", "amplitude": 0.5}, "eps": {"name": "quon", "q": 0.5}},
            "dim": 40,
            "depth": 30,
        },
    },
    "two_by_two": {
        "description": "exact two-level family from the (beta, delta) matrix pair",
        "params": {"beta": "real, nonzero", "delta": "real, nonzero, beta*delta < 0"},
        "defaults": {"params": {"beta": 2.0, "delta": -1.0}, "dim": 2, "depth": 1},
    },
    "quon": {
        "description": "geometric-sum spectrum ladder (q-mutator), optional exp(N0) similarity",
        "params": {"q": "in (0, 1) for a monotone spectrum", "use_n0_similarity": "bool"},
        "defaults": {"params": {"q": 0.5, "use_n0_similarity": True}, "dim": 40, "depth": 30},
    },
}


def _poly_values(coeffs, n: np.ndarray) -> np.ndarray:
    return npoly.polyval(n, np.asarray(coeffs, dtype=float))


def make_f_deformed(f_coeffs, dim: int, depth: int, _check_f0: bool = True) -> NlpbFamily:
    """Family with a the boson lowering ladder and b = f(N) a^dagger.

    ``f_coeffs`` are ascending polynomial coefficients. Requires f(0) = 0
    (InvalidF), f(n) > 0 for 1 <= n <= depth (InvalidF), and a strictly
    increasing spectrum n f(n) over the whole truncated range (NonMonotone).
    """
    coeffs = np.asarray(f_coeffs, dtype=float)
    n = np.arange(dim, dtype=float)
    fvals = _poly_values(coeffs, n)
    if _check_f0 and fvals[0] != 0.0:
        raise InvalidF(f"f(0) = {fvals[0]!r}, must be exactly zero")
    lo = min(depth, dim - 1)
    if np.any(fvals[1 : lo + 1] <= 0.0):
        raise InvalidF("f(n) must be strictly positive for 1 <= n <= depth")
    eps_vals = n * fvals
    if np.any(np.diff(eps_vals) <= 0.0):
        raise NonMonotone("spectrum n f(n) is not strictly increasing on the truncated range")
    eps = make_epsilon(eps_vals)

    base = epsilon_linear(dim)
    a = ladder_lowering(base)
    f_of_n = apply_function(number_operator(base), lambda x: npoly.polyval(x, coeffs))
    b = f_of_n @ adjoint(a)
    return build_from_vacua(a, b, eps, depth)


def f_deformed_closed_form(f_coeffs, dim: int, depth: int) -> tuple[np.ndarray, np.ndarray]:
    """Analytic ladder vectors: phi_n = sqrt(F_n) e_n, eta_n = e_n / sqrt(F_n),
    where F_n is the running product f(1) f(2) ... f(n)."""
    fvals = _poly_values(f_coeffs, np.arange(dim, dtype=float))
    running = np.concatenate([[1.0], np.cumprod(fvals[1 : depth + 1])])
    phi = np.zeros((depth + 1, dim), dtype=np.complex128)
    eta = np.zeros((depth + 1, dim), dtype=np.complex128)
    roots = np.sqrt(running)
    phi[np.arange(depth + 1), np.arange(depth + 1)] = roots
    eta[np.arange(depth + 1), np.arange(depth + 1)] = 1.0 / roots
    return phi, eta


def make_h_deformed(h_coeffs, dim: int, depth: int) -> NlpbFamily:
    """The f_deformed family with f = h^2 (spectrum n h(n)^2).

    A nonzero h(0) is allowed but flagged with a warning: the construction
    still goes through whenever the squared polynomial stays positive and the
    spectrum stays monotone.
    """
    coeffs = np.asarray(h_coeffs, dtype=float)
    h0 = float(npoly.polyval(0.0, coeffs))
    if h0 != 0.0:
        warnings.warn(f"h(0) = {h0!r} != 0; constructing anyway", UserWarning, stacklevel=2)
    f_coeffs = npoly.polymul(coeffs, coeffs)
    return make_f_deformed(f_coeffs, dim, depth, _check_f0=(h0 == 0.0))


def make_two_by_two(beta: float, delta: float) -> NlpbFamily:
    """Exact family on C^2 from the classic (beta, delta) matrix pair.

    The single nontrivial eigenvalue is -(beta - delta)^2 / (beta delta),
    positive exactly when beta * delta < 0 (NegativeEpsilon otherwise).
    Normalization: phi_0 = (beta, 1) / sqrt(1 + beta^2) and eta_0 scaled so
    the vacuum pairing is one.
    """
    if beta == 0.0 or delta == 0.0:
        raise InvalidParams("beta and delta must be nonzero")
    if beta == delta:
        raise InvalidParams("beta == delta makes the two matrices commute")
    if beta * delta > 0.0:
        raise NegativeEpsilon(f"beta*delta = {beta * delta!r} > 0 gives a negative eigenvalue")

    a = np.array([[-1.0, beta], [-1.0 / beta, 1.0]], dtype=np.complex128)
    b = np.array([[-1.0, delta], [-1.0 / delta, 1.0]], dtype=np.complex128)
    eps1 = -((beta - delta) ** 2) / (beta * delta)
    eps = make_epsilon([0.0, eps1])

    y = 1.0 / np.hypot(1.0, beta)
    w = 1.0 / (y * (beta - delta))
    phi0 = y * np.array([beta, 1.0], dtype=np.complex128)
    eta0 = w * np.array([1.0, -delta], dtype=np.complex128)
    return _assemble_family(a, b, eps, 1, phi0, eta0)


def make_similarity_diagonal(s, eps, dim: int, depth: int) -> NlpbFamily:
    """Diagonal similarity diag(s) of the reference ladder for ``eps``.

    All weights must be strictly positive and bounded (InvalidS otherwise);
    such families satisfy the whole battery with a regular verdict.
    """
    weights = np.asarray(s, dtype=float)
    if weights.shape != (dim,):
        raise InvalidS(f"need {dim} diagonal weights, got shape {weights.shape}")
    if not np.all(np.isfinite(weights)) or np.any(weights <= 0.0):
        raise InvalidS("diagonal weights must be finite and strictly positive")
    if not isinstance(eps, EpsilonSequence):
        eps = make_epsilon(eps)
    c = ladder_lowering(eps)
    t = np.diag(weights).astype(np.complex128)
    return build_by_similarity(c, t, eps, depth)


def make_quon(q: float, dim: int, depth: int, use_n0_similarity: bool = False) -> NlpbFamily:
    """Ladder family for the geometric-sum spectrum (1 - q^n) / (1 - q).

    The defining relation c c^dagger - q c^dagger c = 1 is verified on the
    interior block at construction time. With ``use_n0_similarity`` (needs
    0 < q < 1) the pair is conjugated by exp(N0), N0 = c^dagger c, which
    rescales the ladder vectors by exp(+-eps_n). Note the spectrum is only
    strictly increasing for 0 < q < 1 once dim >= 3; other admissible q are
    rejected by the sequence validator.
    """
    if not -1.0 < q < 1.0:
        raise InvalidQ(f"q = {q!r} outside (-1, 1)")
    eps = epsilon_quon(q, dim)
    c = ladder_lowering(eps)

    qm = c @ adjoint(c) - q * (adjoint(c) @ c) - np.eye(dim)
    defect = max_abs(qm[: dim - 1, : dim - 1])
    if defect > QMUTATOR_TOL:
        raise LadderMismatch(f"q-mutator defect {defect:.3e} on the interior block")

    if use_n0_similarity:
        if not 0.0 < q < 1.0:
            raise InvalidQ("exp(N0) similarity requires 0 < q < 1")
        t = apply_function(number_operator(eps), np.exp)
    else:
        t = np.eye(dim, dtype=np.complex128)
    return build_by_similarity(c, t, eps, depth)


def make_bounded_similarity(base: NlpbFamily, s) -> NlpbFamily:
    """Conjugate a family by exp(S) for Hermitian S (NotHermitianS otherwise).

    The new ladder vectors are checked against the closed forms exp(S) phi_n
    and exp(-S) eta_n (up to the vacuum normalization scalar); a mismatch
    raises LadderMismatch.
    """
    s = np.asarray(s, dtype=np.complex128)
    if max_abs(s - adjoint(s)) > 1e-10 * max(1.0, max_abs(s)):
        raise NotHermitianS("similarity generator is not Hermitian")
    grow = apply_function(s, np.exp)
    shrink = apply_function(s, lambda x: np.exp(-x))

    a2 = grow @ base.a @ shrink
    b2 = grow @ base.b @ shrink
    phi0 = grow @ base.phi[0]
    eta0 = shrink @ base.eta[0]
    fam = _assemble_family(a2, b2, base.eps, base.depth, phi0, eta0)

    mapped_phi = (grow @ base.phi.T).T
    kappa = np.vdot(mapped_phi[0], fam.phi[0]) / np.vdot(mapped_phi[0], mapped_phi[0])
    mapped_eta = (shrink @ base.eta.T).T / np.conj(kappa)
    mapped_phi = mapped_phi * kappa
    worst = max(
        max_abs(fam.phi - mapped_phi) / max(1.0, max_abs(fam.phi)),
        max_abs(fam.eta - mapped_eta) / max(1.0, max_abs(fam.eta)),
    )
    if worst > 1e-9:
        raise LadderMismatch(f"conjugated ladder deviates from closed form by {worst:.3e}")
    return fam


def _eps_from_param(param, dim: int) -> EpsilonSequence:
    if isinstance(param, EpsilonSequence):
        return param
    if isinstance(param, dict):
        name = param.get("name")
        if name == "linear":
            return make_epsilon(np.arange(dim, dtype=float))
        if name == "quon":
            return epsilon_quon(float(param["q"]), dim)
        if name == "poly_times_n":
            n = np.arange(dim, dtype=float)
            return make_epsilon(n * _poly_values(param["f"], n))
        raise InvalidParams(f"unknown spectrum generator {name!r}")
    return make_epsilon(param)


def _weights_from_param(param, dim: int) -> np.ndarray:
    if isinstance(param, dict):
        if param.get("name") == "sin":
            amp = float(param.get("amplitude", 0.5))
            return 1.0 + amp * np.sin(np.arange(dim, dtype=float))
        raise InvalidParams(f"unknown weight generator {param.get('name')!r}")
    return np.asarray(param, dtype=float)


def default_spec(kind: str) -> ModelSpec:
    if kind not in KINDS:
        raise InvalidParams(f"unknown model kind {kind!r}")
    d = KINDS[kind]["defaults"]
    return ModelSpec(kind=kind, params=dict(d["params"]), dim=d["dim"], depth=d["depth"])


def build_family(spec: ModelSpec) -> NlpbFamily:
    """Instantiate the family described by a ModelSpec."""
    kind, p = spec.kind, spec.params
    if kind == "f_deformed":
        return make_f_deformed(p["f"], spec.dim, spec.depth)
    if kind == "h_deformed":
        return make_h_deformed(p["h"], spec.dim, spec.depth)
    if kind == "similarity_diagonal":
        eps = _eps_from_param(p["eps"], spec.dim)
        return make_similarity_diagonal(_weights_from_param(p["s"], spec.dim), eps, spec.dim, spec.depth)
    if kind == "two_by_two":
        return make_two_by_two(float(p["beta"]), float(p["delta"]))
    if kind == "quon":
        return make_quon(float(p["q"]), spec.dim, spec.depth, bool(p.get("use_n0_similarity", False)))
    raise InvalidParams(f"unknown model kind {kind!r}")


def family_epsilon(spec: ModelSpec) -> EpsilonSequence:
    """The spectrum a spec would build, without assembling the family."""
    kind, p = spec.kind, spec.params
    n = np.arange(spec.dim, dtype=float)
    if kind == "f_deformed":
        return make_epsilon(n * _poly_values(p["f"], n))
    if kind == "h_deformed":
        return make_epsilon(n * _poly_values(p["h"], n) ** 2)
    if kind == "similarity_diagonal":
        return _eps_from_param(p["eps"], spec.dim)
    if kind == "two_by_two":
        beta, delta = float(p["beta"]), float(p["delta"])
        return make_epsilon([0.0, -((beta - delta) ** 2) / (beta * delta)])
    if kind == "quon":
        return epsilon_quon(float(p["q"]), spec.dim)
    raise InvalidParams(f"unknown model kind {kind!r}")
