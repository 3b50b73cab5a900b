"""L²-nuclearity index and the twisted-Fock geometric-series trace-norm identity.

Finite dimensions admit no proper inclusions of standard subspaces, so the index
of a pair is always ≥ 1 when K = H (it equals d). The arithmetic is therefore
checked on arbitrary pairs (H, K), and the bounded-sum property on an explicit
one-particle operator with trace norm below one.
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import PreconditionError, ValidationError
from .fock import build
from .standard_subspace import StandardSubspace
from .tensor_core import kron_power, opnorm, trace_norm
from .twist import Twist, compatibility_residual

COMPAT_TOL = 1e-10


@dataclass(frozen=True)
class NuclearityReport:
    one_particle_index: float
    tau: tuple
    truncated_sum: float
    geometric_sum: float
    deviation: float

    def as_dict(self) -> dict:
        return {
            "one_particle_index": self.one_particle_index,
            "tau": list(self.tau),
            "truncated_sum": self.truncated_sum,
            "geometric_sum": self.geometric_sum,
            "deviation": self.deviation,
        }


def one_particle_operator(H: StandardSubspace, K: StandardSubspace) -> np.ndarray:
    """Δ_H^{1/4} Δ_K^{-1/4}."""
    if H.dim != K.dim:
        raise ValidationError("l2_index needs subspaces of equal dimension")
    return H.delta_power(0.25) @ K.delta_power(-0.25)


def l2_index(H: StandardSubspace, K: StandardSubspace) -> float:
    return trace_norm(one_particle_operator(H, K))


def twisted_trace_norms(T: Twist, X: np.ndarray, N: int) -> list[float]:
    """τ_n = ‖P_n^{1/2} X^{⊗n} (P_n^{1/2})^+‖_1 for n = 0..N, by singular values."""
    FS = build(T, N)
    return [trace_norm(FS.sqrtP[n] @ kron_power(X, n) @ FS.sqrtP_pinv[n]) for n in range(N + 1)]


def fock_l2_check(T: Twist, H: StandardSubspace, K: StandardSubspace, N: int) -> NuclearityReport:
    """Compare τ_n against x^n with x the one-particle index."""
    if T.norm >= 1:
        raise PreconditionError("fock_l2_check needs ‖T‖ < 1")
    for name, S in (("H", H), ("K", K)):
        scale = 1 + opnorm(S.delta_matrix) ** 2
        r = compatibility_residual(T, S)
        if r > COMPAT_TOL * scale:
            raise PreconditionError(f"twist is not compatible with {name} (residual {r:.3e})")
    X = one_particle_operator(H, K)
    return report_for_operator(T, X, N)


def report_for_operator(T: Twist, X: np.ndarray, N: int) -> NuclearityReport:
    x = trace_norm(X)
    tau = twisted_trace_norms(T, X, N)
    geo = [x ** n for n in range(N + 1)]
    dev = max(abs(a - b) for a, b in zip(tau, geo))
    return NuclearityReport(x, tuple(tau), float(sum(tau)), float(sum(geo)), float(dev))


def partial_sums(report: NuclearityReport) -> list[float]:
    return list(np.cumsum(report.tau))
