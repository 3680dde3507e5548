"""Matrix-field weighting of error covariances.

A weighting operator maps an error covariance Phi to

    Psi(Phi) = sum_k  W_k^H Phi W_k  +  Pi,

with rectangular factors W_k (n_streams x m) and a Hermitian PSD offset Pi
(m x m).  The map is linear in Phi up to the constant offset, preserves the
Loewner order, and subsumes the classical diagonal weighted-MSE objective
(one factor W = diag(sqrt(w)), Pi = 0).
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import InvalidWeight, NotPSD, PreconditionError, ShapeError
from .mimo import SystemModel, mse_lmmse
from .spectral import PSD_RTOL, as_matrix, hermitize, loewner_leq, symmetrize


@dataclass(frozen=True, eq=False)
class WeightingOperator:
    """Immutable bundle of weighting factors (W_1, ..., W_K) and offset Pi."""

    weights: tuple
    offset: np.ndarray

    def __post_init__(self):
        ws = tuple(as_matrix(w) for w in self.weights)
        if len(ws) < 1:
            raise InvalidWeight("need at least one weighting factor")
        shape = ws[0].shape
        for w in ws[1:]:
            if w.shape != shape:
                raise ShapeError(f"all weighting factors must share shape {shape}, got {w.shape}")
        pi = hermitize(self.offset)
        if pi.shape[0] != shape[1]:
            raise ShapeError(
                f"offset must be {shape[1]}x{shape[1]} to match the factor columns, got {pi.shape}"
            )
        w_eigs = np.linalg.eigvalsh(pi)
        if w_eigs.size and w_eigs.min() < -PSD_RTOL * max(float(np.abs(w_eigs).max()), 1e-300):
            raise NotPSD("offset matrix must be positive semi-definite")
        object.__setattr__(self, "weights", ws)
        object.__setattr__(self, "offset", pi)

    @property
    def k(self) -> int:
        return len(self.weights)

    @property
    def n_streams(self) -> int:
        return self.weights[0].shape[0]

    @property
    def out_dim(self) -> int:
        return self.weights[0].shape[1]

    def apply(self, phi) -> np.ndarray:
        """Psi(Phi) = sum_k W_k^H Phi W_k + Pi."""
        p = hermitize(phi)
        if p.shape[0] != self.n_streams:
            raise ShapeError(
                f"operator acts on {self.n_streams}x{self.n_streams} matrices, got {p.shape}"
            )
        out = self.offset.astype(np.complex128, copy=True)
        for w in self.weights:
            out = out + w.conj().T @ p @ w
        return symmetrize(out)

    def factor_gram(self) -> np.ndarray:
        """sum_k W_k^H W_k, the image of the identity minus the offset."""
        out = np.zeros((self.out_dim, self.out_dim), dtype=np.complex128)
        for w in self.weights:
            out = out + w.conj().T @ w
        return symmetrize(out)


def from_classical_weights(weights) -> WeightingOperator:
    """Embed diagonal per-stream weights: W = diag(sqrt(w)), Pi = 0."""
    w = np.asarray(weights, dtype=np.float64)
    if w.ndim != 1 or w.size < 1:
        raise InvalidWeight("classical weights must be a nonempty 1-D array")
    if not np.all(np.isfinite(w)) or np.any(w < 0.0):
        raise InvalidWeight("classical weights must be finite and nonnegative")
    n = w.size
    return WeightingOperator(
        weights=(np.diag(np.sqrt(w)).astype(np.complex128),),
        offset=np.zeros((n, n), dtype=np.complex128),
    )


def weighted_mse_of_precoder(op: WeightingOperator, model: SystemModel, precoder) -> np.ndarray:
    """Weighted error covariance at the MMSE equalizer for a given precoder."""
    if op.n_streams != model.n_streams:
        raise ShapeError(
            f"operator expects {op.n_streams} streams but the model has {model.n_streams}"
        )
    return op.apply(mse_lmmse(model, precoder))


def monotonicity_check(op: WeightingOperator, a, b, tol: float = 1e-8) -> bool:
    """Loewner-order preservation check: A <= B implies Psi(A) <= Psi(B).

    Raises PreconditionError unless A <= B holds to the same tolerance.
    """
    if not loewner_leq(a, b, tol):
        raise PreconditionError("monotonicity check requires A <= B in the Loewner order")
    return loewner_leq(op.apply(a), op.apply(b), tol)
