"""Two-hop amplify-and-forward relay link as a weighted point-to-point design.

Source symbols with covariance R_s reach the relay through H1 with noise
covariance R_n1; the relay applies a forwarding matrix P and transmits over
H2 with destination noise covariance R_n2.  The end-to-end LMMSE error
covariance of the chain,

    Psi(P) = R_s - R_s H1^H P^H H2^H (H2 P C1 P^H H2^H + R_n2)^{-1} H2 P H1 R_s,
    C1 = H1 R_s H1^H + R_n1,

is exactly the weighted error covariance of a point-to-point model with
channel H2, noise R_n2, precoder F = P C1^{1/2}, one weighting factor
W = C1^{-1/2} H1 R_s, and offset Pi = R_s - W^H W (the first-hop LMMSE
error covariance).  The relay power Tr(P C1 P^H) equals Tr(F F^H), so both
structured designs transfer verbatim.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .design import PrecoderDesign, design_det_min, design_trace_min
from .errors import NotPD, NumericalError, ShapeError
from .mimo import SystemModel
from .spectral import as_matrix, hermitian_sqrt, hermitize, inv_sqrt_pd, logdet_pd, symmetrize
from .weighting import WeightingOperator


@dataclass(frozen=True, eq=False)
class RelayModel:
    """Matrices and power budget of the two-hop chain.

    channel1   : n_relay_rx x n_src first-hop channel H1
    channel2   : n_dst x n_relay_tx second-hop channel H2
    source_cov : n_src x n_src, strictly positive definite R_s
    noise1_cov : n_relay_rx x n_relay_rx, strictly positive definite R_n1
    noise2_cov : n_dst x n_dst, strictly positive definite R_n2
    power      : relay budget, Tr(P C1 P^H) <= power
    """

    channel1: np.ndarray
    channel2: np.ndarray
    source_cov: np.ndarray
    noise1_cov: np.ndarray
    noise2_cov: np.ndarray
    power: float

    def __post_init__(self):
        h1 = as_matrix(self.channel1)
        h2 = as_matrix(self.channel2)
        rs = hermitize(self.source_cov)
        r1 = hermitize(self.noise1_cov)
        r2 = hermitize(self.noise2_cov)
        if rs.shape[0] != h1.shape[1]:
            raise ShapeError(f"source covariance {rs.shape} does not match H1 inputs {h1.shape[1]}")
        if r1.shape[0] != h1.shape[0]:
            raise ShapeError(f"relay noise covariance {r1.shape} does not match H1 outputs")
        if r2.shape[0] != h2.shape[0]:
            raise ShapeError(f"destination noise covariance {r2.shape} does not match H2 outputs")
        for mat, name in ((rs, "source"), (r1, "relay noise"), (r2, "destination noise")):
            if np.linalg.eigvalsh(mat).min() <= 0.0:
                raise NotPD(f"{name} covariance must be strictly positive definite")
        if not float(self.power) > 0.0:
            raise ValueError("relay power budget must be positive")
        object.__setattr__(self, "channel1", h1)
        object.__setattr__(self, "channel2", h2)
        object.__setattr__(self, "source_cov", rs)
        object.__setattr__(self, "noise1_cov", r1)
        object.__setattr__(self, "noise2_cov", r2)
        object.__setattr__(self, "power", float(self.power))

    @property
    def n_src(self) -> int:
        return self.channel1.shape[1]

    @property
    def n_relay_rx(self) -> int:
        return self.channel1.shape[0]

    @property
    def n_relay_tx(self) -> int:
        return self.channel2.shape[1]

    @property
    def n_dst(self) -> int:
        return self.channel2.shape[0]


def first_hop_gram(model: RelayModel) -> np.ndarray:
    """C1 = H1 R_s H1^H + R_n1, the relay-input covariance (always PD)."""
    h1 = model.channel1
    return symmetrize(h1 @ model.source_cov @ h1.conj().T + model.noise1_cov)


def _check_forwarding(model: RelayModel, forwarding) -> np.ndarray:
    p = as_matrix(forwarding)
    if p.shape != (model.n_relay_tx, model.n_relay_rx):
        raise ShapeError(
            f"forwarding matrix must be {(model.n_relay_tx, model.n_relay_rx)}, got {p.shape}"
        )
    return p


def relay_transmit_power(model: RelayModel, forwarding) -> float:
    """Average relay transmit power Tr(P C1 P^H)."""
    p = _check_forwarding(model, forwarding)
    c1 = first_hop_gram(model)
    return float(np.real(np.trace(p @ c1 @ p.conj().T)))


def relay_to_weighted(model: RelayModel) -> tuple[SystemModel, WeightingOperator]:
    """Point-to-point model and weighting operator equivalent to the chain.

    The offset Pi = R_s - W^H W is the first-hop LMMSE error covariance; it
    is rebuilt from its eigendecomposition only when rounding left a
    slightly negative eigenvalue (floor -1e-12 * Tr).
    """
    c1 = first_hop_gram(model)
    c1_inv_sqrt = inv_sqrt_pd(c1)
    h1rs = model.channel1 @ model.source_cov
    w = c1_inv_sqrt @ h1rs
    try:
        x = np.linalg.solve(c1, h1rs)
    except np.linalg.LinAlgError as exc:  # pragma: no cover - C1 is PD
        raise NumericalError(f"first-hop Gram solve failed: {exc}") from None
    pi = symmetrize(model.source_cov - h1rs.conj().T @ x)
    eigs, vecs = np.linalg.eigh(pi)
    if eigs.min() < 0.0:
        floor = -1e-12 * max(float(np.real(np.trace(pi))), 1e-300)
        if eigs.min() < floor:
            raise NumericalError(
                "first-hop error covariance lost semi-definiteness beyond rounding"
            )
        pi = symmetrize((vecs * np.clip(eigs, 0.0, None)) @ vecs.conj().T)
    sysmodel = SystemModel(
        channel=model.channel2,
        noise_cov=model.noise2_cov,
        n_streams=model.n_relay_rx,
        power=model.power,
    )
    return sysmodel, WeightingOperator(weights=(w,), offset=pi)


def precoder_to_forwarding(model: RelayModel, precoder) -> np.ndarray:
    """P = F C1^{-1/2}; preserves the power, Tr(P C1 P^H) = Tr(F F^H)."""
    f = as_matrix(precoder)
    if f.shape != (model.n_relay_tx, model.n_relay_rx):
        raise ShapeError(
            f"precoder must be {(model.n_relay_tx, model.n_relay_rx)}, got {f.shape}"
        )
    return f @ inv_sqrt_pd(first_hop_gram(model))


def forwarding_to_precoder(model: RelayModel, forwarding) -> np.ndarray:
    """Inverse map F = P C1^{1/2} of precoder_to_forwarding."""
    p = _check_forwarding(model, forwarding)
    return p @ hermitian_sqrt(first_hop_gram(model))


def relay_weighted_mse(model: RelayModel, forwarding) -> np.ndarray:
    """End-to-end LMMSE error covariance Psi(P) computed through the chain."""
    p = _check_forwarding(model, forwarding)
    c1 = first_hop_gram(model)
    t = model.channel2 @ p
    bracket = symmetrize(t @ c1 @ t.conj().T + model.noise2_cov)
    a2 = t @ model.channel1 @ model.source_cov
    try:
        x = np.linalg.solve(bracket, a2)
    except np.linalg.LinAlgError as exc:  # pragma: no cover - bracket is PD
        raise NumericalError(f"relay bracket solve failed: {exc}") from None
    return symmetrize(model.source_cov - a2.conj().T @ x)


def relay_capacity(model: RelayModel, forwarding) -> float:
    """Source-destination mutual information of the chain with Gaussian signaling.

    Computed as log det R_s - log det Psi(P) and cross-checked against the
    direct form log det(A R_s A^H C^{-1} + I) with A = H2 P H1 and
    C = H2 P R_n1 P^H H2^H + R_n2; disagreement beyond 1e-9 relative raises
    NumericalError.
    """
    p = _check_forwarding(model, forwarding)
    cap_err = logdet_pd(model.source_cov) - logdet_pd(relay_weighted_mse(model, p))
    t = model.channel2 @ p
    a = t @ model.channel1
    c = symmetrize(t @ model.noise1_cov @ t.conj().T + model.noise2_cov)
    m = symmetrize(a @ model.source_cov @ a.conj().T)
    cap_mi = logdet_pd(c + m) - logdet_pd(c)
    if abs(cap_err - cap_mi) > 1e-9 * max(1.0, abs(cap_err), abs(cap_mi)):
        raise NumericalError(
            "capacity routes disagree: {:.12e} vs {:.12e}".format(cap_err, cap_mi)
        )
    return cap_err


def design_relay_sum_mse(model: RelayModel) -> tuple[np.ndarray, float, PrecoderDesign]:
    """Forwarding matrix minimizing Tr Psi(P) under the relay power budget.

    Returns (P, objective, design) with the objective re-evaluated through
    the relay chain at the returned P.
    """
    sysmodel, op = relay_to_weighted(model)
    design = design_trace_min(sysmodel, op)
    p = precoder_to_forwarding(model, design.precoder)
    objective = float(np.real(np.trace(relay_weighted_mse(model, p))))
    return p, objective, design


def design_relay_capacity(
    model: RelayModel, jitter_pi: bool = False
) -> tuple[np.ndarray, float, PrecoderDesign]:
    """Forwarding matrix maximizing the chain mutual information.

    Equivalent to minimizing log det Psi(P).  Requires the first-hop error
    covariance to be strictly positive definite unless jitter_pi is set.
    Returns (P, capacity, design) with the capacity re-evaluated through the
    relay chain at the returned P.
    """
    sysmodel, op = relay_to_weighted(model)
    design = design_det_min(sysmodel, op, jitter_pi=jitter_pi)
    p = precoder_to_forwarding(model, design.precoder)
    return p, relay_capacity(model, p), design
