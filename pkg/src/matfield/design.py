"""Structured precoder design under matrix-field weighting.

For a single weighting factor (K = 1) the optimal precoder has the form

    F = V_H  diag_rect(f)  U_F^H,

where V_H is the right singular basis of the noise-whitened channel
R_n^{-1/2} H (singular values decreasing), the rotation U_F is the left
singular basis of W (trace objective) or the eigenbasis of W Pi^{-1} W^H
(log-det objective), and the amplitudes f come from a scalar water-filling
problem over the paired spectra.  Pairing is index-aligned after sorting
both spectra in decreasing order, and the products lambda_h[j] * f[j]^2
stay nonincreasing, which is exactly the ordering the rank-one bounds below
need for equality.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import NotPD, NotPSD, PreconditionError, ShapeError, Unsupported
from .mimo import SystemModel
from .spectral import (
    PSD_RTOL,
    as_matrix,
    hermitize,
    inv_sqrt_pd,
    logdet_pd,
    ordered_evd,
    ordered_svd,
    symmetrize,
)
from .weighting import WeightingOperator, weighted_mse_of_precoder

# water-filling bracket guard and termination (fixed, not configurable)
_MU_FLOOR = 1e-300
_WF_MAX_ITER = 200
_WF_POWER_RTOL = 1e-10


@dataclass(frozen=True, eq=False)
class WhitenedChannel:
    """Spectrum of the noise-whitened channel R_n^{-1/2} H.

    eigenvalues : n_tx values of H^H R_n^{-1} H, sorted decreasing
                  (squared singular values of the whitened channel, zero padded)
    basis       : n_tx x n_tx unitary V_H of right singular vectors
    """

    eigenvalues: np.ndarray
    basis: np.ndarray


@dataclass(frozen=True, eq=False)
class PrecoderDesign:
    """Result of a structured design.

    channel_basis   : V_H from the whitened channel
    gains           : per-mode amplitudes f_j >= 0, length min(n_tx, n_streams)
    rotation        : n_streams x n_streams unitary U_F
    precoder        : assembled F = V_H diag_rect(gains) rotation^H
    objective_value : objective evaluated at the assembled precoder
    multiplier      : water-level dual variable of the power constraint
    """

    channel_basis: np.ndarray
    gains: np.ndarray
    rotation: np.ndarray
    precoder: np.ndarray
    objective_value: float
    multiplier: float


def whiten_channel(model: SystemModel) -> WhitenedChannel:
    """Ordered spectrum and right singular basis of R_n^{-1/2} H."""
    try:
        w_inv_sqrt = inv_sqrt_pd(model.noise_cov)
    except NotPD:
        raise NotPD("noise covariance is singular, cannot whiten") from None
    svd = ordered_svd(w_inv_sqrt @ model.channel)
    lam = np.zeros(model.n_tx, dtype=np.float64)
    lam[: svd.s.size] = svd.s**2
    return WhitenedChannel(eigenvalues=lam, basis=svd.v)


# ---------------------------------------------------------------------------
# spectral lower bounds used by the structural arguments


def trace_product_lower_bound(a, b, slack: float = 1e-9) -> tuple[float, bool]:
    """Reverse-ordered eigenvalue bound sum_i lam_i(A) lam_{N-i+1}(B) <= Tr(AB).

    Both inputs must be Hermitian PSD of equal shape.  Returns (bound, holds)
    where holds allows `slack` relative to max(1, |Tr(AB)|).  Equality is
    attained when A and B share eigenvectors with reversed eigenvalue order.
    """
    ha = hermitize(a)
    hb = hermitize(b)
    if ha.shape != hb.shape:
        raise ShapeError(f"need equal shapes, got {ha.shape} vs {hb.shape}")
    wa = np.linalg.eigvalsh(ha)
    wb = np.linalg.eigvalsh(hb)
    for w, name in ((wa, "A"), (wb, "B")):
        if w.size and w.min() < -PSD_RTOL * max(float(np.abs(w).max()), 1e-300):
            raise NotPSD(f"{name} must be positive semi-definite")
    bound = float(np.sum(wa[::-1] * wb))  # A decreasing against B increasing
    tr = float(np.real(np.trace(ha @ hb)))
    holds = bound <= tr + slack * max(1.0, abs(tr))
    return bound, holds


def det_sum_lower_bound(a, b, slack: float = 1e-9) -> tuple[float, bool]:
    """Aligned-ordered bound prod_i (lam_i(A) + lam_i(B)) <= det(A + B).

    Both spectra sorted decreasing.  Equality is attained when A and B share
    eigenvectors with both eigenvalue lists in decreasing order.
    """
    ha = hermitize(a)
    hb = hermitize(b)
    if ha.shape != hb.shape:
        raise ShapeError(f"need equal shapes, got {ha.shape} vs {hb.shape}")
    wa = np.linalg.eigvalsh(ha)
    wb = np.linalg.eigvalsh(hb)
    for w, name in ((wa, "A"), (wb, "B")):
        if w.size and w.min() < -PSD_RTOL * max(float(np.abs(w).max()), 1e-300):
            raise NotPSD(f"{name} must be positive semi-definite")
    bound = float(np.prod(wa[::-1] + wb[::-1]))  # both decreasing, aligned
    det = float(np.real(np.linalg.det(ha + hb)))
    holds = bound <= det * (1.0 + slack) + 1e-15 * max(1.0, abs(det))
    return bound, holds


# ---------------------------------------------------------------------------
# scalar water-filling solvers


def _check_waterfill_inputs(a, b, power: float) -> tuple[np.ndarray, np.ndarray]:
    av = np.asarray(a, dtype=np.float64)
    bv = np.asarray(b, dtype=np.float64)
    if av.ndim != 1 or bv.ndim != 1:
        raise ShapeError("water-filling inputs must be 1-D")
    if av.size != bv.size:
        raise ShapeError(f"spectra lengths differ: {av.size} vs {bv.size}")
    if not (np.all(np.isfinite(av)) and np.all(np.isfinite(bv))):
        raise PreconditionError("spectra must be finite")
    if np.any(av < 0.0) or np.any(bv < 0.0):
        raise PreconditionError("spectra must be nonnegative")
    if np.any(np.diff(av) > 1e-12 * max(1.0, float(av.max(initial=0.0)))) or np.any(
        np.diff(bv) > 1e-12 * max(1.0, float(bv.max(initial=0.0)))
    ):
        raise PreconditionError("spectra must be sorted in decreasing order")
    if not power > 0.0:
        raise PreconditionError("power budget must be positive")
    return av, bv


def _bisect_water_level(alloc, power: float, mu_hi: float) -> tuple[np.ndarray, float]:
    """Find mu with sum(alloc(mu)) = power by bisection on log(mu).

    alloc(mu) must be elementwise nonincreasing in mu with alloc -> inf as
    mu -> 0.  Terminates at |sum - power| <= 1e-10 * power or 200 iterations.
    """
    lo = mu_hi
    with np.errstate(over="ignore", invalid="ignore"):
        while np.sum(alloc(lo)) < power:
            lo *= 0.5
            if lo < _MU_FLOOR:
                break
        hi = mu_hi
        best_mu = lo
        best_gap = abs(float(np.sum(alloc(lo))) - power)
        for _ in range(_WF_MAX_ITER):
            mid = float(np.sqrt(lo * hi))
            total = float(np.sum(alloc(mid)))
            gap = abs(total - power)
            if gap < best_gap:
                best_gap, best_mu = gap, mid
            if gap <= _WF_POWER_RTOL * power:
                break
            if total >= power:
                lo = mid
            else:
                hi = mid
            if not lo < hi:
                break
    x = np.asarray(alloc(best_mu), dtype=np.float64)
    return x, best_mu


def waterfill_trace(weight_eigs, channel_eigs, power: float) -> tuple[np.ndarray, float]:
    """Minimize sum_j a_j / (1 + b_j x_j) over x >= 0, sum x <= power.

    a = weight_eigs and b = channel_eigs must be sorted decreasing, paired by
    index.  Returns (x, mu) with x the per-mode squared amplitudes and mu the
    water-level dual variable; modes with a_j * b_j = 0 get x_j = 0.  When at
    least one product is positive the full budget is spent.
    """
    a, b = _check_waterfill_inputs(weight_eigs, channel_eigs, power)
    prod = a * b
    if not np.any(prod > 0.0):
        return np.zeros(a.size), 0.0
    active = prod > 0.0
    b_act = b[active]
    p_act = prod[active]

    def alloc(mu):
        return np.maximum(0.0, (np.sqrt(p_act / mu) - 1.0) / b_act)

    x_act, mu = _bisect_water_level(alloc, power, float(p_act.max()))
    x = np.zeros(a.size)
    x[active] = x_act
    return x, mu


def waterfill_logdet(theta_eigs, channel_eigs, power: float) -> tuple[np.ndarray, float]:
    """Minimize sum_j log(a_j / (1 + b_j x_j) + 1) over x >= 0, sum x <= power.

    Same conventions as waterfill_trace.  The stationarity condition per
    active mode is a_j b_j / (t_j (t_j + a_j)) = mu with t_j = 1 + b_j x_j,
    solved in closed form by the positive root of t^2 + a t - a b / mu.
    """
    a, b = _check_waterfill_inputs(theta_eigs, channel_eigs, power)
    prod = a * b
    if not np.any(prod > 0.0):
        return np.zeros(a.size), 0.0
    active = prod > 0.0
    a_act = a[active]
    b_act = b[active]

    def alloc(mu):
        # conjugate form of the positive root; the textbook
        # (-a + sqrt(a^2 + 4ab/mu))/2 cancels catastrophically for large a
        t = 2.0 * b_act / (mu + np.sqrt(mu * mu + 4.0 * b_act * mu / a_act))
        return np.maximum(0.0, (t - 1.0) / b_act)

    x_act, mu = _bisect_water_level(alloc, power, float((a_act * b_act).max()))
    x = np.zeros(a.size)
    x[active] = x_act
    return x, mu


def trace_kkt_residual(weight_eigs, channel_eigs, gains_sq, mu: float) -> float:
    """Max relative stationarity residual over active modes of waterfill_trace."""
    a = np.asarray(weight_eigs, dtype=np.float64)
    b = np.asarray(channel_eigs, dtype=np.float64)
    x = np.asarray(gains_sq, dtype=np.float64)
    active = (x > 0.0) & (a * b > 0.0)
    if not np.any(active) or mu <= 0.0:
        return 0.0
    grad = a[active] * b[active] / (1.0 + b[active] * x[active]) ** 2
    return float(np.max(np.abs(grad - mu)) / mu)


def logdet_kkt_residual(theta_eigs, channel_eigs, gains_sq, mu: float) -> float:
    """Max relative stationarity residual over active modes of waterfill_logdet."""
    a = np.asarray(theta_eigs, dtype=np.float64)
    b = np.asarray(channel_eigs, dtype=np.float64)
    x = np.asarray(gains_sq, dtype=np.float64)
    active = (x > 0.0) & (a * b > 0.0)
    if not np.any(active) or mu <= 0.0:
        return 0.0
    t = 1.0 + b[active] * x[active]
    grad = a[active] * b[active] / (t * (t + a[active]))
    return float(np.max(np.abs(grad - mu)) / mu)


# ---------------------------------------------------------------------------
# precoder assembly and the two closed-form designs


def assemble_precoder(spectrum: WhitenedChannel, gains, rotation) -> np.ndarray:
    """F = V_H diag_rect(gains) U_F^H for a unitary rotation U_F."""
    v = as_matrix(spectrum.basis)
    u = as_matrix(rotation)
    g = np.asarray(gains, dtype=np.float64)
    if g.ndim != 1:
        raise ShapeError("gains must be 1-D")
    n_tx = v.shape[0]
    n_streams = u.shape[0]
    if u.shape[0] != u.shape[1]:
        raise ShapeError(f"rotation must be square, got {u.shape}")
    if g.size > min(n_tx, n_streams):
        raise ShapeError(
            f"at most {min(n_tx, n_streams)} gains fit a {n_tx}x{n_streams} precoder, got {g.size}"
        )
    gap = np.linalg.norm(u.conj().T @ u - np.eye(n_streams))
    if gap > 1e-8 * max(1.0, float(n_streams)):
        raise PreconditionError("rotation must be unitary")
    lam = np.zeros((n_tx, n_streams), dtype=np.complex128)
    lam[np.arange(g.size), np.arange(g.size)] = g
    return v @ lam @ u.conj().T


def _weight_spectrum(op: WeightingOperator, model: SystemModel):
    if op.k != 1:
        raise Unsupported("closed-form designs cover a single weighting factor (K = 1)")
    if op.n_streams != model.n_streams:
        raise ShapeError(
            f"operator expects {op.n_streams} streams but the model has {model.n_streams}"
        )
    return op.weights[0]


def design_trace_min(model: SystemModel, op: WeightingOperator) -> PrecoderDesign:
    """Trace-optimal precoder for Psi(F) = W^H Phi(F) W + Pi, K = 1.

    The rotation is the left singular basis of W; the amplitudes water-fill
    the paired (squared singular values of W, whitened channel eigenvalues)
    spectra.  objective_value is Tr of the weighted error covariance at the
    assembled precoder.
    """
    w = _weight_spectrum(op, model)
    spectrum = whiten_channel(model)
    wsvd = ordered_svd(w)
    lam_w = np.zeros(model.n_streams, dtype=np.float64)
    lam_w[: wsvd.s.size] = wsvd.s**2
    n_modes = min(model.n_tx, model.n_streams)
    x, mu = waterfill_trace(lam_w[:n_modes], spectrum.eigenvalues[:n_modes], model.power)
    gains = np.sqrt(x)
    f = assemble_precoder(spectrum, gains, wsvd.u)
    psi = weighted_mse_of_precoder(op, model, f)
    return PrecoderDesign(
        channel_basis=spectrum.basis,
        gains=gains,
        rotation=wsvd.u,
        precoder=f,
        objective_value=float(np.real(np.trace(psi))),
        multiplier=float(mu),
    )


def design_det_min(
    model: SystemModel, op: WeightingOperator, jitter_pi: bool = False
) -> PrecoderDesign:
    """Log-det-optimal precoder for Psi(F) = W^H Phi(F) W + Pi, K = 1.

    Requires a strictly positive definite Pi; with jitter_pi=True a singular
    Pi is replaced by Pi + eps*I, eps = 1e-10 * Tr(Pi) / m, and the jittered
    offset is used for both the rotation and the reported objective.  The
    rotation is the eigenbasis of W Pi^{-1} W^H; the amplitudes water-fill
    the paired (theta eigenvalues, whitened channel eigenvalues) spectra.
    objective_value is log det of the weighted error covariance at the
    assembled precoder.
    """
    w = _weight_spectrum(op, model)
    pi = op.offset
    pi_eigs = np.linalg.eigvalsh(pi)
    if pi_eigs.min() <= 0.0:
        if not jitter_pi:
            raise NotPD(
                "offset matrix must be strictly positive definite for the log-det design "
                "(pass jitter_pi=True to regularize)"
            )
        eps = 1e-10 * float(np.real(np.trace(pi))) / pi.shape[0]
        pi = symmetrize(pi + eps * np.eye(pi.shape[0]))
        if np.linalg.eigvalsh(pi).min() <= 0.0:
            raise NotPD("offset matrix is singular even after jitter")
        op = WeightingOperator(weights=op.weights, offset=pi)
    spectrum = whiten_channel(model)
    theta = symmetrize(w @ np.linalg.solve(pi, w.conj().T))
    evd = ordered_evd(theta, "decreasing")
    lam_t = np.clip(evd.values, 0.0, None)
    n_modes = min(model.n_tx, model.n_streams)
    x, mu = waterfill_logdet(lam_t[:n_modes], spectrum.eigenvalues[:n_modes], model.power)
    gains = np.sqrt(x)
    f = assemble_precoder(spectrum, gains, evd.vectors)
    psi = weighted_mse_of_precoder(op, model, f)
    return PrecoderDesign(
        channel_basis=spectrum.basis,
        gains=gains,
        rotation=evd.vectors,
        precoder=f,
        objective_value=logdet_pd(psi),
        multiplier=float(mu),
    )
