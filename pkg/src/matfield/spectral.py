"""Deterministic complex-matrix kernels.

Ordered singular/eigen decompositions with a fixed tie-break and phase
convention, Hermitian square roots, PSD tests, log-determinants, and
Loewner-order comparisons.  Everything downstream (model, design, relay)
leans on these conventions, so repeated calls on identical input bytes
must return identical factors.

Conventions:
  * singular values / eigenvalues are sorted (default: decreasing) with a
    stable tie-break on (value, index of first non-negligible vector entry,
    sign of its real part);
  * every vector is scaled so its largest-magnitude entry is real positive
    (for singular pairs the phase is taken from the left vector and the
    same factor is applied to the right vector, which leaves the outer
    product unchanged);
  * norms used in tolerances are spectral norms unless stated otherwise.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import InvalidMatrix, NotPD, NotPSD, ShapeError

HERMITIAN_RTOL = 1e-12   # relative conjugate-symmetry tolerance on inputs
PSD_RTOL = 1e-10         # relative eigenvalue floor accepted as "semi-definite"

_ENTRY_TOL = 1e-12       # threshold for "non-negligible" vector entries


def as_matrix(a) -> np.ndarray:
    """Coerce ``a`` to a 2-D complex128 array, rejecting non-finite entries."""
    m = np.asarray(a, dtype=np.complex128)
    if m.ndim != 2:
        raise InvalidMatrix(f"expected a 2-D matrix, got ndim={m.ndim}")
    if not np.all(np.isfinite(m.real)) or not np.all(np.isfinite(m.imag)):
        raise InvalidMatrix("matrix contains NaN or Inf entries")
    return m


def symmetrize(a) -> np.ndarray:
    """Return (A + A^H)/2 without checking how Hermitian A was.

    Used on matrices that are Hermitian by construction, to scrub the
    rounding asymmetry of float matrix products.
    """
    m = np.asarray(a, dtype=np.complex128)
    return (m + m.conj().swapaxes(-1, -2)) / 2.0


def hermitize(a) -> np.ndarray:
    """Validate that A is Hermitian and return the exactly Hermitian (A + A^H)/2.

    The input must be conjugate-symmetric to HERMITIAN_RTOL relative
    (Frobenius); anything worse raises InvalidMatrix.
    """
    m = as_matrix(a)
    if m.shape[0] != m.shape[1]:
        raise InvalidMatrix(f"Hermitian matrix must be square, got {m.shape}")
    gap = np.linalg.norm(m - m.conj().T)
    if gap > HERMITIAN_RTOL * max(1.0, np.linalg.norm(m)):
        raise InvalidMatrix(
            "matrix is not Hermitian (asymmetry {:.3e} exceeds tolerance)".format(gap)
        )
    return (m + m.conj().T) / 2.0


def _phase_fix(cols: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    """Scale each column so its largest-magnitude entry is real positive.

    Returns (fixed columns, per-column multipliers).  argmax takes the first
    maximal entry, which makes the pivot choice deterministic.
    """
    if cols.shape[1] == 0:
        return cols.copy(), np.ones(0, dtype=np.complex128)
    idx = np.argmax(np.abs(cols), axis=0)
    pivots = cols[idx, np.arange(cols.shape[1])]
    mags = np.abs(pivots)
    factors = np.where(mags > 0.0, np.conj(pivots) / np.where(mags > 0.0, mags, 1.0), 1.0)
    return cols * factors[None, :], factors


def _tie_order(values: np.ndarray, cols: np.ndarray, descending: bool) -> np.ndarray:
    """Stable ordering with the deterministic secondary keys described above."""
    n, k = cols.shape
    first_idx = np.zeros(k, dtype=np.int64)
    first_sign = np.zeros(k, dtype=np.int64)
    for j in range(k):
        nz = np.flatnonzero(np.abs(cols[:, j]) > _ENTRY_TOL)
        if nz.size:
            first_idx[j] = nz[0]
            first_sign[j] = int(np.sign(cols[nz[0], j].real))
    primary = -values if descending else values
    # np.lexsort: last key is primary, earlier keys break ties, stable overall
    return np.lexsort((first_sign, first_idx, primary))


@dataclass(frozen=True, eq=False)
class OrderedSVD:
    """Full SVD A = u @ diag_rect(s) @ v^H with s sorted decreasing."""

    u: np.ndarray  # rows x rows unitary, columns are left singular vectors
    s: np.ndarray  # min(rows, cols) singular values, decreasing
    v: np.ndarray  # cols x cols unitary, columns are right singular vectors


@dataclass(frozen=True, eq=False)
class OrderedEVD:
    """Eigendecomposition A = vectors @ diag(values) @ vectors^H."""

    values: np.ndarray
    vectors: np.ndarray


def ordered_svd(a) -> OrderedSVD:
    """Full SVD with decreasing singular values and fixed phase/tie conventions."""
    m = as_matrix(a)
    try:
        u, s, vh = np.linalg.svd(m, full_matrices=True)
    except np.linalg.LinAlgError as exc:  # pragma: no cover - LAPACK failure
        raise InvalidMatrix(f"SVD did not converge: {exc}") from None
    v = vh.conj().T
    k = s.size
    paired_u, factors = _phase_fix(u[:, :k])
    u = u.copy()
    v = v.copy()
    u[:, :k] = paired_u
    v[:, :k] = v[:, :k] * factors[None, :]
    order = _tie_order(s, u[:, :k], descending=True)
    u[:, :k] = u[:, order]
    v[:, :k] = v[:, order]
    s = s[order]
    if u.shape[1] > k:
        u[:, k:], _ = _phase_fix(u[:, k:])
    if v.shape[1] > k:
        v[:, k:], _ = _phase_fix(v[:, k:])
    return OrderedSVD(u=u, s=s, v=v)


def ordered_evd(a, direction: str = "decreasing") -> OrderedEVD:
    """Eigendecomposition of a Hermitian matrix with ordered eigenvalues.

    direction is "decreasing" (default) or "increasing".  Raises
    InvalidMatrix when the input is not Hermitian to tolerance.
    """
    if direction not in ("decreasing", "increasing"):
        raise ValueError(f"unknown direction {direction!r}")
    h = hermitize(a)
    try:
        w, u = np.linalg.eigh(h)
    except np.linalg.LinAlgError as exc:  # pragma: no cover - LAPACK failure
        raise InvalidMatrix(f"eigendecomposition did not converge: {exc}") from None
    u, _ = _phase_fix(u)
    order = _tie_order(w, u, descending=(direction == "decreasing"))
    return OrderedEVD(values=w[order], vectors=u[:, order])


def is_psd(a, rtol: float = PSD_RTOL) -> bool:
    """True when min eigenvalue >= -rtol * max|eigenvalue|."""
    h = hermitize(a)
    w = np.linalg.eigvalsh(h)
    if w.size == 0:
        return True
    return bool(w.min() >= -rtol * max(float(np.abs(w).max()), 1e-300))


def hermitian_sqrt(a) -> np.ndarray:
    """Hermitian PSD square root S with S @ S = A.

    Eigenvalues in [-PSD_RTOL * ||A||, 0) are treated as rounding noise and
    clipped to zero; anything more negative raises NotPSD.
    """
    h = hermitize(a)
    w, u = np.linalg.eigh(h)
    scale = max(float(np.abs(w).max()) if w.size else 0.0, 1e-300)
    if w.size and w.min() < -PSD_RTOL * scale:
        raise NotPSD(
            "matrix has eigenvalue {:.3e} below the PSD tolerance".format(float(w.min()))
        )
    w = np.clip(w, 0.0, None)
    return symmetrize((u * np.sqrt(w)) @ u.conj().T)


def inv_sqrt_pd(a) -> np.ndarray:
    """Hermitian inverse square root of a strictly positive definite matrix."""
    h = hermitize(a)
    w, u = np.linalg.eigh(h)
    if w.size == 0 or w.min() <= 0.0:
        raise NotPD("matrix is not strictly positive definite")
    return symmetrize((u * (1.0 / np.sqrt(w))) @ u.conj().T)


def logdet_pd(a) -> float:
    """log det of a Hermitian strictly positive definite matrix."""
    h = hermitize(a)
    w = np.linalg.eigvalsh(h)
    if w.size == 0:
        return 0.0
    if w.min() <= 0.0:
        raise NotPD("log-determinant requires a positive definite matrix")
    return float(np.sum(np.log(w)))


def loewner_leq(a, b, tol: float = 1e-8) -> bool:
    """Whether A <= B in the Loewner (PSD) order, to tolerance.

    True iff min eig(B - A) >= -tol * max(1, ||B - A||) with the spectral
    norm of the difference.
    """
    ha = hermitize(a)
    hb = hermitize(b)
    if ha.shape != hb.shape:
        raise ShapeError(f"Loewner comparison needs equal shapes, got {ha.shape} vs {hb.shape}")
    d = hb - ha
    w = np.linalg.eigvalsh(d)
    if w.size == 0:
        return True
    scale = max(1.0, float(np.abs(w).max()))
    return bool(w.min() >= -tol * scale)
