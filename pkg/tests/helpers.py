"""Shared builders and reference computations for the test suite.

Everything here is deliberately independent of the package internals: the
reference values are computed from first principles (direct formulas, grid
scans, active-set algebra) so the tests cross-check the library rather than
restating it.
"""

import numpy as np

from matfield import RelayModel, SystemModel, WeightingOperator


def rng(seed=0):
    return np.random.default_rng(seed)


def crandn(gen, rows, cols):
    """Complex standard normal matrix, E|z_ij|^2 = 1."""
    return (gen.standard_normal((rows, cols)) + 1j * gen.standard_normal((rows, cols))) / np.sqrt(2.0)


def random_psd(gen, n, rank=None):
    b = crandn(gen, rank if rank is not None else n, n)
    return b.conj().T @ b


def random_pd(gen, n, ridge=0.1):
    return random_psd(gen, n) + ridge * np.eye(n)


def haar_unitary(gen, n):
    q, r = np.linalg.qr(crandn(gen, n, n))
    # normalize phases so the distribution is Haar, not QR-biased
    return q * (np.diag(r) / np.abs(np.diag(r)))


def random_system(gen, n_tx=2, n_rx=2, n_streams=2, power=4.0):
    return SystemModel(
        channel=crandn(gen, n_rx, n_tx),
        noise_cov=random_pd(gen, n_rx),
        n_streams=n_streams,
        power=power,
    )


def random_operator(gen, n_streams=2, m=2, k=1, pd_offset=True):
    ws = tuple(crandn(gen, n_streams, m) for _ in range(k))
    pi = random_pd(gen, m) if pd_offset else np.zeros((m, m), dtype=complex)
    return WeightingOperator(weights=ws, offset=pi)


def random_relay(gen, n_src=2, n_relay=2, n_dst=2, power=4.0):
    return RelayModel(
        channel1=crandn(gen, n_relay, n_src),
        channel2=crandn(gen, n_dst, n_relay),
        source_cov=random_pd(gen, n_src),
        noise1_cov=random_pd(gen, n_relay),
        noise2_cov=random_pd(gen, n_dst),
        power=power,
    )


def boundary_precoder(gen, n_tx, n_streams, power):
    f = crandn(gen, n_tx, n_streams)
    return f * np.sqrt(power / np.trace(f @ f.conj().T).real)


def rel_err(a, b):
    a = np.asarray(a)
    b = np.asarray(b)
    return np.linalg.norm(a - b) / max(np.linalg.norm(a), np.linalg.norm(b), 1e-300)


def scalar_gap(a, b):
    return abs(a - b) / max(1.0, abs(a), abs(b))


def sum_mse_waterfill_reference(channel_eigs, n_streams, power):
    """Closed-form active-set solution of  min sum_j 1/(1 + lam_j x_j),  sum x_j <= power.

    Unit weights.  Returns the optimal objective including the flat
    contribution (one per stream) of modes with a zero channel eigenvalue or
    no power.  Derivation: stationarity lam/(1+lam x)^2 = mu on active modes
    gives x_j = 1/sqrt(mu lam_j) - 1/lam_j, and the budget fixes sqrt(1/mu).
    """
    lam = np.sort(np.asarray(channel_eigs, dtype=float))[::-1]
    lam = lam[: n_streams]
    pos = lam[lam > 0.0]
    n_flat = n_streams - pos.size
    best = None
    for count in range(1, pos.size + 1):
        act = pos[:count]
        inv_sqrt_mu = (power + np.sum(1.0 / act)) / np.sum(1.0 / np.sqrt(act))
        x = inv_sqrt_mu / np.sqrt(act) - 1.0 / act
        if x[-1] < 0.0:
            continue
        obj = np.sum(1.0 / (1.0 + act * x)) + (pos.size - count) + n_flat
        if best is None or obj < best:
            best = obj
    if best is None:
        best = float(n_streams)
    return float(best)


def end_to_end_error_cov(model, forwarding):
    """LMMSE error covariance of the full two-hop chain, information form.

    Treats the cascade as a single linear observation y = A s + v with
    A = H2 Pm H1 and v ~ CN(0, H2 Pm R_n1 Pm^H H2^H + R_n2), then applies
    the standard (prior^-1 + A^H C^-1 A)^-1 identity.  Shares no code with
    the library routines it is checking.
    """
    a = model.channel2 @ forwarding @ model.channel1
    c = model.channel2 @ forwarding @ model.noise1_cov @ forwarding.conj().T @ model.channel2.conj().T
    c = c + model.noise2_cov
    info = np.linalg.inv(model.source_cov) + a.conj().T @ np.linalg.inv(c) @ a
    err = np.linalg.inv(info)
    return 0.5 * (err + err.conj().T)
