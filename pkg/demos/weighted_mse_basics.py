"""Tour of the weighted-MSE model on a small random link.

Builds a 2x2 system, shows that the LMMSE equalizer's error matrix sits
below every other linear equalizer in the Loewner order, and that the
matrix-valued weighting operator generalizes classical diagonal weights.
"""

import numpy as np

from matfield import (
    SystemModel,
    WeightingOperator,
    classical_weighted_mse,
    from_classical_weights,
    lmmse_equalizer,
    loewner_leq,
    mse_lmmse,
    mse_matrix,
    weighted_mse_of_precoder,
)

rng = np.random.default_rng(0)


def cgauss(rows, cols):
    return (rng.standard_normal((rows, cols)) + 1j * rng.standard_normal((rows, cols))) / np.sqrt(2)


b = cgauss(2, 2)
model = SystemModel(
    channel=cgauss(2, 2),
    noise_cov=b @ b.conj().T + 0.1 * np.eye(2),
    n_streams=2,
    power=4.0,
)
f = cgauss(2, 2)
f *= np.sqrt(model.power / np.trace(f @ f.conj().T).real)

print("transmit power:", np.trace(f @ f.conj().T).real)

g_best = lmmse_equalizer(model, f)
phi_best = mse_matrix(model, g_best, f)
print("\nLMMSE error matrix:\n", np.round(phi_best, 4))
print("matches closed form:", np.allclose(phi_best, mse_lmmse(model, f), atol=1e-12))

print("\ndominance over 5 random equalizers (Loewner order):")
for k in range(5):
    g = cgauss(2, 2)
    print(f"  equalizer {k}: dominated = {loewner_leq(phi_best, mse_matrix(model, g, f), 1e-8)}")

# classical diagonal weights are the K=1, W=diag(sqrt(w)), Pi=0 special case
w = np.array([2.0, 0.5])
op = from_classical_weights(w)
scalar = classical_weighted_mse(model, g_best, f, w)
lifted = np.trace(weighted_mse_of_precoder(op, model, f)).real
print("\nclassical weighted MSE:", round(scalar, 6), " via operator:", round(lifted, 6))

# a genuinely matrix-valued operator: two factors plus a PSD offset
op2 = WeightingOperator(
    weights=(cgauss(2, 3), cgauss(2, 3)),
    offset=0.2 * np.eye(3),
)
psi = weighted_mse_of_precoder(op2, model, f)
print("\ntwo-factor operator output (3x3, eigenvalues):", np.round(np.linalg.eigvalsh(psi), 4))
