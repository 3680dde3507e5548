"""Near-uniform weights + a flat unitary rotation spread MSE evenly.

When the weight spectrum is almost flat, rotating the precoder by a DFT
matrix (every entry the same magnitude) makes the per-stream MSEs nearly
identical -- a fairness property that pure power allocation cannot give.
Compare the per-stream spread with and without the DFT rotation.
"""

import numpy as np

from matfield import WeightingOperator, design_trace_min, lmmse_equalizer, mse_matrix
from matfield.instances import generate_system


def dft(n):
    k = np.arange(n)
    return np.exp(-2j * np.pi * np.outer(k, k) / n) / np.sqrt(n)


model = generate_system(5, (3, 3, 3, 3), power=6.0)
n = model.n_streams
lam_w = np.linspace(1.004, 0.996, n)  # within 1% of uniform

for label, basis in (("identity", np.eye(n)), ("dft", dft(n))):
    w = basis @ np.diag(np.sqrt(lam_w)).astype(complex)
    op = WeightingOperator(weights=(w,), offset=np.zeros((n, n), dtype=complex))
    d = design_trace_min(model, op)
    g = lmmse_equalizer(model, d.precoder)
    per_stream = np.real(np.diag(mse_matrix(model, g, d.precoder)))
    spread = (per_stream.max() - per_stream.min()) / per_stream.mean()
    print(f"{label:>8} rotation: per-stream MSE {np.round(per_stream, 5)}  spread {spread:.2e}")
