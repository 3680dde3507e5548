"""A two-hop amplify-and-forward link is a weighted point-to-point design.

The first hop (channel, source covariance, relay noise) folds into a single
weighting factor plus an offset equal to the first-hop estimation error;
the forwarding-matrix design then reduces to the weighted precoder design
on the second hop.  This script verifies the books balance both ways.
"""

import numpy as np

from matfield import (
    design_relay_capacity,
    design_relay_sum_mse,
    forwarding_to_precoder,
    relay_capacity,
    relay_to_weighted,
    relay_transmit_power,
    relay_weighted_mse,
    weighted_mse_of_precoder,
)
from matfield.instances import generate_relay

m = generate_relay(11, (2, 2, 2, 2), power=4.0)

sysm, op = relay_to_weighted(m)
print("weighting factor W (from hop 1):\n", np.round(op.weights[0], 3))
print("offset Pi = R_s - W^H W (hop-1 LMMSE error):\n", np.round(op.offset, 3))

rng = np.random.default_rng(2)
pm = (rng.standard_normal((2, 2)) + 1j * rng.standard_normal((2, 2))) / np.sqrt(2)
pm *= np.sqrt(m.power / relay_transmit_power(m, pm))

chain = relay_weighted_mse(m, pm)
mapped = weighted_mse_of_precoder(op, sysm, forwarding_to_precoder(m, pm))
print("\nchain-vs-mapped error covariance gap:", f"{np.linalg.norm(chain - mapped):.2e}")

pm_mse, sum_mse, _ = design_relay_sum_mse(m)
print("\nsum-MSE design:   objective", round(sum_mse, 6), " relay power", round(relay_transmit_power(m, pm_mse), 6))

pm_cap, cap, _ = design_relay_capacity(m)
print("capacity design:  capacity ", round(cap, 6), " relay power", round(relay_transmit_power(m, pm_cap), 6))
print("capacity at the sum-MSE design (for contrast):", round(relay_capacity(m, pm_mse), 6))
