"""Seeded experiment instances and JSON (de)serialization of matrices.

Dimension quadruples are (n_tx, n_rx, n_streams, m).  A point-to-point
instance uses an n_rx x n_tx channel; the relay reading of the same
quadruple is: second hop n_rx x n_tx, first hop n_streams x m, so the
equivalent weighted model has the same shapes as the point-to-point case.

Draw order is fixed so seeds reproduce across implementations:
  system  : H (n_rx x n_tx), then B (n_rx x n_rx) with R_n = B^H B + 0.1 I
  weighting: W (n_streams x m), then B (m x m) with Pi = B^H B + 0.1 I
  relay   : H1 (n_streams x m), H2 (n_rx x n_tx), then B_s (m x m),
            B_1 (n_streams x n_streams), B_2 (n_rx x n_rx) for
            R_s, R_n1, R_n2, each B^H B + 0.1 I
"""

from __future__ import annotations

import numpy as np

from .errors import ConfigError
from .mimo import SystemModel
from .relay import RelayModel
from .rng import SplitMix64
from .spectral import symmetrize
from .weighting import WeightingOperator

# minimum eigenvalue of every generated covariance
_COV_RIDGE = 0.1


def _pd_cov(stream: SplitMix64, n: int) -> np.ndarray:
    b = stream.complex_normal(n, n)
    return symmetrize(b.conj().T @ b + _COV_RIDGE * np.eye(n))


def _check_dims(dims) -> tuple[int, int, int, int]:
    t = tuple(int(d) for d in dims)
    if len(t) != 4 or any(d < 1 for d in t):
        raise ConfigError(f"dims must be four positive integers, got {dims!r}")
    return t


def generate_system(seed: int, dims, power: float) -> SystemModel:
    """Deterministic point-to-point instance for (seed, dims, power)."""
    n_tx, n_rx, n_streams, _ = _check_dims(dims)
    stream = SplitMix64(seed)
    h = stream.complex_normal(n_rx, n_tx)
    r_n = _pd_cov(stream, n_rx)
    return SystemModel(channel=h, noise_cov=r_n, n_streams=n_streams, power=power)


def generate_weighting(seed: int, dims) -> WeightingOperator:
    """Deterministic single-factor weighting operator with a PD offset."""
    _, _, n_streams, m = _check_dims(dims)
    stream = SplitMix64(seed)
    w = stream.complex_normal(n_streams, m)
    pi = _pd_cov(stream, m)
    return WeightingOperator(weights=(w,), offset=pi)


def generate_relay(seed: int, dims, power: float) -> RelayModel:
    """Deterministic two-hop relay instance for (seed, dims, power)."""
    n_tx, n_rx, n_streams, m = _check_dims(dims)
    stream = SplitMix64(seed)
    h1 = stream.complex_normal(n_streams, m)
    h2 = stream.complex_normal(n_rx, n_tx)
    r_s = _pd_cov(stream, m)
    r_n1 = _pd_cov(stream, n_streams)
    r_n2 = _pd_cov(stream, n_rx)
    return RelayModel(
        channel1=h1, channel2=h2, source_cov=r_s, noise1_cov=r_n1, noise2_cov=r_n2, power=power
    )


def generate_instance(seed: int, dims, power: float, kind: str = "system"):
    """Dispatching helper: kind is "system" or "relay"."""
    if kind == "system":
        return generate_system(seed, dims, power)
    if kind == "relay":
        return generate_relay(seed, dims, power)
    raise ConfigError(f"unknown instance kind {kind!r}")


# ---------------------------------------------------------------------------
# JSON matrix representation: nested lists of [re, im] pairs


def matrix_to_json(a) -> list:
    m = np.asarray(a, dtype=np.complex128)
    return [[[float(z.real), float(z.imag)] for z in row] for row in m]


def matrix_from_json(obj, field: str) -> np.ndarray:
    if not isinstance(obj, list) or not obj:
        raise ConfigError(f"{field}: expected a nonempty list of rows")
    rows = []
    width = None
    for i, row in enumerate(obj):
        if not isinstance(row, list) or not row:
            raise ConfigError(f"{field}[{i}]: expected a nonempty row list")
        if width is None:
            width = len(row)
        elif len(row) != width:
            raise ConfigError(f"{field}[{i}]: ragged row (expected {width} entries)")
        vals = []
        for j, cell in enumerate(row):
            if (
                not isinstance(cell, (list, tuple))
                or len(cell) != 2
                or not all(isinstance(x, (int, float)) for x in cell)
            ):
                raise ConfigError(f"{field}[{i}][{j}]: expected an [re, im] pair")
            vals.append(complex(float(cell[0]), float(cell[1])))
        rows.append(vals)
    return np.asarray(rows, dtype=np.complex128)


def system_from_json(obj, power: float, n_streams: int | None = None) -> SystemModel:
    """Build a SystemModel from config fields H, R_n (+ optional n_streams)."""
    if not isinstance(obj, dict):
        raise ConfigError("instance: expected an object")
    for key in ("H", "R_n"):
        if key not in obj:
            raise ConfigError(f"instance.{key}: missing")
    h = matrix_from_json(obj["H"], "instance.H")
    r_n = matrix_from_json(obj["R_n"], "instance.R_n")
    streams = obj.get("n_streams", n_streams)
    if streams is None:
        streams = h.shape[1]
    return SystemModel(channel=h, noise_cov=r_n, n_streams=int(streams), power=power)


def weighting_from_json(obj) -> WeightingOperator:
    """Build a WeightingOperator from config fields W (matrix or list) and Pi."""
    if not isinstance(obj, dict) or "W" not in obj or "Pi" not in obj:
        raise ConfigError("instance weighting: need W and Pi")
    w_obj = obj["W"]
    if isinstance(w_obj, list) and w_obj and isinstance(w_obj[0], list) and w_obj[0] and isinstance(w_obj[0][0], list) and w_obj[0][0] and isinstance(w_obj[0][0][0], list):
        weights = tuple(
            matrix_from_json(wk, f"instance.W[{i}]") for i, wk in enumerate(w_obj)
        )
    else:
        weights = (matrix_from_json(w_obj, "instance.W"),)
    pi = matrix_from_json(obj["Pi"], "instance.Pi")
    return WeightingOperator(weights=weights, offset=pi)


def relay_from_json(obj, power: float) -> RelayModel:
    """Build a RelayModel from config fields H1, H2, R_s, R_n1, R_n2."""
    if not isinstance(obj, dict):
        raise ConfigError("instance: expected an object")
    mats = {}
    for key in ("H1", "H2", "R_s", "R_n1", "R_n2"):
        if key not in obj:
            raise ConfigError(f"instance.{key}: missing")
        mats[key] = matrix_from_json(obj[key], f"instance.{key}")
    return RelayModel(
        channel1=mats["H1"],
        channel2=mats["H2"],
        source_cov=mats["R_s"],
        noise1_cov=mats["R_n1"],
        noise2_cov=mats["R_n2"],
        power=power,
    )
