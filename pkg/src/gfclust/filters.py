"""Joint aggregation kernel and the low/high-pass hybrid graph filters.

The filter kernel is either the row-normalized joint aggregation matrix built
from a view's embedding pair, or the view's own random-walk adjacency (the
`raw_adjacency` ablation). Powers are applied as ``k`` successive products
against the signal; the ``k``-th matrix power is never materialized.
"""

from __future__ import annotations

import warnings
from dataclasses import dataclass, replace

import numpy as np

from .autograd import Tensor
from .encoders import EmbeddingPair
from .errors import ConfigError, NumericsWarning
from .graphs import MultiViewGraph, random_walk_normalize

__all__ = [
    "FilterConfig",
    "JointAggregation",
    "build_joint_aggregation",
    "apply_filter",
    "per_view_embedding",
    "filter_frequency_response",
]

FAMILIES = ("adaptive_hybrid", "low_pass", "high_pass", "fixed_mix")
MATRIX_SOURCES = ("joint_aggregation", "raw_adjacency")

_RIDGE = 1e-8


@dataclass
class FilterConfig:
    order: int = 2
    hr: float = 0.5
    family: str = "adaptive_hybrid"
    alpha: float = 0.5  # fixed_mix only
    matrix_source: str = "joint_aggregation"

    def __post_init__(self):
        if self.order < 1:
            raise ConfigError("filter order must be >= 1")
        if not 0.0 <= self.hr <= 1.0:
            raise ConfigError("hr must lie in [0, 1]")
        if self.family not in FAMILIES:
            raise ConfigError(f"family must be one of {FAMILIES}")
        if self.family == "fixed_mix" and not 0.0 <= self.alpha <= 1.0:
            raise ConfigError("alpha must lie in [0, 1]")
        if self.matrix_source not in MATRIX_SOURCES:
            raise ConfigError(f"matrix_source must be one of {MATRIX_SOURCES}")


@dataclass(frozen=True)
class JointAggregation:
    """``z = z_a z_x^T``, its Gram matrix ``s`` and the row-stochastic ``s_rw``."""

    z: np.ndarray
    s: np.ndarray
    s_rw: np.ndarray


def joint_aggregation_t(z_a: Tensor, z_x: Tensor):
    """Tensor-level joint aggregation; returns ``(z, s, s_rw)``.

    ``s`` is clamped at zero, ridged with ``1e-8 * I`` and row-normalized.
    A row that is all-zero before the ridge triggers a NumericsWarning.
    """
    z = z_a @ z_x.T
    s = z @ z.T
    clamped = s.relu()
    row_mass = clamped.data.sum(axis=1)
    if (row_mass == 0.0).any():
        warnings.warn(
            f"{int((row_mass == 0.0).sum())} all-zero rows in the clamped Gram matrix; "
            "the diagonal ridge keeps them row-stochastic",
            NumericsWarning,
            stacklevel=2,
        )
    ridged = clamped + Tensor(_RIDGE * np.eye(s.shape[0]))
    s_rw = ridged / ridged.sum(axis=1, keepdims=True)
    return z, s, s_rw


def build_joint_aggregation(pair: EmbeddingPair) -> JointAggregation:
    z, s, s_rw = joint_aggregation_t(Tensor(pair.z_a), Tensor(pair.z_x))
    return JointAggregation(z=z.data, s=s.data, s_rw=s_rw.data)


def _low_pass(s_rw, x, k: int):
    y = x
    for _ in range(k):
        y = s_rw @ y
    return y


def _high_pass(s_rw, x, k: int):
    y = x
    for _ in range(k):
        y = y - s_rw @ y
    return y


def apply_filter_t(s_rw: Tensor, x: Tensor, cfg: FilterConfig) -> Tensor:
    k = cfg.order
    if cfg.family == "low_pass":
        return _low_pass(s_rw, x, k)
    if cfg.family == "high_pass":
        return _high_pass(s_rw, x, k)
    mix = cfg.hr if cfg.family == "adaptive_hybrid" else cfg.alpha
    return mix * _low_pass(s_rw, x, k) + (1.0 - mix) * _high_pass(s_rw, x, k)


def apply_filter(s_rw: np.ndarray, x: np.ndarray, cfg: FilterConfig) -> np.ndarray:
    """Filter a node signal with the configured family and order."""
    s_rw = np.asarray(s_rw, dtype=np.float64)
    x = np.asarray(x, dtype=np.float64)
    if s_rw.ndim != 2 or s_rw.shape[0] != s_rw.shape[1]:
        raise ValueError(f"kernel must be square, got {s_rw.shape}")
    if x.shape[0] != s_rw.shape[0]:
        raise ValueError(f"signal rows {x.shape[0]} do not match kernel size {s_rw.shape[0]}")
    return apply_filter_t(Tensor(s_rw), Tensor(x), cfg).data


def per_view_embedding(
    g: MultiViewGraph,
    view: int,
    pair: EmbeddingPair,
    hr_v: float,
    cfg: FilterConfig,
) -> np.ndarray:
    """One view's filtered node embedding on the shared feature matrix."""
    if not 0.0 <= hr_v <= 1.0:
        raise ConfigError("hr_v must lie in [0, 1]")
    if cfg.matrix_source == "raw_adjacency":
        kernel = random_walk_normalize(g.adjacencies[view]).a_rw
    else:
        kernel = build_joint_aggregation(pair).s_rw
    return apply_filter(kernel, g.features, replace(cfg, hr=hr_v))


def filter_frequency_response(cfg: FilterConfig, lambdas: np.ndarray | None = None):
    """Scalar spectral response g(lambda) sampled on a grid over [0, 2].

    For the hybrid family g(lambda) = hr (1-lambda)^k + (1-hr) lambda^k; the
    pure families keep only one term and fixed_mix swaps hr for alpha.
    """
    if lambdas is None:
        lambdas = np.linspace(0.0, 2.0, 201)
    lam = np.asarray(lambdas, dtype=np.float64)
    k = cfg.order
    low = (1.0 - lam) ** k
    high = lam ** k
    if cfg.family == "low_pass":
        values = low
    elif cfg.family == "high_pass":
        values = high
    else:
        mix = cfg.hr if cfg.family == "adaptive_hybrid" else cfg.alpha
        values = mix * low + (1.0 - mix) * high
    return lam, values
