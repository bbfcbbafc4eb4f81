"""Gaussian field sampling and white-noise functionals over a discrete space.

Draws are generated from the series B = sum_k xi_k h_k, where h_k are the
columns of the field's white-noise factor and xi_k are i.i.d. standard
normals. Noise is addressed positionally in a counter-based stream keyed by
the seed: draw r always owns the same counter-block range, so batches are
reproducible, order independent under parallel generation, and truncations
at the same seed share their noise with the full series.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from scipy.special import ndtri

from .errors import DimensionMismatchError, InsufficientSamplesError
from .kernels import CovarianceKernel, assemble
from .spaces import DiscreteMeasureSpace
from .spectral import (
    MercerDecomposition,
    WhiteNoiseKernel,
    decompose,
    factorize,
    pointwise_kernel_matrix,
)

__all__ = [
    "GaussianField",
    "SampleBatch",
    "NoiseDraw",
    "build_field",
    "noise_matrix",
    "draw_noise",
    "sample",
    "empirical_covariance",
    "covariance_standard_error",
    "truncation_error",
    "white_noise_functional",
    "mollify_factor",
    "tangent_gram",
]


@dataclass(frozen=True)
class GaussianField:
    """A centered Gaussian field: space, spectral data, and chosen factor."""

    space: DiscreteMeasureSpace
    dec: MercerDecomposition
    factor: WhiteNoiseKernel

    def __post_init__(self):
        n, m = self.space.size, self.dec.rank
        if self.dec.space is not self.space and self.dec.space.size != n:
            raise DimensionMismatchError("decomposition does not match space")
        if self.factor.factor.shape != (n, m):
            raise DimensionMismatchError(
                f"factor shape {self.factor.factor.shape} does not match ({n}, {m})"
            )


@dataclass(frozen=True)
class SampleBatch:
    """Batch of field realizations, one per row, with its provenance."""

    draws: np.ndarray
    seed: int
    truncation: int


@dataclass(frozen=True)
class NoiseDraw:
    """One vector of i.i.d. standard normals from stream (seed, stream)."""

    xi: np.ndarray
    seed: int
    stream: int


def build_field(
    kernel: CovarianceKernel,
    space: DiscreteMeasureSpace,
    gauge: str = "symmetric_sqrt",
    drop_tol: float = 1e-12,
    gauge_seed: int = 0,
) -> GaussianField:
    """Assemble, decompose, and factorize a kernel into a sampleable field."""
    C = assemble(kernel, space)
    dec = decompose(C, space, drop_tol=drop_tol)
    h = factorize(dec, gauge=gauge, seed=gauge_seed)
    return GaussianField(space=space, dec=dec, factor=h)


def _uniforms(seed: int, block_start: int, count: int) -> np.ndarray:
    """Uniforms starting at counter block ``block_start`` of the seed's stream.

    One Philox counter block yields 4 doubles, so the first value returned
    sits at stream position 4 * block_start.
    """
    bitgen = np.random.Philox(key=seed)
    bitgen.advance(block_start)
    gen = np.random.Generator(bitgen)
    return gen.random(count)


def noise_matrix(
    n_draws: int,
    m: int,
    seed: int,
    row_start: int = 0,
    stride: int | None = None,
) -> np.ndarray:
    """Standard-normal matrix whose row r is stream block row_start + r.

    Each row owns ceil(stride / 4) Philox counter blocks and exposes the
    first ``m`` variates, transformed by the normal inverse CDF (fixed
    consumption of one stream position per variate keeps rows addressable:
    any row range can be regenerated independently).
    """
    if stride is None:
        stride = m
    if m > stride:
        raise ValueError(f"width {m} exceeds stride {stride}")
    if n_draws < 1:
        raise ValueError("need at least one draw")
    blocks_per_row = max(1, -(-stride // 4))
    u = _uniforms(seed, row_start * blocks_per_row, n_draws * blocks_per_row * 4)
    u = u.reshape(n_draws, blocks_per_row * 4)[:, :m]
    # guard ndtri against u == 0 (probability 2^-53 per variate)
    return ndtri(np.maximum(u, 2.0**-53))


def draw_noise(m: int, seed: int, stream: int = 0, stride: int | None = None) -> NoiseDraw:
    """Single noise vector of length m from stream block ``stream``."""
    xi = noise_matrix(1, m, seed, row_start=stream, stride=stride)[0]
    return NoiseDraw(xi=xi, seed=seed, stream=stream)


def sample(
    field: GaussianField,
    n_draws: int,
    m: int | None = None,
    seed: int = 0,
) -> SampleBatch:
    """Draw field realizations from the truncated factor series.

    Parameters
    ----------
    field : GaussianField
        Field whose factor columns drive the series; in the canonical
        gauge the truncation is the eigen-series truncation.
    n_draws : int
        Number of realizations (rows).
    m : int, optional
        Number of factor columns used; defaults to the full rank. Noise is
        always addressed at full-rank stride, so truncated and full draws
        from the same seed share their xi.
    seed : int
        Noise stream key.
    """
    rank = field.dec.rank
    if m is None:
        m = rank
    if not 0 <= m <= rank:
        raise ValueError(f"truncation m={m} out of range [0, {rank}]")
    if n_draws < 1:
        raise ValueError("n_draws must be >= 1")
    if rank == 0 or m == 0:
        draws = np.zeros((n_draws, field.space.size))
    else:
        xi = noise_matrix(n_draws, m, seed, stride=rank)
        draws = xi @ field.factor.factor[:, :m].T
    return SampleBatch(draws=draws, seed=seed, truncation=m)


def empirical_covariance(batch: SampleBatch) -> np.ndarray:
    """Centered second-moment estimator (1/N) sum_r X_r X_r^T.

    No mean subtraction: the fields are centered by construction.
    """
    X = batch.draws
    n_draws = X.shape[0]
    if n_draws < 2:
        raise InsufficientSamplesError(
            f"need at least 2 draws for an empirical covariance, got {n_draws}"
        )
    return (X.T @ X) / n_draws


def covariance_standard_error(C: np.ndarray, n_draws: int) -> np.ndarray:
    """Entrywise standard error of the centered covariance estimator.

    For centered jointly Gaussian coordinates, Var(X_i X_j) =
    C_ii C_jj + C_ij^2, so SE_ij = sqrt((C_ii C_jj + C_ij^2) / N).
    """
    C = np.asarray(C, dtype=float)
    d = np.diag(C)
    return np.sqrt((np.outer(d, d) + C**2) / n_draws)


def truncation_error(dec: MercerDecomposition, m: int) -> float:
    """Exact L2 truncation error of the eigen-series: sum_{k>m} lambda_k."""
    if not 0 <= m <= dec.rank:
        raise ValueError(f"truncation m={m} out of range [0, {dec.rank}]")
    return float(dec.eigenvalues[m:].sum())


def white_noise_functional(h_coeffs, noise) -> float:
    """White-noise integral of h given by coordinates against the eigenbasis.

    W(h) = sum_k h_k xi_k; linear in h, and across draws
    E[W(h) W(g)] equals the coordinate inner product <h, g>.
    """
    h = np.asarray(h_coeffs, dtype=float).ravel()
    xi = np.asarray(noise.xi if isinstance(noise, NoiseDraw) else noise, dtype=float).ravel()
    if h.shape != xi.shape:
        raise DimensionMismatchError(
            f"coefficient length {h.shape[0]} does not match noise length {xi.shape[0]}"
        )
    return float(np.dot(h, xi))


def _mollifier_window(points: np.ndarray, bandwidth: float) -> np.ndarray:
    """Row-stochastic Gaussian window on the nodes, truncated at 4 bandwidths.

    Renormalization (not reflection) handles the boundary: each row is
    rescaled to unit mass over the nodes it reaches.
    """
    flat = points.reshape(points.shape[0], -1)
    diff = flat[:, None, :] - flat[None, :, :]
    dist2 = (diff**2).sum(axis=-1)
    G = np.exp(-dist2 / (2.0 * bandwidth**2))
    G[dist2 > (4.0 * bandwidth) ** 2] = 0.0
    return G / G.sum(axis=1, keepdims=True)


def mollify_factor(field: GaussianField, bandwidth: float) -> WhiteNoiseKernel:
    """Smooth the factor along its noise coordinate with a Gaussian window.

    The pointwise factor h(x, z) is convolved in z; the result is
    re-expressed in the eigenfunction coordinates, giving a valid factor
    of a perturbed covariance that approaches the original as the
    bandwidth shrinks. A window narrower than one cell is the identity.
    """
    if bandwidth <= 0.0:
        raise ValueError(f"bandwidth must be > 0, got {bandwidth}")
    dec = field.dec
    H = pointwise_kernel_matrix(field.factor, dec)
    G = _mollifier_window(field.space.points, bandwidth)
    H_smooth = H @ G.T
    F_smooth = H_smooth @ (dec.eigenfunctions * field.space.weights[:, None])
    return WhiteNoiseKernel(
        factor=F_smooth,
        gauge=f"mollified({field.factor.gauge}, bw={bandwidth:g})",
    )


def tangent_gram(
    field: GaussianField,
    t_index: int,
    offsets,
    r: float,
) -> np.ndarray:
    """Gram matrix of rescaled factor increments at a base node.

    G_ab = <(h(x_{t+o_a}) - h(x_t))/r, (h(x_{t+o_b}) - h(x_t))/r> in the
    noise coordinates; captures the local structure of the field at the
    node for the scaling exponent implied by r.
    """
    if r <= 0.0:
        raise ValueError(f"scaling r must be > 0, got {r}")
    n = field.space.size
    if not 0 <= t_index < n:
        raise IndexError(f"base index {t_index} out of range for size {n}")
    offsets = np.asarray(offsets, dtype=int)
    shifted = t_index + offsets
    if np.any(shifted < 0) or np.any(shifted >= n):
        raise IndexError(
            f"shifted indices {shifted.tolist()} fall outside [0, {n})"
        )
    F = field.factor.factor
    D = (F[shifted, :] - F[t_index, :]) / r
    return D @ D.T
