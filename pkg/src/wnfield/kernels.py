"""Covariance kernels and assembly of covariance matrices over a space.

The builtin corpus spans the eigenvalue-decay regimes the factorization has
to survive: nonsmooth (Brownian motion, fractional Brownian motion), smooth
(squared exponential, numerically rank deficient), rank-structured
(Brownian bridge) and diagonal (white noise on the nodes).
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Callable, Mapping

import numpy as np

from .errors import (
    DimensionMismatchError,
    InvalidParameterError,
    NumericError,
    UnknownKernelError,
)
from .spaces import DiscreteMeasureSpace

__all__ = [
    "CovarianceKernel",
    "builtin_kernel",
    "builtin_kernel_names",
    "assemble",
    "trace_of_operator",
    "matrix_kernel",
]


@dataclass(frozen=True)
class CovarianceKernel:
    """Symmetric positive kernel K(s, t) given by a pure evaluator.

    The evaluator must accept broadcastable ndarrays of point coordinates and
    return the kernel values elementwise; symmetry is the caller's promise
    and is additionally absorbed by symmetrization at assembly. Data-defined
    kernels carry their dense entries in ``matrix`` and index by position
    instead of coordinate.
    """

    name: str
    evaluator: Callable[[np.ndarray, np.ndarray], np.ndarray]
    params: Mapping[str, float] = field(default_factory=dict)
    matrix: np.ndarray | None = None


#: kernels whose formulas only make sense for scalar coordinates
_SCALAR_ONLY = ("brownian_motion", "brownian_bridge", "fbm")


def _brownian_motion(s, t):
    return np.minimum(s, t)


def _brownian_bridge(s, t):
    return np.minimum(s, t) - s * t


def _make_fbm(hurst: float):
    twoH = 2.0 * hurst

    def fbm(s, t):
        return 0.5 * (
            np.abs(s) ** twoH + np.abs(t) ** twoH - np.abs(s - t) ** twoH
        )

    return fbm


def _make_squared_exponential(length_scale: float):
    def sqexp(s, t):
        d2 = (s - t) ** 2
        if np.ndim(d2) > 2:  # (n, n, d) point blocks: Euclidean distance
            d2 = d2.sum(axis=-1)
        return np.exp(-d2 / (2.0 * length_scale**2))

    return sqexp


def _reject_extras(name: str, params: Mapping[str, float], allowed: tuple[str, ...]):
    extras = set(params) - set(allowed)
    if extras:
        raise InvalidParameterError(
            f"kernel '{name}' does not take parameters {sorted(extras)}"
        )


def _make_white_diagonal(sigma2: float):
    def white(s, t):
        eq = s == t
        if np.ndim(eq) > 2:
            eq = eq.all(axis=-1)
        return np.where(eq, sigma2, 0.0)

    return white


def builtin_kernel(name: str, params: Mapping[str, float] | None = None) -> CovarianceKernel:
    """Look up a builtin kernel by name.

    Parameters
    ----------
    name : str
        One of ``brownian_motion``, ``brownian_bridge``, ``fbm``,
        ``squared_exponential``, ``white_diagonal``.
    params : mapping, optional
        ``fbm`` takes ``hurst`` in (0, 1); ``squared_exponential`` takes
        ``length_scale`` > 0 (default 1.0); ``white_diagonal`` takes
        ``sigma2`` > 0 (default 1.0). The Brownian kernels take none.
    """
    params = dict(params or {})
    if name == "brownian_motion":
        _reject_extras(name, params, ())
        return CovarianceKernel(name, _brownian_motion)
    if name == "brownian_bridge":
        _reject_extras(name, params, ())
        return CovarianceKernel(name, _brownian_bridge)
    if name == "fbm":
        _reject_extras(name, params, ("hurst",))
        hurst = float(params.get("hurst", 0.5))
        if not 0.0 < hurst < 1.0:
            raise InvalidParameterError(f"fbm hurst must lie in (0, 1), got {hurst}")
        return CovarianceKernel(name, _make_fbm(hurst), {"hurst": hurst})
    if name == "squared_exponential":
        _reject_extras(name, params, ("length_scale",))
        ell = float(params.get("length_scale", 1.0))
        if ell <= 0.0:
            raise InvalidParameterError(f"length_scale must be > 0, got {ell}")
        return CovarianceKernel(name, _make_squared_exponential(ell), {"length_scale": ell})
    if name == "white_diagonal":
        _reject_extras(name, params, ("sigma2",))
        sigma2 = float(params.get("sigma2", 1.0))
        if sigma2 <= 0.0:
            raise InvalidParameterError(f"sigma2 must be > 0, got {sigma2}")
        return CovarianceKernel(name, _make_white_diagonal(sigma2), {"sigma2": sigma2})
    raise UnknownKernelError(
        f"unknown kernel '{name}'; builtins are {', '.join(builtin_kernel_names())}"
    )


def builtin_kernel_names() -> tuple[str, ...]:
    return (
        "brownian_motion",
        "brownian_bridge",
        "fbm",
        "squared_exponential",
        "white_diagonal",
    )


def matrix_kernel(entries: np.ndarray, name: str = "custom") -> CovarianceKernel:
    """Wrap a user-supplied dense matrix as a kernel over point indices.

    The evaluator ignores coordinates and reads C[i, j]; it only makes sense
    together with the space whose size matches the matrix. Used for kernels
    supplied as data files instead of code.
    """
    C = np.asarray(entries, dtype=float)
    if C.ndim != 2 or C.shape[0] != C.shape[1]:
        raise InvalidParameterError(f"matrix kernel must be square, got shape {C.shape}")

    def by_index(i, j):
        return C[np.asarray(i, dtype=int), np.asarray(j, dtype=int)]

    return CovarianceKernel(name, by_index, {"size": C.shape[0]}, matrix=C)


def assemble(kernel: CovarianceKernel, space: DiscreteMeasureSpace) -> np.ndarray:
    """Evaluate C_ij = K(x_i, x_j) on the space and symmetrize.

    Symmetrizing by (C + C^T)/2 absorbs floating asymmetry in user
    evaluators. Non-finite values are a hard error naming the first
    offending pair.
    """
    n = space.size
    if kernel.matrix is not None:
        if kernel.matrix.shape[0] != n:
            raise DimensionMismatchError(
                f"matrix kernel is {kernel.matrix.shape[0]}x{kernel.matrix.shape[0]} "
                f"but space has {n} points"
            )
        C = kernel.matrix.copy()
    else:
        pts = space.points
        if pts.ndim == 1:
            S, T = pts[:, None], pts[None, :]
        else:
            if kernel.name in _SCALAR_ONLY:
                raise InvalidParameterError(
                    f"kernel '{kernel.name}' is defined for scalar coordinates only"
                )
            S, T = pts[:, None, :], pts[None, :, :]
        C = np.asarray(kernel.evaluator(S, T), dtype=float)
    if C.shape != (n, n):
        raise DimensionMismatchError(
            f"kernel '{kernel.name}' produced shape {C.shape}, expected ({n}, {n})"
        )
    bad = ~np.isfinite(C)
    if bad.any():
        i, j = np.argwhere(bad)[0]
        raise NumericError(
            f"kernel '{kernel.name}' is not finite at point pair "
            f"({space.points[i]}, {space.points[j]})"
        )
    return (C + C.T) / 2.0


def trace_of_operator(C: np.ndarray, space: DiscreteMeasureSpace) -> float:
    """Discrete trace of the covariance operator: sum_i C_ii w_i."""
    C = np.asarray(C, dtype=float)
    if C.shape != (space.size, space.size):
        raise DimensionMismatchError(
            f"matrix shape {C.shape} does not match space size {space.size}"
        )
    return float(np.dot(np.diag(C), space.weights))
