"""Canonical correlation analysis and its supporting linear-algebra primitives.

Matrices are row-major time series, shape (n_samples, n_channels). Variates
are scaled to unit sample variance with denominator (n_samples - 1), the
scale convention the rest of the package relies on.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from scipy.linalg import lstsq, qr, solve_triangular

from .errors import (
    DegenerateInputError,
    InsufficientSamplesError,
    ShapeError,
    ValidationError,
)

__all__ = [
    "CcaResult",
    "canoncorr",
    "estimate_rank",
    "least_squares_solve",
    "mean_center",
]

_EPS = np.finfo(np.float64).eps


def as_matrix(a, name="matrix"):
    """Coerce ``a`` to a validated 2-D float64 array.

    Requires at least one row and one column and all entries finite.
    """
    m = np.asarray(a, dtype=np.float64)
    if m.ndim != 2:
        raise ShapeError(
            f"{name} must be 2-D (samples x channels), got {m.ndim} dimension(s)"
        )
    if m.shape[0] < 1 or m.shape[1] < 1:
        raise ShapeError(
            f"{name} must have at least one row and one column, got shape {m.shape}"
        )
    if not np.isfinite(m).all():
        row, col = np.argwhere(~np.isfinite(m))[0]
        raise ValidationError(f"non-finite value in {name} at row {row}, column {col}")
    return m


@dataclass(frozen=True)
class CcaResult:
    """Unmixing matrices, correlations, and variates from one CCA run.

    Attributes
    ----------
    a_unmix : ndarray, shape (n_x_channels, n_comp)
        Maps mean-centered x channels to the u variates.
    b_unmix : ndarray, shape (n_y_channels, n_comp)
        Maps mean-centered y channels to the v variates.
    correlations : ndarray, shape (n_comp,)
        Canonical correlations, non-increasing, each in [0, 1].
    u_variates : ndarray, shape (n_samples, n_comp)
        ``mean_center(x)[0] @ a_unmix``; zero mean, unit sample variance.
    v_variates : ndarray, shape (n_samples, n_comp)
        ``mean_center(y)[0] @ b_unmix``; zero mean, unit sample variance.
    n_comp : int
        Number of variate pairs, ``min(rank(x), rank(y))``.
    x_mean, y_mean : ndarray
        Per-channel means subtracted before the decomposition.
    """

    a_unmix: np.ndarray
    b_unmix: np.ndarray
    correlations: np.ndarray
    u_variates: np.ndarray
    v_variates: np.ndarray
    n_comp: int
    x_mean: np.ndarray
    y_mean: np.ndarray


def mean_center(m, name="matrix"):
    """Subtract the per-column sample mean.

    Returns
    -------
    centered : ndarray
        Same shape as ``m``; every column has sample mean 0.
    means : ndarray, shape (n_channels,)
        The subtracted means, so ``m == centered + means``.
    """
    m = as_matrix(m, name)
    means = m.mean(axis=0)
    return m - means, means


def estimate_rank(m, tol=None):
    """Numerical rank: the number of singular values above ``tol * sigma_max``.

    ``tol`` is a relative tolerance and defaults to
    ``max(n_rows, n_cols) * machine_epsilon``, the standard conservative
    choice. An all-zero matrix has rank 0.
    """
    m = as_matrix(m, "matrix")
    if tol is not None and tol <= 0:
        raise ValueError(f"tol must be positive, got {tol}")
    s = np.linalg.svd(m, compute_uv=False)
    if tol is None:
        tol = max(m.shape) * _EPS
    return int(np.count_nonzero(s > tol * s[0]))


def least_squares_solve(basis, targets):
    """Coefficients minimizing ``||basis @ coeffs - targets||`` (Frobenius).

    Solved through an SVD-backed orthogonal decomposition with the same
    relative rank tolerance as :func:`estimate_rank`, so a rank-deficient
    basis yields the minimum-norm solution instead of failing.

    Parameters
    ----------
    basis : ndarray, shape (n_samples, k)
    targets : ndarray, shape (n_samples, n)

    Returns
    -------
    coeffs : ndarray, shape (k, n)
    """
    basis = as_matrix(basis, "basis")
    targets = as_matrix(targets, "targets")
    if basis.shape[0] != targets.shape[0]:
        raise ShapeError(
            "basis and targets must have the same number of rows, "
            f"got {basis.shape[0]} and {targets.shape[0]}"
        )
    coeffs, _, _, _ = lstsq(basis, targets, cond=max(basis.shape) * _EPS)
    return coeffs


def canoncorr(x, y):
    """Canonical correlation analysis of two time-aligned recordings.

    Finds paired linear combinations ``u_i = xc @ a_i`` and ``v_i = yc @ b_i``
    of the mean-centered inputs that maximize ``corr(u_i, v_i)``, each pair
    uncorrelated with all earlier pairs, returned in order of decreasing
    correlation. The number of pairs is ``min(rank(x), rank(y))``.

    Implementation: economy QR with column pivoting of each centered block,
    truncated to numerical rank, then an SVD of the product of the two
    orthogonal factors. Unmixing matrices are recovered by triangular
    back-substitution and scaled so every variate has unit sample variance.
    Signs are fixed so ``corr(u_i, v_i) >= 0`` and the largest-magnitude
    entry of each ``a_unmix`` column is positive, making the output
    deterministic for a fixed input.

    Parameters
    ----------
    x : ndarray, shape (n_samples, n_x_channels)
        Recordings to analyze (e.g. corrupted data).
    y : ndarray, shape (n_samples, n_y_channels)
        Second set of recordings (e.g. reference noise).

    Returns
    -------
    CcaResult

    Raises
    ------
    ShapeError
        If the row counts differ.
    InsufficientSamplesError
        If fewer than 3 samples, or the sample count does not exceed the
        numerical rank of either input (covariances would be degenerate).
    DegenerateInputError
        If either input has numerical rank 0.
    """
    x = as_matrix(x, "x")
    y = as_matrix(y, "y")
    t = x.shape[0]
    if y.shape[0] != t:
        raise ShapeError(
            f"x and y must cover the same samples, got {t} and {y.shape[0]} rows"
        )
    if t < 3:
        raise InsufficientSamplesError(f"need at least 3 samples, got {t}")

    xc, x_mean = mean_center(x, "x")
    yc, y_mean = mean_center(y, "y")

    qx, rx, px, rank_x = _pivoted_qr_rank(xc)
    qy, ry, py, rank_y = _pivoted_qr_rank(yc)
    if rank_x == 0:
        raise DegenerateInputError("x has numerical rank 0")
    if rank_y == 0:
        raise DegenerateInputError("y has numerical rank 0")
    _require_samples_beyond_rank(x, rank_x, t, "x")
    _require_samples_beyond_rank(y, rank_y, t, "y")

    left, d, right_t = np.linalg.svd(qx.T @ qy, full_matrices=False)
    n_comp = min(rank_x, rank_y)
    correlations = np.clip(d[:n_comp], 0.0, 1.0)

    scale = math.sqrt(t - 1)
    a = _back_substitute(rx, px, left[:, :n_comp], x.shape[1], rank_x, scale)
    b = _back_substitute(ry, py, right_t.T[:, :n_comp], y.shape[1], rank_y, scale)

    # corr(u_i, v_i) equals the singular value d_i >= 0 already; flipping a
    # and b columns together keeps it non-negative while pinning the sign of
    # the dominant a entry.
    flips = np.sign(a[np.argmax(np.abs(a), axis=0), np.arange(n_comp)])
    flips[flips == 0] = 1.0
    a *= flips
    b *= flips

    return CcaResult(
        a_unmix=a,
        b_unmix=b,
        correlations=correlations,
        u_variates=xc @ a,
        v_variates=yc @ b,
        n_comp=int(n_comp),
        x_mean=x_mean,
        y_mean=y_mean,
    )


def _pivoted_qr_rank(mc):
    """Economy pivoted QR of a centered block, truncated to numerical rank."""
    q, r, p = qr(mc, mode="economic", pivoting=True)
    diag = np.abs(np.diag(r))
    if diag.size == 0 or diag[0] == 0.0:
        return q[:, :0], r[:0, :0], p, 0
    tol = max(mc.shape) * _EPS * diag[0]
    rank = int(np.count_nonzero(diag > tol))
    return q[:, :rank], r[:rank, :rank], p, rank


def _require_samples_beyond_rank(raw, rank_centered, t, name):
    # Sample covariances need strictly more samples than the raw input's
    # rank. Centering lowers rank by at most one, so only the boundary case
    # pays for the extra decomposition.
    if rank_centered >= t or (rank_centered == t - 1 and estimate_rank(raw) >= t):
        raise InsufficientSamplesError(
            f"{name} needs more samples than its rank; "
            f"got {t} samples for rank >= {t}"
        )


def _back_substitute(r, perm, ortho_cols, n_channels, rank, scale):
    coeffs = solve_triangular(r, ortho_cols) * scale
    full = np.zeros((n_channels, ortho_cols.shape[1]))
    full[perm[:rank]] = coeffs
    return full
