"""Independent brute-force oracles used to verify the library's numerics.

These deliberately avoid the decompositions the library itself uses: the CCA
oracle solves the generalized eigenproblem on explicit covariance blocks,
the rank oracle counts Gram-matrix eigenvalues, and the regression oracle
solves the normal equations directly. Keep them dumb.
"""

import numpy as np


def cca_correlations_oracle(x, y):
    """Canonical correlations via the covariance-block eigenproblem.

    Eigenvalues of pinv(Cxx) @ Cxy @ pinv(Cyy) @ Cyx are the squared
    canonical correlations; the top min(rank) of them are returned as
    correlations in descending order.
    """
    x = np.asarray(x, dtype=np.float64)
    y = np.asarray(y, dtype=np.float64)
    t = x.shape[0]
    xc = x - x.mean(axis=0)
    yc = y - y.mean(axis=0)
    cxx = xc.T @ xc / (t - 1)
    cyy = yc.T @ yc / (t - 1)
    cxy = xc.T @ yc / (t - 1)
    m = np.linalg.pinv(cxx) @ cxy @ np.linalg.pinv(cyy) @ cxy.T
    eigvals = np.linalg.eigvals(m).real
    eigvals = np.clip(np.sort(eigvals)[::-1], 0.0, 1.0)
    n_comp = min(gram_rank_oracle(xc), gram_rank_oracle(yc))
    return np.sqrt(eigvals[:n_comp])


def gram_rank_oracle(m):
    """Rank as the count of Gram-matrix eigenvalues above the squared cutoff."""
    m = np.asarray(m, dtype=np.float64)
    gram = m.T @ m if m.shape[0] >= m.shape[1] else m @ m.T
    eigvals = np.linalg.eigvalsh(gram)
    if eigvals.size == 0 or eigvals[-1] <= 0:
        return 0
    cutoff = (max(m.shape) * np.finfo(np.float64).eps) ** 2 * eigvals[-1]
    return int(np.count_nonzero(eigvals > cutoff))


def normal_equations_solve(basis, targets):
    """Least-squares coefficients via the normal equations (full-rank basis)."""
    basis = np.asarray(basis, dtype=np.float64)
    targets = np.asarray(targets, dtype=np.float64)
    return np.linalg.solve(basis.T @ basis, basis.T @ targets)
