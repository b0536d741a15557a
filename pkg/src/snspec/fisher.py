"""Fisher information and Cramer-Rao covariance bounds for spectrum fits.

Two construction routes are provided and kept deliberately independent so
they can cross-check each other:

* a discrete sum over the fitted frequency bins, info = (n_eff + 2) *
  sum_i g_i g_i^T with g_i the log-spectrum gradient, and
* a continuous-frequency approximation, info = (n_eff + 2) / nu_t *
  integral of g g^T over the fit window, evaluated by adaptive quadrature.

`nu_t` is the frequency spacing of the grid actually fit (after any
coarse-graining), not necessarily 1/T of the raw record. The covariance
bound is the inverse information matrix; rank-deficient information is
reported instead of pseudo-inverted.
"""

from __future__ import annotations

from dataclasses import dataclass
from functools import lru_cache

import numpy as np

from .errors import NumericalError
from .model import SpectralParams, grad_log_psd

# Eigenvalues below RANK_TOL times the largest (on the correlation-equilibrated
# matrix) count as zero for the rank check.
RANK_TOL = 1e-12


@dataclass(frozen=True)
class FisherResult:
    """Information matrix and, when it is invertible, the covariance bound.

    info     : 4x4 Fisher information matrix (exactly symmetric)
    gamma_th : 4x4 covariance lower bound info^-1, or None if info is singular
    rank     : numerical rank of info
    n_eff    : statistical average count per fitted bin
    nu_t     : frequency spacing of the fitted grid, Hz
    window   : (lo, hi) fit window, Hz
    method   : "discrete-sum" or "integral"
    """

    info: np.ndarray
    gamma_th: np.ndarray | None
    rank: int
    n_eff: float
    nu_t: float
    window: tuple[float, float]
    method: str


def _symmetrize(a: np.ndarray) -> np.ndarray:
    return 0.5 * (a + a.T)


def invert_psd_matrix(a: np.ndarray, rel_tol: float = RANK_TOL):
    """Invert a symmetric positive-semidefinite matrix with a rank check.

    Returns (inverse, rank); inverse is None when the matrix is numerically
    rank-deficient. The matrix is equilibrated to correlation form before the
    eigen-factorization so badly mixed units (uV^2 vs Hz scales) do not
    masquerade as rank deficiency, and so both covariance routes agree to
    near machine precision.
    """
    a = np.asarray(a, dtype=float)
    n = a.shape[0]
    d = np.sqrt(np.clip(np.diag(a), 0.0, None))
    zero = d <= 0
    if zero.any():
        # a PSD matrix with a zero diagonal entry has that whole row/col zero
        keep = ~zero
        if not keep.any():
            return None, 0
        _, sub_rank = invert_psd_matrix(a[np.ix_(keep, keep)], rel_tol)
        return None, sub_rank
    scale = np.outer(d, d)
    corr = a / scale
    w, q = np.linalg.eigh(_symmetrize(corr))
    if w[-1] <= 0:
        return None, 0
    rank = int(np.sum(w > rel_tol * w[-1]))
    if rank < n:
        return None, rank
    inv_corr = (q / w) @ q.T
    return _symmetrize(inv_corr) / scale, rank


def _result(info, n_eff, nu_t, window, method) -> FisherResult:
    info = _symmetrize(info)
    gamma, rank = invert_psd_matrix(info)
    return FisherResult(
        info=info,
        gamma_th=gamma,
        rank=rank,
        n_eff=float(n_eff),
        nu_t=float(nu_t),
        window=(float(window[0]), float(window[1])),
        method=method,
    )


def fisher_discrete(v: SpectralParams, bins, n_eff: float) -> FisherResult:
    """Fisher information from an explicit list of fitted bin frequencies."""
    bins = np.asarray(bins, dtype=float)
    if bins.ndim != 1 or bins.size < 1:
        raise ValueError("bins must be a nonempty 1-D frequency array")
    if n_eff < 1:
        raise ValueError(f"n_eff must be >= 1, got {n_eff}")
    g = grad_log_psd(v, bins)
    info = (n_eff + 2.0) * (g.T @ g)
    spacing = float(np.median(np.diff(bins))) if bins.size > 1 else 0.0
    return _result(info, n_eff, spacing, (bins[0], bins[-1]), "discrete-sum")


@lru_cache(maxsize=32)
def _gl_nodes(order: int):
    x, w = np.polynomial.legendre.leggauss(order)
    return x, w


def _panel_edges(lo: float, hi: float, nu_l: float, delta_nu: float) -> np.ndarray:
    # Grade panels toward the resonance, where the integrand peaks.
    offsets = (-25.0, -5.0, -1.0, 0.0, 1.0, 5.0, 25.0)
    candidates = [lo, hi] + [nu_l + k * delta_nu for k in offsets]
    edges = sorted({e for e in candidates if lo <= e <= hi})
    return np.asarray(edges)


def _outer_integral(v: SpectralParams, lo: float, hi: float, rel_tol: float):
    """Integral over [lo, hi] of the 4x4 outer product of grad_log_psd.

    Composite Gauss-Legendre on resonance-graded panels, doubling the order
    until every element is stable to rel_tol (elementwise, normalized by
    sqrt(diag_j diag_k) so near-zero antisymmetric elements do not stall
    convergence on a meaningless relative scale).
    """
    edges = _panel_edges(lo, hi, v.nu_l, v.delta_nu)
    previous = None
    for order in (32, 64, 128, 256, 512):
        x, w = _gl_nodes(order)
        total = np.zeros((4, 4))
        for a, b in zip(edges[:-1], edges[1:]):
            half = 0.5 * (b - a)
            nodes = 0.5 * (a + b) + half * x
            g = grad_log_psd(v, nodes)
            total += half * np.einsum("i,ij,ik->jk", w, g, g)
        if previous is not None:
            d = np.sqrt(np.clip(np.diag(total), 0.0, None))
            norm = np.outer(d, d)
            norm[norm == 0] = np.inf
            if np.max(np.abs(total - previous) / norm) <= rel_tol:
                return total
        previous = total
    raise NumericalError(
        f"quadrature did not converge to {rel_tol} on window ({lo}, {hi})"
    )


def fisher_integral(
    v: SpectralParams,
    window: tuple[float, float],
    nu_t: float,
    n_eff: float,
    rel_tol: float = 1e-9,
) -> FisherResult:
    """Fisher information in the continuous-frequency approximation.

    nu_t is the spacing of the fitted grid; the information is
    (n_eff + 2) / nu_t times the window integral of the log-gradient outer
    product. Agrees with fisher_discrete on the same window once the
    linewidth spans many grid steps.
    """
    lo, hi = float(window[0]), float(window[1])
    if not (0 <= lo < hi):
        raise ValueError(f"window must satisfy 0 <= lo < hi, got ({lo}, {hi})")
    if nu_t <= 0:
        raise ValueError(f"nu_t must be > 0, got {nu_t}")
    if n_eff < 1:
        raise ValueError(f"n_eff must be >= 1, got {n_eff}")
    integral = _outer_integral(v, lo, hi, rel_tol)
    info = (n_eff + 2.0) / nu_t * integral
    return _result(info, n_eff, nu_t, (lo, hi), "integral")


def error_propagation_covariance(v: SpectralParams, bins, n_eff: float) -> np.ndarray:
    """Covariance of the spectrum fit by linear error propagation.

    Builds the design matrix L_ij = (d f_i / d v_j) / f_i on the fitted bins
    and returns (L^T L)^-1 / n_eff. Up to the (n_eff + 2) vs n_eff factor this
    is the same bound as the Fisher route; the residual difference is the
    Gaussian-approximation variance term.
    """
    bins = np.asarray(bins, dtype=float)
    if bins.ndim != 1 or bins.size < 4:
        raise ValueError("bins must be a 1-D frequency array with >= 4 entries")
    if n_eff < 1:
        raise ValueError(f"n_eff must be >= 1, got {n_eff}")
    ell = grad_log_psd(v, bins)
    m = _symmetrize(ell.T @ ell)
    m_inv, rank = invert_psd_matrix(m)
    if m_inv is None:
        raise NumericalError(
            f"design matrix is rank-deficient (rank {rank} of 4); "
            "covariance undefined in the null directions"
        )
    return m_inv / n_eff


def wishart_std(gamma_th: np.ndarray, n_samples: int) -> np.ndarray:
    """Standard error of each sample-covariance element at the Wishart law.

    For N samples with true covariance Gamma, var(Gamma_exp_ij) =
    (Gamma_ij^2 + Gamma_ii Gamma_jj) / N; returns the elementwise square root.
    """
    g = np.asarray(gamma_th, dtype=float)
    if g.ndim != 2 or g.shape[0] != g.shape[1]:
        raise ValueError(f"gamma_th must be square, got shape {g.shape}")
    if n_samples < 2:
        raise ValueError(f"n_samples must be >= 2, got {n_samples}")
    d = np.diag(g)
    return np.sqrt((g * g + np.outer(d, d)) / n_samples)


def normalized_deviation(
    gamma_exp: np.ndarray, gamma_th: np.ndarray, n_samples: int
) -> np.ndarray:
    """|gamma_th - gamma_exp| in units of the Wishart standard error.

    Elements whose standard error is zero map to 0 when the matrices agree
    there and +inf otherwise.
    """
    ge = np.asarray(gamma_exp, dtype=float)
    gt = np.asarray(gamma_th, dtype=float)
    if ge.shape != gt.shape:
        raise ValueError(f"shape mismatch: {ge.shape} vs {gt.shape}")
    sigma = wishart_std(gt, n_samples)
    num = np.abs(gt - ge)
    out = np.full_like(num, np.inf)
    np.divide(num, sigma, out=out, where=sigma > 0)
    out[(sigma == 0) & (num == 0)] = 0.0
    return out
