"""Covariance-bound maps over the (density, power) plane.

Each grid cell evaluates the forward model at (n, P), computes the integral
form of the information matrix under the acquisition geometry, and stores the
four diagonal covariance entries. The surfaces expose the sensitivity
optimum: photon shot noise falls with power while power and collision
broadening grow, so the variances of the line parameters pass through a
minimum inside the plane.
"""
from __future__ import annotations

from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, replace

import numpy as np

from .errors import ConfigError, NumericalError
from .fisher import fisher_integral
from .model import ExperimentConditions, InstrumentConstants, params_from_conditions
from .synthesis import AcquisitionConfig

__all__ = ["ScanGrid", "OptimumReport", "scan_grid", "find_optimum", "squeezing_gain"]


@dataclass(frozen=True)
class ScanGrid:
    """Diagonal covariance surfaces on an (n, P) grid.

    surfaces has shape (4, len(n_values), len(p_values)); entry [a, i, j] is
    Gamma_th[a, a] at (n_values[i], p_values[j]). Cells where the information
    matrix was singular hold NaN.
    """

    n_values: np.ndarray
    p_values: np.ndarray
    xi2: float
    surfaces: np.ndarray

    def __post_init__(self) -> None:
        n_values = np.asarray(self.n_values, dtype=float)
        p_values = np.asarray(self.p_values, dtype=float)
        surfaces = np.asarray(self.surfaces, dtype=float)
        object.__setattr__(self, "n_values", n_values)
        object.__setattr__(self, "p_values", p_values)
        object.__setattr__(self, "surfaces", surfaces)
        if surfaces.shape != (4, n_values.size, p_values.size):
            raise ValueError(
                f"surfaces shape {surfaces.shape} does not match grid "
                f"(4, {n_values.size}, {p_values.size})"
            )

    def surface(self, param_index: int) -> np.ndarray:
        """2-D surface for a 1-based parameter index."""
        _check_index(param_index)
        return self.surfaces[param_index - 1]


@dataclass(frozen=True)
class OptimumReport:
    """Grid minimum of one covariance surface."""

    param_index: int
    n_opt: float
    p_opt: float
    gamma_min: float
    interior: bool


def _check_index(param_index: int) -> None:
    if param_index not in (1, 2, 3, 4):
        raise ConfigError(f"param_index must be 1..4, got {param_index!r}")


def _cell_diag(n, p, xi2, k, window, nu_t, n_eff):
    try:
        v = params_from_conditions(ExperimentConditions(n=n, p=p, xi2=xi2), k)
        result = fisher_integral(v, window, nu_t, n_eff)
    except NumericalError:
        return np.full(4, np.nan)
    if result.gamma_th is None or result.rank < 4:
        return np.full(4, np.nan)
    return np.diag(result.gamma_th)


def scan_grid(
    n_values,
    p_values,
    k: InstrumentConstants,
    cfg: AcquisitionConfig,
    xi2: float = 1.0,
    threads: int = 1,
) -> ScanGrid:
    """Evaluate the four diagonal covariance surfaces over the (n, P) grid.

    Singular cells become NaN rather than raising, so one degenerate corner
    does not void a scan. Output is bit-identical for any thread count: cells
    are written by index.
    """
    n_values = np.asarray(n_values, dtype=float)
    p_values = np.asarray(p_values, dtype=float)
    if n_values.size == 0 or p_values.size == 0:
        raise ConfigError("scan grids must be nonempty")
    if np.any(np.diff(n_values) <= 0.0) or np.any(np.diff(p_values) <= 0.0):
        raise ConfigError("scan grids must be sorted strictly ascending")
    window = (cfg.fit_lo, cfg.fit_hi)
    nu_t = cfg.coarse_spacing
    n_eff = cfg.n_eff
    surfaces = np.empty((4, n_values.size, p_values.size))
    cells = [(i, j) for i in range(n_values.size) for j in range(p_values.size)]

    def fill(cell):
        i, j = cell
        surfaces[:, i, j] = _cell_diag(n_values[i], p_values[j], xi2, k, window, nu_t, n_eff)

    if threads == 1:
        for cell in cells:
            fill(cell)
    else:
        with ThreadPoolExecutor(max_workers=threads) as pool:
            list(pool.map(fill, cells))
    return ScanGrid(n_values=n_values, p_values=p_values, xi2=xi2, surfaces=surfaces)


def find_optimum(sg: ScanGrid, param_index: int, refine: bool = False) -> OptimumReport:
    """Grid argmin of one surface; ties break toward smaller (n, P).

    With refine=True the reported location (not the value) is polished by a
    one-step quadratic fit through the argmin and its grid neighbors, staying
    inside the neighboring cells.
    """
    _check_index(param_index)
    a = sg.surface(param_index)
    if not np.any(np.isfinite(a)):
        raise NumericalError(f"surface {param_index} holds no finite values")
    flat = np.nanargmin(a)  # C-order: first minimum is smallest (n, P) lexicographically
    i, j = (int(x) for x in np.unravel_index(flat, a.shape))
    n_opt, p_opt = float(sg.n_values[i]), float(sg.p_values[j])
    gamma_min = float(a[i, j])
    interior = bool(0 < i < a.shape[0] - 1 and 0 < j < a.shape[1] - 1)
    if refine and interior:
        n_opt = _parabolic(sg.n_values[i - 1 : i + 2], a[i - 1 : i + 2, j])
        p_opt = _parabolic(sg.p_values[j - 1 : j + 2], a[i, j - 1 : j + 2])
    return OptimumReport(
        param_index=param_index,
        n_opt=n_opt,
        p_opt=p_opt,
        gamma_min=gamma_min,
        interior=interior,
    )


def _parabolic(x3, y3) -> float:
    # vertex of the parabola through three points, clamped to the outer two
    if not np.all(np.isfinite(y3)):
        return float(x3[1])
    denom = y3[0] - 2.0 * y3[1] + y3[2]
    if denom <= 0.0:
        return float(x3[1])
    t = 0.5 * (y3[0] - y3[2]) / denom
    return float(x3[1] + np.clip(t, -1.0, 1.0) * 0.5 * (x3[2] - x3[0]))


def squeezing_gain(
    c: ExperimentConditions,
    k: InstrumentConstants,
    cfg: AcquisitionConfig,
    xi2_a: float,
    xi2_b: float,
) -> np.ndarray:
    """Elementwise Gamma_th diagonal ratio at xi2_b over xi2_a, fixed (n, P)."""
    if not (xi2_a > 0.0 and xi2_b > 0.0):
        raise ConfigError("squeezing factors must be positive")
    window = (cfg.fit_lo, cfg.fit_hi)
    diag = []
    for xi2 in (xi2_a, xi2_b):
        v = params_from_conditions(replace(c, xi2=xi2), k)
        result = fisher_integral(v, window, cfg.coarse_spacing, cfg.n_eff)
        if result.gamma_th is None or result.rank < 4:
            raise NumericalError(f"information matrix singular at xi2 = {xi2}")
        diag.append(np.diag(result.gamma_th))
    return diag[1] / diag[0]
