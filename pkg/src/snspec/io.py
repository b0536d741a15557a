"""File formats: CSV for grids and surfaces, JSON for structured reports.

Floats are written with repr-exact precision so every emitted file re-ingests
bit-identically; writers emit LF newlines and sorted JSON keys so identical
inputs give byte-identical files.
"""
from __future__ import annotations

import csv
import json
from typing import Any

import numpy as np

from .errors import ConfigError
from .synthesis import AveragedSpectrum, Spectrum

__all__ = [
    "write_spectrum_csv",
    "read_spectrum_csv",
    "write_scan_csv",
    "read_scan_csv",
    "write_json",
    "read_json",
    "matrix_to_rows",
]

SPECTRUM_HEADER = ["nu_hz", "psd_uv2_per_hz"]
SCAN_HEADER = ["n_cm3", "p_w", "gamma11", "gamma22", "gamma33", "gamma44"]


def _fmt(x: float) -> str:
    return format(float(x), ".17g")


def write_spectrum_csv(path, sp) -> None:
    """Spectrum or AveragedSpectrum to two-column CSV."""
    values = sp.s_bar if isinstance(sp, AveragedSpectrum) else sp.s
    with open(path, "w", newline="\n") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(SPECTRUM_HEADER)
        for nu, s in zip(sp.nu, values):
            w.writerow([_fmt(nu), _fmt(s)])


def read_spectrum_csv(path, n_eff: int | None = None):
    """CSV back to a Spectrum (n_eff None) or AveragedSpectrum."""
    with open(path, newline="") as fh:
        rows = list(csv.reader(fh))
    if not rows or rows[0] != SPECTRUM_HEADER:
        raise ConfigError(
            f"{path}: expected header {','.join(SPECTRUM_HEADER)}, "
            f"got {','.join(rows[0]) if rows else 'empty file'}"
        )
    try:
        data = np.array([[float(a), float(b)] for a, b in rows[1:]])
    except (ValueError, TypeError) as exc:
        raise ConfigError(f"{path}: non-numeric spectrum row ({exc})") from exc
    if data.size == 0:
        raise ConfigError(f"{path}: no data rows")
    if n_eff is None:
        return Spectrum(nu=data[:, 0], s=data[:, 1])
    return AveragedSpectrum(nu=data[:, 0], s_bar=data[:, 1], n_eff=n_eff)


def write_scan_csv(path, sg) -> None:
    """ScanGrid to long-format CSV, one row per (n, P) cell."""
    with open(path, "w", newline="\n") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(SCAN_HEADER)
        for i, n in enumerate(sg.n_values):
            for j, p in enumerate(sg.p_values):
                w.writerow([_fmt(n), _fmt(p)] + [_fmt(sg.surfaces[a, i, j]) for a in range(4)])


def read_scan_csv(path):
    """Long-format CSV back to (n_values, p_values, surfaces (4, Nn, Np))."""
    with open(path, newline="") as fh:
        rows = list(csv.reader(fh))
    if not rows or rows[0] != SCAN_HEADER:
        raise ConfigError(
            f"{path}: expected header {','.join(SCAN_HEADER)}, "
            f"got {','.join(rows[0]) if rows else 'empty file'}"
        )
    try:
        data = np.array([[float(x) for x in row] for row in rows[1:]])
    except (ValueError, TypeError) as exc:
        raise ConfigError(f"{path}: non-numeric scan row ({exc})") from exc
    if data.size == 0:
        raise ConfigError(f"{path}: no data rows")
    n_values = np.unique(data[:, 0])
    p_values = np.unique(data[:, 1])
    if data.shape[0] != n_values.size * p_values.size:
        raise ConfigError(f"{path}: rows do not form a complete (n, P) grid")
    surfaces = np.full((4, n_values.size, p_values.size), np.nan)
    ni = np.searchsorted(n_values, data[:, 0])
    pj = np.searchsorted(p_values, data[:, 1])
    for a in range(4):
        surfaces[a, ni, pj] = data[:, 2 + a]
    return n_values, p_values, surfaces


def matrix_to_rows(m) -> list[list[float]]:
    """4x4 ndarray to row-major nested lists for JSON."""
    return [[float(x) for x in row] for row in np.asarray(m)]


def write_json(path, payload: dict[str, Any]) -> None:
    with open(path, "w", newline="\n") as fh:
        json.dump(payload, fh, indent=2, sort_keys=True)
        fh.write("\n")


def read_json(path) -> dict[str, Any]:
    with open(path) as fh:
        try:
            doc = json.load(fh)
        except json.JSONDecodeError as exc:
            raise ConfigError(f"{path}:{exc.lineno}:{exc.colno}: {exc.msg}") from exc
    if not isinstance(doc, dict):
        raise ConfigError(f"{path}: top level must be a JSON object")
    return doc
