"""Command-line front end.

Subcommands wire the pipeline end to end: synth writes synthetic spectra, fit
recovers parameters from a spectrum file, validate runs the Monte Carlo
comparison against the covariance bound, crb evaluates the bound alone, scan
maps it over the (n, P) plane, kstats computes cumulant statistics of a sample
file. Every command is deterministic given (config, seed); no output carries a
timestamp.

Exit codes: 0 success, 2 usage or config error, 3 I/O error, 4 numerical
failure.
"""
from __future__ import annotations

import argparse
import os
import sys

import numpy as np

from . import __version__
from .config import RunConfig, load_config
from .errors import ConfigError, NumericalError
from .estimation import k2, k4, mle_fit, var_k2
from .fisher import fisher_integral, wishart_std
from .io import (
    matrix_to_rows,
    read_json,
    read_spectrum_csv,
    write_json,
    write_scan_csv,
    write_spectrum_csv,
)
from .montecarlo import run_validation, trial_spectrum
from .scan import find_optimum, scan_grid
from .synthesis import AveragedSpectrum

__all__ = ["main"]


def _provenance(cfg: RunConfig, seed: int, threads: int) -> dict:
    return {
        "config": cfg.raw,
        "master_seed_used": seed,
        "threads_used": threads,
        "version": __version__,
    }


def _outpath(args, cfg: RunConfig, name: str) -> str:
    out_dir = args.out if args.out is not None else cfg.out_dir
    os.makedirs(out_dir, exist_ok=True)
    return os.path.join(out_dir, name)


def _formats(args, cfg: RunConfig) -> tuple[str, ...]:
    return (args.format,) if args.format else cfg.formats


def _seed(args, cfg: RunConfig) -> int:
    return args.seed if args.seed is not None else cfg.master_seed


def _threads(args, cfg: RunConfig) -> int:
    if args.threads is not None:
        if args.threads < 1:
            raise ConfigError("--threads must be at least 1")
        return args.threads
    return cfg.threads


def cmd_synth(args) -> int:
    cfg = load_config(args.config)
    acq = cfg.require_acquisition()
    v = cfg.spectral_params()
    seed = _seed(args, cfg)
    sp = trial_spectrum(v, acq, (seed, 0), cfg.synthesis)
    formats = _formats(args, cfg)
    written = []
    if "csv" in formats:
        path = _outpath(args, cfg, "spectrum.csv")
        write_spectrum_csv(path, sp)
        written.append(path)
    if "json" in formats:
        path = _outpath(args, cfg, "spectrum.json")
        write_json(
            path,
            {
                "nu_hz": [float(x) for x in sp.nu],
                "psd_uv2_per_hz": [float(x) for x in sp.s_bar],
                "n_eff": sp.n_eff,
                "synthesis": cfg.synthesis,
                **_provenance(cfg, seed, 1),
            },
        )
        written.append(path)
    print(f"synth: {sp.nu.size} bins, n_eff={sp.n_eff}, wrote {', '.join(written)}")
    return 0


def _load_spectrum_file(path, n_eff: int) -> AveragedSpectrum:
    if str(path).endswith(".json"):
        doc = read_json(path)
        for key in ("nu_hz", "psd_uv2_per_hz", "n_eff"):
            if key not in doc:
                raise ConfigError(f"{path}: missing spectrum key '{key}'")
        return AveragedSpectrum(
            nu=np.asarray(doc["nu_hz"], dtype=float),
            s_bar=np.asarray(doc["psd_uv2_per_hz"], dtype=float),
            n_eff=int(doc["n_eff"]),
        )
    return read_spectrum_csv(path, n_eff=n_eff)


def cmd_fit(args) -> int:
    cfg = load_config(args.config)
    acq = cfg.require_acquisition()
    sp = _load_spectrum_file(args.spectrum, acq.n_eff)
    result = mle_fit(sp, (acq.fit_lo, acq.fit_hi))
    v = result.v_hat
    payload = {
        "s_ph_uv2_per_hz": v.s_ph,
        "nu_l_hz": v.nu_l,
        "s_at_uv2_per_hz": v.s_at,
        "delta_nu_hz": v.delta_nu,
        "chi2": result.chi2,
        "converged": result.converged,
        "n_iter": result.n_iter,
        "window_hz": list(result.window),
        **_provenance(cfg, _seed(args, cfg), 1),
    }
    path = _outpath(args, cfg, "fit.json")
    write_json(path, payload)
    print(f"{'parameter':<12}{'value':>16}")
    print(f"{'s_ph':<12}{v.s_ph:>16.6g}")
    print(f"{'nu_l':<12}{v.nu_l:>16.6g}")
    print(f"{'s_at':<12}{v.s_at:>16.6g}")
    print(f"{'delta_nu':<12}{v.delta_nu:>16.6g}")
    print(f"chi2={result.chi2:.6g} converged={result.converged} wrote {path}")
    return 0


def cmd_validate(args) -> int:
    cfg = load_config(args.config)
    acq = cfg.require_acquisition()
    if cfg.n_trials < 2:
        raise ConfigError("config.monte_carlo.n_trials: validate needs at least 2")
    seed = _seed(args, cfg)
    threads = _threads(args, cfg)
    report = run_validation(
        cfg.spectral_params(), acq, cfg.n_trials, seed, threads=threads, synthesis=cfg.synthesis
    )
    payload = {
        "gamma_exp": matrix_to_rows(report.gamma_exp),
        "gamma_th": matrix_to_rows(report.gamma_th),
        "sigma_th": matrix_to_rows(report.sigma_th),
        "deviation": matrix_to_rows(report.deviation),
        "max_deviation": report.max_deviation,
        "mean_fit": [float(x) for x in report.mean_fit],
        "k2_diag": [float(x) for x in report.k2_diag],
        "k2_stderr": [float(x) for x in report.k2_stderr],
        "n_trials": report.n_trials,
        "n_failures": report.n_failures,
        "synthesis": report.synthesis,
        "n_eff": report.n_eff,
        "window_hz": list(report.window),
        **_provenance(cfg, seed, threads),
    }
    path = _outpath(args, cfg, "validate.json")
    write_json(path, payload)
    print(
        f"validate: {report.n_trials} trials ({report.n_failures} failed), "
        f"max normalized deviation {report.max_deviation:.3g}, wrote {path}"
    )
    return 0


def cmd_crb(args) -> int:
    cfg = load_config(args.config)
    acq = cfg.require_acquisition()
    result = fisher_integral(
        cfg.spectral_params(), (acq.fit_lo, acq.fit_hi), acq.coarse_spacing, acq.n_eff
    )
    if result.gamma_th is None:
        raise NumericalError("information matrix is singular for this model")
    sigma = wishart_std(result.gamma_th, cfg.n_trials)
    payload = {
        "info": matrix_to_rows(result.info),
        "gamma_th": matrix_to_rows(result.gamma_th),
        "sigma_th": matrix_to_rows(sigma),
        "sigma_n_samples": cfg.n_trials,
        "n_eff": result.n_eff,
        "nu_t_hz": result.nu_t,
        "window_hz": list(result.window),
        "method": result.method,
        **_provenance(cfg, _seed(args, cfg), 1),
    }
    path = _outpath(args, cfg, "crb.json")
    write_json(path, payload)
    diag = np.diag(result.gamma_th)
    print(
        "crb diagonal: "
        + " ".join(f"gamma{j+1}{j+1}={diag[j]:.6g}" for j in range(4))
        + f", wrote {path}"
    )
    return 0


def cmd_scan(args) -> int:
    cfg = load_config(args.config)
    acq = cfg.require_acquisition()
    spec = cfg.require_scan()
    if cfg.instrument is None:
        raise ConfigError(
            "config.model: scan requires 'conditions' with an instrument, "
            "not direct spectral parameters"
        )
    threads = _threads(args, cfg)
    sg = scan_grid(spec.n_values, spec.p_values, cfg.instrument, acq, spec.xi2, threads=threads)
    formats = _formats(args, cfg)
    written = []
    if "csv" in formats:
        path = _outpath(args, cfg, "scan.csv")
        write_scan_csv(path, sg)
        written.append(path)
    optima = {}
    for index in (1, 2, 3, 4):
        report = find_optimum(sg, index)
        optima[f"gamma{index}{index}"] = {
            "param_index": report.param_index,
            "n_opt_per_cm3": report.n_opt,
            "p_opt_w": report.p_opt,
            "gamma_min": report.gamma_min,
            "interior": report.interior,
        }
    path = _outpath(args, cfg, "optima.json")
    write_json(path, {"optima": optima, "xi2": sg.xi2, **_provenance(cfg, _seed(args, cfg), threads)})
    written.append(path)
    for name, o in optima.items():
        print(
            f"{name}: min={o['gamma_min']:.6g} at n={o['n_opt_per_cm3']:.4g} cm^-3, "
            f"P={o['p_opt_w']*1e3:.4g} mW, interior={o['interior']}"
        )
    print(f"scan: wrote {', '.join(written)}")
    return 0


def cmd_kstats(args) -> int:
    try:
        x = np.loadtxt(args.sample, ndmin=1)
    except (ValueError, TypeError) as exc:
        raise ConfigError(f"{args.sample}: could not parse sample values ({exc})") from exc
    if x.ndim != 1:
        raise ConfigError(f"{args.sample}: expected one value per line")
    try:
        payload = {
            "n_samples": int(x.size),
            "k2": k2(x),
            "k4": k4(x),
            "var_k2": var_k2(x),
            "version": __version__,
        }
    except ValueError as exc:
        raise ConfigError(str(exc)) from exc
    out_dir = args.out if args.out is not None else "."
    os.makedirs(out_dir, exist_ok=True)
    path = os.path.join(out_dir, "kstats.json")
    write_json(path, payload)
    print(
        f"kstats: n={payload['n_samples']} k2={payload['k2']:.9g} "
        f"k4={payload['k4']:.9g} var_k2={payload['var_k2']:.9g}, wrote {path}"
    )
    return 0


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="snspec",
        description="Sensitivity analysis for noise power spectra: synthesis, "
        "fitting, covariance bounds, and (n, P) sensitivity scans.",
    )
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    sub = parser.add_subparsers(dest="command", required=True)

    def common(p, config_required=True):
        p.add_argument("--config", required=config_required, help="JSON run configuration")
        p.add_argument("--seed", type=int, default=None, help="override monte_carlo.master_seed")
        p.add_argument("--threads", type=int, default=None, help="override monte_carlo.threads")
        p.add_argument("--out", default=None, help="override output.directory")
        p.add_argument(
            "--format", choices=["csv", "json"], default=None, help="restrict output format"
        )

    p = sub.add_parser("synth", help="write one synthetic averaged spectrum")
    common(p)
    p.set_defaults(func=cmd_synth)

    p = sub.add_parser("fit", help="fit a spectrum file")
    p.add_argument("spectrum", help="spectrum CSV or JSON (from synth)")
    common(p)
    p.set_defaults(func=cmd_fit)

    p = sub.add_parser("validate", help="Monte Carlo covariance vs theory")
    common(p)
    p.set_defaults(func=cmd_validate)

    p = sub.add_parser("crb", help="covariance bound for the configured model")
    common(p)
    p.set_defaults(func=cmd_crb)

    p = sub.add_parser("scan", help="map the bound over the (n, P) plane")
    common(p)
    p.set_defaults(func=cmd_scan)

    p = sub.add_parser("kstats", help="cumulant statistics of a sample file")
    p.add_argument("sample", help="text file, one value per line")
    p.add_argument("--out", default=None, help="output directory")
    p.set_defaults(func=cmd_kstats)

    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return args.func(args)
    except ConfigError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    except OSError as exc:
        print(f"i/o error: {exc}", file=sys.stderr)
        return 3
    except NumericalError as exc:
        print(f"numerical failure: {exc}", file=sys.stderr)
        return 4


if __name__ == "__main__":
    raise SystemExit(main())
