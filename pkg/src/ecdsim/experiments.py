"""Batch harness: sweep comparisons, drive scans, robustness and dissipation
studies, with CSV output and JSON metadata sidecars.

Every row carries a status column; failed rows are recorded, never dropped.
Random draws are keyed by (master seed, row indices) so results are
bit-identical for any worker count.
"""
from __future__ import annotations

import csv
import dataclasses
import json
import os
import subprocess
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field

import numpy as np

from . import __version__
from .controls import ECDConfig, PerturbationSample, build_control_signals
from .model import TWO_PI, SystemParams, dispersive_estimates, minimal_gap
from .propagate import (
    NoiseRates,
    fidelity_mixed,
    infidelity,
    propagate_lindblad,
    propagate_unitary,
    target_state,
)
from .spectral import build_cd_profile
from .sweeps import SWEEP_KINDS, SweepSpec


def default_tf_grid(t_min=10e-9, t_max=10e-6, per_decade=40):
    """Logarithmic duration grid, per_decade points per decade."""
    n = int(round(np.log10(t_max / t_min) * per_decade)) + 1
    return np.geomspace(t_min, t_max, n)


def _git_describe():
    try:
        out = subprocess.run(
            ["git", "describe", "--always", "--dirty"],
            capture_output=True, text=True, timeout=5,
            cwd=os.path.dirname(os.path.abspath(__file__)),
        )
        return out.stdout.strip() or None
    except OSError:
        return None


def _metadata(params, extra):
    meta = {
        "version": __version__,
        "git": _git_describe(),
        "params": dataclasses.asdict(params),
        "derived": {
            "delta_g": params.delta_g,
            "f0": params.f0,
            "g0_rad_s": params.g0,
        },
    }
    meta.update(extra)
    return meta


@dataclass
class ScanResult:
    rows: list = field(default_factory=list)
    metadata: dict = field(default_factory=dict)

    @property
    def columns(self):
        return list(self.rows[0].keys()) if self.rows else []

    def ok_rows(self):
        return [r for r in self.rows if r.get("status") == "ok"]

    def write(self, path_base):
        """Write <base>.csv and <base>.meta.json."""
        csv_path = f"{path_base}.csv"
        with open(csv_path, "w", newline="") as fh:
            writer = csv.writer(fh)
            writer.writerow(self.columns)
            for row in self.rows:
                writer.writerow([_fmt(row[c]) for c in self.columns])
        with open(f"{path_base}.meta.json", "w") as fh:
            json.dump(self.metadata, fh, indent=2, default=str)
        return csv_path


def _fmt(value):
    if isinstance(value, float):
        return f"{value:.12e}"
    return value


def _parallel_map(fn, payloads, workers):
    if workers and workers > 1:
        with ProcessPoolExecutor(max_workers=workers) as pool:
            return list(pool.map(fn, payloads, chunksize=1))
    return [fn(p) for p in payloads]


# ---------------------------------------------------------------- sweep scan

def _sweep_row(payload):
    t_f, kind, params, atol = payload
    row = {"t_f_s": t_f, "sweep": kind, "infidelity": float("nan"),
           "status": "ok"}
    try:
        spec = SweepSpec.for_params(kind, params)
        psi = propagate_unitary(spec, params, t_f, atol=atol)
        row["infidelity"] = infidelity(psi, spec, params)
    except Exception as exc:
        row["status"] = f"error: {exc}"
    return row


def run_sweep_comparison(t_f_list, kinds=SWEEP_KINDS, params=None, *,
                         workers=1, atol=1e-8):
    """One unassisted propagation per (duration, sweep kind)."""
    params = params or SystemParams()
    t_f_list = sorted(float(t) for t in t_f_list)
    payloads = [(t_f, kind, params, atol)
                for kind in kinds for t_f in t_f_list]
    rows = _parallel_map(_sweep_row, payloads, workers)
    meta = _metadata(params, {
        "experiment": "sweep-compare", "kinds": list(kinds),
        "t_f_s": t_f_list, "atol": atol,
    })
    return ScanResult(rows=rows, metadata=meta)


# ------------------------------------------------------------------ eCD scan

def _ecd_row(payload):
    t_f, k_ratio, fixed_omega, ceiling, profile, params, atol = payload
    row = {"t_f_s": t_f, "sweep": profile.spec.kind,
           "k_ratio": k_ratio if fixed_omega is None else float("nan"),
           "mode": "ceiling" if fixed_omega is None else "fixed",
           "omega_rad_s": float("nan"), "peak_amp_over_g": float("nan"),
           "ceiling_binding": "", "infidelity": float("nan"), "status": "ok"}
    try:
        cfg = ECDConfig(k_ratio=k_ratio or 1.0, omega_ceiling=ceiling,
                        fixed_omega=fixed_omega)
        signals = build_control_signals(cfg, profile, t_f, params)
        row["omega_rad_s"] = signals.omega
        row["peak_amp_over_g"] = signals.peak_amplitude / params.g
        if fixed_omega is None:
            formula = (cfg.k_ratio**2 * params.g**2 * t_f
                       / (2.0 * profile.h23_max))
            row["ceiling_binding"] = "yes" if formula >= ceiling else "no"
        spec = profile.spec
        psi = propagate_unitary(spec, params, t_f, control=signals, atol=atol)
        row["infidelity"] = infidelity(psi, spec, params)
    except Exception as exc:
        row["status"] = f"error: {exc}"
    return row


def run_ecd_scan(t_f_list, sweep_kind="tan", k_list=(1.0, 2.0, 3.0),
                 params=None, *, omega_ceiling=TWO_PI * 7e9,
                 fixed_omegas_hz=(4e9, 5e9, 6e9, 8e9), workers=1,
                 atol=1e-7, n_grid=2001):
    """Oscillating-drive scan: ceiling-limited rows per (t_f, k) plus
    fixed-frequency reference rows."""
    params = params or SystemParams()
    spec = SweepSpec.for_params(sweep_kind, params)
    profile = build_cd_profile(spec, params, n_grid)
    t_f_list = sorted(float(t) for t in t_f_list)
    payloads = [(t_f, k, None, omega_ceiling, profile, params, atol)
                for k in k_list for t_f in t_f_list]
    payloads += [(t_f, None, TWO_PI * f, omega_ceiling, profile, params, atol)
                 for f in fixed_omegas_hz for t_f in t_f_list]
    rows = _parallel_map(_ecd_row, payloads, workers)
    meta = _metadata(params, {
        "experiment": "ecd-scan", "sweep": sweep_kind,
        "k_list": list(k_list), "omega_ceiling_rad_s": omega_ceiling,
        "fixed_omegas_hz": list(fixed_omegas_hz), "t_f_s": t_f_list,
        "atol": atol, "n_grid": n_grid,
    })
    return ScanResult(rows=rows, metadata=meta)


# --------------------------------------------------------------- robustness

def _robustness_sample(payload):
    (t_f, profile, params, omega, seed, i_tf, i_eps, eps_max, atol) = payload
    spec = profile.spec
    if i_eps < 0:
        pert = PerturbationSample()
    else:
        sample_seed = int(np.random.SeedSequence(
            entropy=seed, spawn_key=(i_tf, i_eps)).generate_state(1)[0])
        pert = PerturbationSample.draw(sample_seed, eps_max)
    cfg = ECDConfig(fixed_omega=omega)
    signals = build_control_signals(cfg, profile, t_f, params,
                                    perturbation=pert)
    psi = propagate_unitary(spec, params, t_f, control=signals, atol=atol)
    return infidelity(psi, spec, params)


def run_robustness(t_f_list, n_eps=200, eps_max=0.05, seed=0, params=None, *,
                   sweep_kind="tan", omega=TWO_PI * 7e9, workers=1,
                   atol=1e-7, n_grid=2001):
    """Monte Carlo over static drive biases at fixed drive frequency.

    Per duration: one unperturbed run plus n_eps perturbed runs with
    independent uniform biases in [-eps_max, eps_max]^3.
    """
    params = params or SystemParams()
    spec = SweepSpec.for_params(sweep_kind, params)
    profile = build_cd_profile(spec, params, n_grid)
    t_f_list = sorted(float(t) for t in t_f_list)

    rows = []
    for i_tf, t_f in enumerate(t_f_list):
        payloads = [(t_f, profile, params, omega, seed, i_tf, i_eps, eps_max,
                     atol) for i_eps in range(-1, n_eps)]
        try:
            values = _parallel_map(_robustness_sample, payloads, workers)
        except Exception as exc:
            rows.append({"t_f_s": t_f, "status": f"error: {exc}"})
            continue
        unperturbed, samples = values[0], np.array(values[1:])
        floor = np.maximum(samples, 1e-300)
        rows.append({
            "t_f_s": t_f,
            "infidelity_unperturbed": unperturbed,
            "infidelity_mean": float(samples.mean()),
            "infidelity_std": float(samples.std()),
            "infidelity_min": float(samples.min()),
            "infidelity_max": float(samples.max()),
            "log10_infidelity_mean": float(np.log10(floor).mean()),
            "log10_infidelity_std": float(np.log10(floor).std()),
            "n_eps": n_eps,
            "seed": seed,
            "status": "ok",
        })
    meta = _metadata(params, {
        "experiment": "robustness", "sweep": sweep_kind,
        "omega_rad_s": omega, "n_eps": n_eps, "eps_max": eps_max,
        "seed": seed, "t_f_s": t_f_list, "atol": atol,
    })
    return ScanResult(rows=rows, metadata=meta)


# --------------------------------------------------------------- dissipation

def _dissipation_point(payload):
    kappa, gamma, t_f, profile, params, omega, n_fock, atol = payload
    row = {"kappa_rad_s": kappa, "gamma_rad_s": gamma, "t_f_s": t_f,
           "fidelity": float("nan"), "status": "ok"}
    try:
        spec = profile.spec
        cfg = ECDConfig(fixed_omega=omega)
        signals = build_control_signals(cfg, profile, t_f, params)
        rates = NoiseRates.from_gamma(kappa=kappa, gamma=gamma)
        rho = propagate_lindblad(spec, params, t_f, signals, rates,
                                 n_fock=n_fock)
        row["fidelity"] = fidelity_mixed(rho, target_state(spec, params))
    except Exception as exc:
        row["status"] = f"error: {exc}"
    return row


def run_dissipation_grid(kappa_list, gamma_list, t_f=100e-9, params=None, *,
                         sweep_kind="tan", omega=TWO_PI * 7e9, n_fock=3,
                         workers=1, atol=1e-7, n_grid=2001):
    """One Lindblad propagation per (kappa, gamma) grid point, with the
    default relation gamma_phi = gamma/2."""
    params = params or SystemParams()
    spec = SweepSpec.for_params(sweep_kind, params)
    profile = build_cd_profile(spec, params, n_grid)
    payloads = [(float(k), float(g), t_f, profile, params, omega, n_fock,
                 atol) for k in kappa_list for g in gamma_list]
    rows = _parallel_map(_dissipation_point, payloads, workers)
    meta = _metadata(params, {
        "experiment": "dissipation", "sweep": sweep_kind,
        "omega_rad_s": omega, "t_f_s": t_f, "n_fock": n_fock,
        "kappa_rad_s": [float(k) for k in kappa_list],
        "gamma_rad_s": [float(g) for g in gamma_list],
    })
    return ScanResult(rows=rows, metadata=meta)


# ---------------------------------------------------------------- gap report

def run_gap_report(params=None):
    """Numerical anticrossing width against both perturbative estimates."""
    params = params or SystemParams()
    rwa, renorm = dispersive_estimates(params)
    g0 = minimal_gap(params)
    return {
        "two_g0_rad_s": 2.0 * g0,
        "two_g0_mhz": 2.0 * g0 / TWO_PI / 1e6,
        "rwa_coupling_rad_s": rwa,
        "rwa_coupling_mhz": rwa / TWO_PI / 1e6,
        "renormalized_coupling_rad_s": renorm,
        "renormalized_coupling_mhz": renorm / TWO_PI / 1e6,
        "renorm_over_rwa": renorm / rwa,
        "gap_enlarged_by_counter_rotating": abs(renorm) > abs(rwa),
    }
