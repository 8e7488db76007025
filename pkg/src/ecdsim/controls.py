"""Oscillating-control synthesis emulating the partial counterdiabatic field.

The flip-flop generator needed by the partial CD correction is produced
effectively by oscillating the two qubit-bus couplings in quadrature:

    H_e(t) = sqrt(2 w h23(t)) [sin(w t) C1 + cos(w t) C2],

matched to the partial CD field through the leading Magnus terms over one
oscillation period. The drive frequency w is either fixed, or resolved from
the peak-amplitude constraint sqrt(w)*A_max = k*g capped by an RWA ceiling.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, replace

import numpy as np
from scipy.integrate import simpson
from scipy.linalg import expm

from .model import C1, C2, FLIP_FLOP, TWO_PI, SystemParams
from .spectral import CDProfile


@dataclass(frozen=True)
class PerturbationSample:
    """Static relative biases on the drive frequency, phase and amplitude."""

    eps_omega: float = 0.0
    eps_phi: float = 0.0
    eps_amp: float = 0.0
    seed: int | None = None  # provenance of the draw, for reproducibility

    @classmethod
    def draw(cls, seed, eps_max=0.05):
        rng = np.random.default_rng(seed)
        eo, ep, ea = rng.uniform(-eps_max, eps_max, size=3)
        try:
            seed_tag = int(seed)
        except (TypeError, ValueError):
            seed_tag = None
        return cls(eps_omega=eo, eps_phi=ep, eps_amp=ea, seed=seed_tag)


ZERO_PERTURBATION = PerturbationSample()


@dataclass(frozen=True)
class ECDConfig:
    """Amplitude ratio and frequency policy for the oscillating drive.

    In ceiling-limited mode (fixed_omega is None) the drive frequency is the
    amplitude-constraint value capped at omega_ceiling; in fixed mode it is
    fixed_omega regardless of the resulting amplitude.
    """

    k_ratio: float = 1.0
    omega_ceiling: float = TWO_PI * 7e9
    fixed_omega: float | None = None

    def __post_init__(self):
        if self.k_ratio <= 0 or self.omega_ceiling <= 0:
            raise ValueError("k_ratio and omega_ceiling must be positive")
        if self.fixed_omega is not None and self.fixed_omega <= 0:
            raise ValueError("fixed_omega must be positive")

    @property
    def mode(self):
        return "fixed-omega" if self.fixed_omega is not None else "ceiling-limited"


def resolve_omega(cfg: ECDConfig, profile: CDProfile, t_f: float,
                  params: SystemParams):
    """Drive angular frequency for a given duration (rad/s).

    The amplitude constraint gives w = k^2 g^2 / (2 max_t H_CD^(2,3)(t));
    since the stored profile is t_f * H_CD, this is k^2 g^2 t_f / (2 max h23)
    and grows linearly with t_f until the ceiling binds.
    """
    if t_f <= 0:
        raise ValueError("t_f must be positive")
    if cfg.fixed_omega is not None:
        return cfg.fixed_omega
    h23_max = profile.h23_max
    if h23_max <= 0:
        raise ValueError("profile h23 maximum must be positive")
    formula = cfg.k_ratio**2 * params.g**2 * t_f / (2.0 * h23_max)
    return min(formula, cfg.omega_ceiling)


@dataclass(frozen=True)
class ControlSignals:
    """Resolved oscillating drive c1(t) C1 + c2(t) C2 for one run.

    Unperturbed form: c1 = sqrt(w) A(t) sin(w t), c2 = sqrt(w) A(t) cos(w t)
    with A(t) = sqrt(2 h23(s)/t_f). Perturbations enter as w -> w(1+eps_w)
    in the oscillation phase, cos(wt) -> cos(wt + pi*eps_phi) (sine too if
    shift_both_phases), and A -> A(1+eps_amp).
    """

    profile: CDProfile
    t_f: float
    omega: float
    perturbation: PerturbationSample = ZERO_PERTURBATION
    shift_both_phases: bool = False

    def with_perturbation(self, perturbation):
        return replace(self, perturbation=perturbation)

    def amplitude(self, t):
        """sqrt(w)*A(t) including the amplitude bias (rad/s)."""
        t = np.asarray(t, dtype=float)
        h23 = np.clip(self.profile.h23(t / self.t_f), 0.0, None)
        amp = np.sqrt(2.0 * self.omega * h23 / self.t_f)
        return amp * (1.0 + self.perturbation.eps_amp)

    def evaluate(self, t):
        """Return (c1(t), c2(t)) in rad/s; t scalar or array."""
        t = np.asarray(t, dtype=float)
        amp = self.amplitude(t)
        w_eff = self.omega * (1.0 + self.perturbation.eps_omega)
        phase = w_eff * t
        shift = math.pi * self.perturbation.eps_phi
        sin_shift = shift if self.shift_both_phases else 0.0
        return amp * np.sin(phase + sin_shift), amp * np.cos(phase + shift)

    @property
    def peak_amplitude(self):
        """max_t sqrt(w)*A(t) without perturbation (rad/s)."""
        return math.sqrt(2.0 * self.omega * self.profile.h23_max / self.t_f)


def build_control_signals(cfg: ECDConfig, profile: CDProfile, t_f: float,
                          params: SystemParams,
                          perturbation: PerturbationSample = ZERO_PERTURBATION,
                          shift_both_phases: bool = False):
    omega = resolve_omega(cfg, profile, t_f, params)
    return ControlSignals(profile=profile, t_f=t_f, omega=omega,
                          perturbation=perturbation,
                          shift_both_phases=shift_both_phases)


def ecd_hamiltonian(t, signals: ControlSignals):
    """Oscillating correction c1(t) C1 + c2(t) C2 (rad/s), Hermitian."""
    c1, c2 = signals.evaluate(t)
    return c1 * C1 + c2 * C2


def map_controls_to_couplings(signals: ControlSignals, params: SystemParams, t):
    """Physical coupling modulations (g1(t), g2(t)) in rad/s.

    C1 carries the qubit-2 coupling pattern and C2 the qubit-1 pattern, so
    g2 = g + c1 and g1 = g + c2.
    """
    c1, c2 = signals.evaluate(t)
    return params.g + c2, params.g + c1


def magnus_match_error(signals: ControlSignals, t: float, n_sub: int = 2048):
    """Mismatch over one drive period between the oscillating-control
    propagator and the target partial-CD propagator.

    U_e is computed by a fine time-ordered product of the drive alone; U_p is
    exp(-i integral H_p dt) with H_p = (h23/2t_f) * flip-flop. Returns the
    spectral norm of the difference. Diagnostic only, not in the control path.
    """
    period = TWO_PI / signals.omega
    ts = np.linspace(t, t + period, n_sub + 1)
    dt = period / n_sub

    # time-ordered product at substep midpoints
    mid = 0.5 * (ts[:-1] + ts[1:])
    c1, c2 = signals.evaluate(mid)
    h = c1[:, None, None] * C1[None] + c2[:, None, None] * C2[None]
    w, v = np.linalg.eigh(h)
    phases = np.exp(-1j * w * dt)
    u_e = np.eye(4, dtype=complex)
    for j in range(n_sub):
        u_e = (v[j] * phases[j][None, :]) @ (v[j].conj().T @ u_e)

    h23 = np.clip(signals.profile.h23(ts / signals.t_f), 0.0, None) / signals.t_f
    integral = simpson(h23, x=ts)
    u_p = expm(-1j * 0.5 * integral * FLIP_FLOP)
    return float(np.linalg.norm(u_e - u_p, 2))
