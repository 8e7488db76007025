"""Time evolution and figures of merit.

Unitary propagation of the four-level model uses a fourth-order
commutator-free Magnus scheme: per step, two exact matrix exponentials built
from the generator at the two Gauss-Legendre nodes (compiled kernel when
available), which preserves the norm exactly per step. Step counts are
doubled until the final state is converged to a requested tolerance, so
step-halving consistency holds by construction.

Open-system propagation solves the Lindblad master equation on the
4*n_fock-dimensional Jaynes-Cummings model with a fixed-step classic
Runge-Kutta scheme.
"""
from __future__ import annotations

import functools
import math
from dataclasses import dataclass

import numpy as np

from . import _kernels
from .controls import ControlSignals, map_controls_to_couplings
from .model import (
    C1,
    C2,
    FLIP_FLOP,
    TWO_PI,
    SystemParams,
    _jc_operators,
    assemble_h4,
    embed_pure_state,
)
from .spectral import cd_fields, eigen_frames
from .sweeps import SweepSpec, eval_sweep

CHUNK = 65536
TRACK_GRID = 2001


class PropagationError(RuntimeError):
    """Integration failed to converge or violated a hard invariant."""


@dataclass
class PureState:
    amplitudes: np.ndarray
    basis: str = "two-excitation"  # or "jc"

    @property
    def norm(self):
        return float(np.linalg.norm(self.amplitudes))


@dataclass
class DensityMatrix:
    matrix: np.ndarray
    n_fock: int = 3

    @property
    def trace(self):
        return float(np.trace(self.matrix).real)

    def validate(self, trace_tol=1e-8, herm_tol=1e-10, psd_tol=1e-6):
        m = self.matrix
        if abs(np.trace(m).real - 1.0) > trace_tol:
            raise PropagationError(f"trace drift {np.trace(m).real - 1.0:.2e}")
        if np.max(np.abs(m - m.conj().T)) > herm_tol:
            raise PropagationError("density matrix lost Hermiticity")
        if np.min(np.linalg.eigvalsh(0.5 * (m + m.conj().T))) < -psd_tol:
            raise PropagationError("density matrix lost positivity")


@dataclass(frozen=True)
class NoiseRates:
    """Lindblad rates in rad/s: resonator damping, qubit relaxation, qubit
    dephasing (per qubit, equal for both)."""

    kappa: float = 0.0
    gamma_r: float = 0.0
    gamma_phi: float = 0.0

    def __post_init__(self):
        if min(self.kappa, self.gamma_r, self.gamma_phi) < 0:
            raise ValueError("rates must be non-negative")

    @classmethod
    def from_gamma(cls, kappa, gamma):
        """Default relation gamma_phi = gamma_r / 2."""
        return cls(kappa=kappa, gamma_r=gamma, gamma_phi=gamma / 2.0)


@functools.lru_cache(maxsize=64)
def _tracked_endpoints(spec: SweepSpec, params: SystemParams, n_grid=TRACK_GRID):
    """(initial, target) eigenvectors of the adiabatically tracked branch.

    The branch is identified at s=0 as the eigenstate dominated by |1 dn up>
    (the first excited state for f0 > 0) and followed by continuity to s=1,
    where it is the symmetric Bell combination. Energy sorting at s=1 would
    be ambiguous between the two near-degenerate middle levels.
    """
    frames = eigen_frames(spec, params, n_grid)
    branch = frames.branch_index_for_basis_state(2)
    return frames.vectors[0, :, branch].copy(), frames.vectors[-1, :, branch].copy()


def initial_state(spec: SweepSpec, params: SystemParams) -> PureState:
    vec, _ = _tracked_endpoints(spec, params)
    return PureState(amplitudes=vec.astype(complex))


def target_state(spec: SweepSpec, params: SystemParams) -> PureState:
    _, vec = _tracked_endpoints(spec, params)
    return PureState(amplitudes=vec.astype(complex))


def _assemble_generator(spec, params, t_f, control, s_mid):
    """Dimensionless step generator G(s) with i dpsi/ds = G psi, batched."""
    tau = params.g * t_f
    h = tau * assemble_h4(eval_sweep(spec, s_mid), params)
    if control is None:
        return h.astype(complex)
    if control == "cd":
        return h + cd_fields(spec, params, s_mid)
    if control == "partial-cd":
        h23 = cd_fields(spec, params, s_mid)[:, 1, 2].imag
        return h + 0.5 * h23[:, None, None] * FLIP_FLOP[None]
    if isinstance(control, ControlSignals):
        c1, c2 = control.evaluate(s_mid * t_f)
        extra = t_f * (c1[:, None, None] * C1[None] + c2[:, None, None] * C2[None])
        return (h + extra).astype(complex)
    raise ValueError(f"unknown control {control!r}")


# fourth-order commutator-free Magnus coefficients (two Gauss nodes)
_CF4_NODE = np.sqrt(3.0) / 6.0
_CF4_A1 = (3.0 - 2.0 * np.sqrt(3.0)) / 12.0
_CF4_A2 = (3.0 + 2.0 * np.sqrt(3.0)) / 12.0


def _run_unitary(spec, params, t_f, control, psi0, n_steps):
    """Commutator-free 4th-order Magnus stepping: per step, two exponentials
    built from the generator at the two Gauss-Legendre nodes."""
    psi = psi0.astype(complex).copy()
    ds = 1.0 / n_steps
    for start in range(0, n_steps, CHUNK):
        stop = min(start + CHUNK, n_steps)
        centers = (np.arange(start, stop) + 0.5) * ds
        s_nodes = np.concatenate([centers - _CF4_NODE * ds,
                                  centers + _CF4_NODE * ds])
        gen = _assemble_generator(spec, params, t_f, control, s_nodes)
        g1, g2 = gen[: stop - start], gen[stop - start:]
        seq = np.empty((2 * (stop - start), 4, 4), dtype=complex)
        seq[0::2] = _CF4_A2 * g1 + _CF4_A1 * g2  # applied first
        seq[1::2] = _CF4_A1 * g1 + _CF4_A2 * g2
        _kernels.apply_expm_sequence(
            np.ascontiguousarray(seq), np.full(2 * (stop - start), ds), psi)
    return psi


def _base_steps(spec, params, t_f, control, steps_per_cycle):
    tau = params.g * t_f
    base = max(4096, int(2.0 * tau))
    if isinstance(control, ControlSignals):
        w_eff = control.omega * (1.0 + abs(control.perturbation.eps_omega))
        base = max(base, int(math.ceil(steps_per_cycle * w_eff * t_f / TWO_PI)))
    return base


def propagate_unitary(spec: SweepSpec, params: SystemParams, t_f: float,
                      control=None, psi0: PureState | None = None, *,
                      n_steps: int | None = None, atol: float = 1e-8,
                      steps_per_cycle: int = 32,
                      max_doublings: int = 10) -> PureState:
    """Solve the Schroedinger dynamics over the sweep and return psi(t_f).

    control: None, "cd" (full counterdiabatic field), "partial-cd" (flip-flop
    channel only), or a ControlSignals oscillating drive. With n_steps given,
    a single fixed-step pass is made; otherwise the step count is doubled
    until two consecutive final states agree within atol (2-norm).
    """
    if t_f <= 0:
        raise ValueError("t_f must be positive")
    psi_init = (initial_state(spec, params) if psi0 is None else psi0).amplitudes
    if abs(np.linalg.norm(psi_init) - 1.0) > 1e-9:
        raise ValueError("initial state must be normalized")

    if n_steps is not None:
        psi = _run_unitary(spec, params, t_f, control, psi_init, n_steps)
    else:
        n = _base_steps(spec, params, t_f, control, steps_per_cycle)
        psi = _run_unitary(spec, params, t_f, control, psi_init, n)
        for _ in range(max_doublings):
            n *= 2
            nxt = _run_unitary(spec, params, t_f, control, psi_init, n)
            err = float(np.linalg.norm(nxt - psi))
            psi = nxt
            if err < atol:
                break
        else:
            raise PropagationError(
                f"no convergence to {atol:.0e} within {n} steps"
            )

    drift = abs(np.linalg.norm(psi) - 1.0)
    if drift > 1e-9:
        raise PropagationError(f"norm drift {drift:.2e} exceeds 1e-9")
    return PureState(amplitudes=psi)


def infidelity(psi_f: PureState, spec: SweepSpec, params: SystemParams) -> float:
    """1 - |<psi(t_f)|e(t_f)>|^2 against the tracked final eigenstate."""
    amps = psi_f.amplitudes
    if abs(np.linalg.norm(amps) - 1.0) > 1e-6:
        raise ValueError("state is not normalized")
    tgt = target_state(spec, params).amplitudes
    return float(np.clip(1.0 - abs(np.vdot(amps, tgt)) ** 2, 0.0, 1.0))


def _lindblad_ops(rates: NoiseRates, n_fock):
    ops = _jc_operators(n_fock)
    pairs = [
        (rates.kappa, ops["a"]),
        (rates.gamma_r, ops["sm1"]),
        (rates.gamma_r, ops["sm2"]),
        (rates.gamma_phi, ops["sz1"]),
        (rates.gamma_phi, ops["sz2"]),
    ]
    return [
        (r, op, op.conj().T @ op) for r, op in pairs if r > 0
    ]


def _lindblad_step_count(spec, params, t_f, control, steps_per_cycle):
    # resolve dt from the largest Hamiltonian scale; drive period if present
    scale = (abs(params.delta_1_init) / 2 + abs(params.delta_2_init) / 2
             + 6.0 * params.g)
    n = max(2000, int(math.ceil(t_f * scale / 0.05)))
    if isinstance(control, ControlSignals):
        w_eff = control.omega * (1.0 + abs(control.perturbation.eps_omega))
        scale = max(scale, 3.0 * control.peak_amplitude)
        n = max(n, int(math.ceil(steps_per_cycle * w_eff * t_f / TWO_PI)),
                int(math.ceil(t_f * scale / 0.05)))
    return n


def propagate_lindblad(spec: SweepSpec, params: SystemParams, t_f: float,
                       control, rates: NoiseRates,
                       rho0: DensityMatrix | None = None, n_fock: int = 3, *,
                       steps_per_cycle: int = 32,
                       n_steps: int | None = None) -> DensityMatrix:
    """Propagate the 4*n_fock open system over the sweep (fixed-step RK4).

    The Hamiltonian is the Jaynes-Cummings model with swept detunings and,
    when control is a ControlSignals, oscillating couplings g1/g2.
    """
    if t_f <= 0:
        raise ValueError("t_f must be positive")
    if n_fock < 3:
        raise ValueError("n_fock must be >= 3 for the two-excitation manifold")
    dim = 4 * n_fock
    if rho0 is None:
        psi = embed_pure_state(initial_state(spec, params).amplitudes, n_fock)
        rho = np.outer(psi, psi.conj())
    else:
        rho = rho0.matrix.astype(complex).copy()
        if rho.shape != (dim, dim):
            raise ValueError("rho0 dimension mismatch")
        DensityMatrix(rho, n_fock).validate(trace_tol=1e-6)

    n = n_steps or _lindblad_step_count(spec, params, t_f, control,
                                        steps_per_cycle)
    dt = t_f / n
    diss = _lindblad_ops(rates, n_fock)
    ops = _jc_operators(n_fock)
    ad = ops["a"].T
    coupl1 = ops["sp1"] @ ops["a"] + ops["sm1"] @ ad
    coupl2 = ops["sp2"] @ ops["a"] + ops["sm2"] @ ad

    def hamiltonians(times):
        s = times / t_f
        f = eval_sweep(spec, s)
        d1 = params.g * (params.delta_g + f)
        d2 = params.g * (params.delta_g - f)
        if isinstance(control, ControlSignals):
            g1, g2 = map_controls_to_couplings(control, params, times)
        elif control is None:
            g1 = np.full_like(s, params.g)
            g2 = np.full_like(s, params.g)
        else:
            raise ValueError("lindblad control must be None or ControlSignals")
        return (0.5 * d1[:, None, None] * ops["sz1"][None]
                + 0.5 * d2[:, None, None] * ops["sz2"][None]
                + g1[:, None, None] * coupl1[None]
                + g2[:, None, None] * coupl2[None])

    def rhs(h, r):
        out = -1j * (h @ r - r @ h)
        for rate, op, opop in diss:
            out += rate * (op @ r @ op.conj().T
                           - 0.5 * (opop @ r + r @ opop))
        return out

    chunk = 4096
    for start in range(0, n, chunk):
        stop = min(start + chunk, n)
        # nodes and midpoints for RK4 within this chunk
        times = (start + 0.5 * np.arange(2 * (stop - start) + 1)) * dt
        hs = hamiltonians(times)
        for j in range(stop - start):
            h0, hm, h1 = hs[2 * j], hs[2 * j + 1], hs[2 * j + 2]
            k1 = rhs(h0, rho)
            k2 = rhs(hm, rho + 0.5 * dt * k1)
            k3 = rhs(hm, rho + 0.5 * dt * k2)
            k4 = rhs(h1, rho + dt * k3)
            rho = rho + (dt / 6.0) * (k1 + 2 * k2 + 2 * k3 + k4)

    result = DensityMatrix(matrix=rho, n_fock=n_fock)
    result.validate()
    return result


def fidelity_mixed(rho: DensityMatrix, target: PureState) -> float:
    """<e|rho|e> with a pure target; 4-component targets are embedded into
    the two-excitation block of the open-system space."""
    rho.validate(trace_tol=1e-6)
    vec = target.amplitudes
    if vec.shape[0] == 4 and rho.matrix.shape[0] != 4:
        vec = embed_pure_state(vec, rho.n_fock)
    return float(np.real(vec.conj() @ rho.matrix @ vec))
