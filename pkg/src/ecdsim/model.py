"""System parameters and Hamiltonians for two qubits coupled through a resonator bus.

Basis convention for the two-excitation manifold, fixed across the package:

    index 0 <-> |0, up, up>    (0 photons, both qubits excited)
    index 1 <-> |1, up, dn>
    index 2 <-> |1, dn, up>
    index 3 <-> |2, dn, dn>

so the (1, 2) matrix element (0-based) is always the qubit-qubit flip-flop
channel. All frequencies are stored internally as angular frequencies in
rad/s; division by 2*pi happens only at CLI boundaries.
"""
from __future__ import annotations

import functools
import warnings
from dataclasses import dataclass

import numpy as np

TWO_PI = 2.0 * np.pi
SQ2 = np.sqrt(2.0)

# Constant control-basis matrices of the four-level model. D0 carries the mean
# detuning, D1 the differential (swept) detuning, C1/C2 the two qubit-bus
# coupling patterns.
D0 = np.diag([1.0, 0.0, 0.0, -1.0])
D1 = np.diag([0.0, 1.0, -1.0, 0.0])
C1 = np.array([
    [0.0, 1.0, 0.0, 0.0],
    [1.0, 0.0, 0.0, 0.0],
    [0.0, 0.0, 0.0, SQ2],
    [0.0, 0.0, SQ2, 0.0],
])
C2 = np.array([
    [0.0, 0.0, 1.0, 0.0],
    [0.0, 0.0, 0.0, SQ2],
    [1.0, 0.0, 0.0, 0.0],
    [0.0, SQ2, 0.0, 0.0],
])

# sigma_x^(1) sigma_y^(2) - sigma_y^(1) sigma_x^(2) restricted to the
# two-excitation basis: the flip-flop generator produced by 2i[C2, C1].
FLIP_FLOP = np.zeros((4, 4), dtype=complex)
FLIP_FLOP[1, 2] = 2.0j
FLIP_FLOP[2, 1] = -2.0j


@dataclass(frozen=True)
class ControlBasis:
    """Bundle of the four constant Hermitian control matrices."""

    d0: np.ndarray
    d1: np.ndarray
    c1: np.ndarray
    c2: np.ndarray


CONTROL_BASIS = ControlBasis(d0=D0, d1=D1, c1=C1, c2=C2)


@dataclass(frozen=True)
class SystemParams:
    """Device frequencies and couplings (angular, rad/s).

    Defaults: resonator at 8.2 GHz, qubits starting at 6.01/5.99 GHz, common
    qubit-bus coupling 50 MHz, giving delta_g = -44 and f0 = 0.2.
    """

    omega_r: float = TWO_PI * 8.2e9
    omega_1_init: float = TWO_PI * 6.01e9
    omega_2_init: float = TWO_PI * 5.99e9
    g: float = TWO_PI * 50e6

    def __post_init__(self):
        if self.g <= 0:
            raise ValueError("coupling g must be positive")
        if self.f0 <= 0:
            raise ValueError("qubit 1 must start above qubit 2 (f0 > 0)")
        for delta in (self.delta_1_init, self.delta_2_init):
            if delta == 0 or abs(self.g / delta) >= 0.1:
                warnings.warn(
                    "dispersive regime violated: |g/delta| >= 0.1",
                    stacklevel=2,
                )

    @property
    def delta_1_init(self):
        return self.omega_1_init - self.omega_r

    @property
    def delta_2_init(self):
        return self.omega_2_init - self.omega_r

    @property
    def delta_g(self):
        """Dimensionless mean qubit-resonator detuning (delta1+delta2)/2g."""
        return (self.delta_1_init + self.delta_2_init) / (2.0 * self.g)

    @property
    def f0(self):
        """Dimensionless half initial qubit-qubit detuning (delta1-delta2)/2g."""
        return (self.delta_1_init - self.delta_2_init) / (2.0 * self.g)

    @functools.cached_property
    def g0(self):
        """Half the minimal anticrossing gap (rad/s), from diagonalization."""
        return minimal_gap(self)


def assemble_h4(f_value, params: SystemParams):
    """Four-level Hamiltonian in units of g: delta_g*D0 + f*D1 + C1 + C2.

    f_value may be a scalar (returns (4,4)) or an array of shape (n,)
    (returns (n,4,4)).
    """
    f = np.asarray(f_value, dtype=float)
    base = params.delta_g * D0 + C1 + C2
    if f.ndim == 0:
        return base + float(f) * D1
    return base + np.multiply.outer(f, D1)


@functools.lru_cache(maxsize=8)
def _jc_operators(n_fock):
    """Qubit and field operators on qubit1 x qubit2 x Fock(n_fock).

    Qubit basis per factor: index 0 = |up> (excited), 1 = |dn>.
    """
    eye2 = np.eye(2)
    eye_f = np.eye(n_fock)
    sz = np.diag([1.0, -1.0])
    sp = np.array([[0.0, 1.0], [0.0, 0.0]])
    a = np.diag(np.sqrt(np.arange(1, n_fock, dtype=float)), 1)

    def kron3(x, y, z):
        return np.kron(np.kron(x, y), z)

    ops = {
        "sz1": kron3(sz, eye2, eye_f),
        "sz2": kron3(eye2, sz, eye_f),
        "sp1": kron3(sp, eye2, eye_f),
        "sp2": kron3(eye2, sp, eye_f),
        "a": kron3(eye2, eye2, a),
    }
    ops["sm1"] = ops["sp1"].T
    ops["sm2"] = ops["sp2"].T
    ops["number"] = (
        ops["a"].T @ ops["a"] + ops["sp1"] @ ops["sm1"] + ops["sp2"] @ ops["sm2"]
    )
    return ops


def two_excitation_indices(n_fock):
    """Indices of |0upup>, |1updn>, |1dnup>, |2dndn> in the 4*n_fock space."""
    if n_fock < 3:
        raise ValueError("two-excitation manifold requires n_fock >= 3")

    def idx(q1, q2, n):
        return (q1 * 2 + q2) * n_fock + n

    return [idx(0, 0, 0), idx(0, 1, 1), idx(1, 0, 1), idx(1, 1, 2)]


def assemble_h12(delta_1, delta_2, g_1, g_2, n_fock=3):
    """Jaynes-Cummings Hamiltonian in the frame rotating at the resonator.

    H = sum_k delta_k/2 sz_k + sum_k g_k (sp_k a + sm_k a^dag), all rad/s.
    Conserves the excitation number a^dag a + sum_k sp_k sm_k exactly.
    """
    if n_fock < 1:
        raise ValueError("n_fock must be >= 1")
    ops = _jc_operators(n_fock)
    ad = ops["a"].T
    return (
        0.5 * delta_1 * ops["sz1"]
        + 0.5 * delta_2 * ops["sz2"]
        + g_1 * (ops["sp1"] @ ops["a"] + ops["sm1"] @ ad)
        + g_2 * (ops["sp2"] @ ops["a"] + ops["sm2"] @ ad)
    )


def excitation_number_operator(n_fock=3):
    return _jc_operators(n_fock)["number"]


def embed_pure_state(vec4, n_fock=3):
    """Lift a two-excitation 4-vector into the 4*n_fock product space."""
    vec4 = np.asarray(vec4)
    if vec4.shape != (4,):
        raise ValueError("expected a 4-component state")
    out = np.zeros(4 * n_fock, dtype=complex)
    out[two_excitation_indices(n_fock)] = vec4
    return out


def minimal_gap(params: SystemParams):
    """Half the minimal gap between the two middle levels at f = 0 (rad/s)."""
    evals = np.linalg.eigvalsh(assemble_h4(0.0, params))
    return params.g * 0.5 * (evals[2] - evals[1])


def dispersive_estimates(params: SystemParams):
    """Second-order qubit-qubit coupling estimates at mutual resonance.

    Returns (rwa, renormalized) in rad/s: g^2/delta and g^2(1/delta - 1/Delta)
    with Delta the qubit-plus-resonator frequency sum. The renormalized value
    includes the counter-rotating (Bloch-Siegert) correction.
    """
    omega_q = 0.5 * (params.omega_1_init + params.omega_2_init)
    delta = omega_q - params.omega_r
    big_delta = omega_q + params.omega_r
    if delta == 0 or big_delta == 0:
        raise ValueError("resonant configuration: perturbation theory invalid")
    rwa = params.g**2 / delta
    renorm = params.g**2 * (1.0 / delta - 1.0 / big_delta)
    return rwa, renorm
