"""Pure-numpy stepping kernel, used when the compiled extension is absent."""
import numpy as np


def apply_expm_sequence(hmats, dts, psi):
    """Apply exp(-i*hmats[j]*dts[j]) to psi for each step j, in place.

    hmats: (n, d, d) complex Hermitian stack; dts: (n,); psi: (d,) complex.
    """
    n = hmats.shape[0]
    if dts.shape[0] != n or psi.shape[0] != hmats.shape[1]:
        raise ValueError("inconsistent kernel input shapes")
    if n == 0:
        return
    w, v = np.linalg.eigh(hmats)
    phases = np.exp(-1j * w * dts[:, None])
    for j in range(n):
        vj = v[j]
        psi[:] = vj @ (phases[j] * (vj.conj().T @ psi))
