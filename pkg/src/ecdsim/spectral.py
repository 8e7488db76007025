"""Instantaneous spectral analysis: tracked eigenframes and counterdiabatic fields.

The counterdiabatic (CD) field cancels nonadiabatic transitions exactly,

    H_CD = i sum_{m != n} |m><m| dH/dt |n><n| / (E_n - E_m),

with dH/dt evaluated analytically from the sweep derivative. All CD
quantities here are dimensionless: what is stored and returned is t_f * H_CD,
so the physical field in rad/s is (value / t_f) * 1 and the dimensionless
generator entering the rescaled-time Schroedinger equation is the value
itself.
"""
from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np
from scipy.interpolate import CubicSpline
from scipy.optimize import linear_sum_assignment

from .model import D1, FLIP_FLOP, SystemParams, assemble_h4
from .sweeps import SweepSpec, eval_sweep, eval_sweep_derivative

MIN_GAP = 1e-9  # dimensionless; below this the CD denominator is rejected


class TrackingError(RuntimeError):
    """Eigenvector continuity lost between consecutive grid points."""


class DegenerateSpectrumError(RuntimeError):
    """Instantaneous spectrum too close to degenerate for the CD formula."""


@dataclass
class EigenFrames:
    """Eigendecompositions on an s-grid with continuity-tracked branches.

    energies[j, b] and vectors[j, :, b] follow branch b smoothly in s; the
    first frame is ordered by ascending energy with the dominant component of
    each vector made positive.
    """

    s: np.ndarray
    energies: np.ndarray  # (n, 4), per tracked branch
    vectors: np.ndarray   # (n, 4, 4), columns are tracked branches
    min_overlap: float

    def branch_index_for_basis_state(self, basis_index):
        """Tracked branch whose s=0 eigenvector is dominated by a basis state."""
        return int(np.argmax(np.abs(self.vectors[0, basis_index, :])))


def eigen_frames(spec: SweepSpec, params: SystemParams, n_grid: int) -> EigenFrames:
    """Diagonalize H(s) on a uniform grid and track branches by overlap."""
    if n_grid < 2:
        raise ValueError("n_grid must be >= 2")
    s = np.linspace(0.0, 1.0, n_grid)
    h = assemble_h4(eval_sweep(spec, s), params)
    energies, vectors = np.linalg.eigh(h)

    # first frame: ascending energies, dominant component positive
    v0 = vectors[0]
    signs = np.sign(v0[np.argmax(np.abs(v0), axis=0), np.arange(4)])
    vectors[0] = v0 * signs

    min_overlap = 1.0
    for j in range(1, n_grid):
        overlap = vectors[j - 1].T @ vectors[j]
        row, col = linear_sum_assignment(-np.abs(overlap))
        perm = np.empty(4, dtype=int)
        perm[row] = col
        vectors[j] = vectors[j][:, perm]
        energies[j] = energies[j][perm]
        diag = np.diag(vectors[j - 1].T @ vectors[j])
        vectors[j] *= np.sign(diag)
        worst = float(np.min(np.abs(diag)))
        min_overlap = min(min_overlap, worst)
        if worst < 0.5:
            raise TrackingError(
                f"eigenvector overlap {worst:.3f} < 0.5 at s={s[j]:.4f}; "
                "grid too coarse near a crossing"
            )
    return EigenFrames(s=s, energies=energies, vectors=vectors,
                       min_overlap=min_overlap)


def _cd_from_decomposition(energies, vectors, dfds):
    """Dimensionless t_f*H_CD from one eigendecomposition of H(s)."""
    w = vectors.T @ (dfds * D1) @ vectors
    denom = energies[None, :] - energies[:, None]
    np.fill_diagonal(denom, np.inf)
    return 1j * vectors @ (w / denom) @ vectors.T


def cd_fields(spec: SweepSpec, params: SystemParams, s):
    """Batched t_f*H_CD over an array of s values; shape (n, 4, 4)."""
    s = np.atleast_1d(np.asarray(s, dtype=float))
    h = assemble_h4(eval_sweep(spec, s), params)
    energies, vectors = np.linalg.eigh(h)
    gaps = np.diff(energies, axis=1)
    if np.min(gaps) < MIN_GAP:
        raise DegenerateSpectrumError(
            f"minimum eigenvalue gap {np.min(gaps):.2e} below {MIN_GAP:.0e}"
        )
    dfds = eval_sweep_derivative(spec, s)
    w = np.einsum("nij,nik->njk", vectors, dfds[:, None, None] * D1[None] @ vectors)
    denom = energies[:, None, :] - energies[:, :, None]
    idx = np.arange(4)
    denom[:, idx, idx] = np.inf
    return 1j * np.einsum("nij,njk,nlk->nil", vectors, w / denom, vectors)


def cd_field(spec: SweepSpec, params: SystemParams, s):
    """t_f*H_CD at a single s (4x4, Hermitian, purely imaginary entries)."""
    return cd_fields(spec, params, float(s))[0]


def partial_cd(spec: SweepSpec, params: SystemParams, s):
    """CD field truncated to the dominant flip-flop channel:
    (h23/2) * (sx1 sy2 - sy1 sx2), i.e. only entries (1,2)/(2,1) kept."""
    h23 = float(cd_field(spec, params, s)[1, 2].imag)
    return 0.5 * h23 * FLIP_FLOP


@dataclass
class CDProfile:
    """Sampled t_f*H_CD over the sweep, with spline interpolation of h23."""

    spec: SweepSpec
    s: np.ndarray
    matrices: np.ndarray  # (n, 4, 4) complex, t_f*H_CD
    _h23_spline: CubicSpline = field(repr=False, default=None)

    UPPER_PAIRS = ((0, 1), (0, 2), (0, 3), (1, 2), (1, 3), (2, 3))

    def __post_init__(self):
        if self._h23_spline is None:
            object.__setattr__(
                self, "_h23_spline", CubicSpline(self.s, self.h23_samples)
            )

    @property
    def h23_samples(self):
        return self.matrices[:, 1, 2].imag

    def h23(self, s):
        """Interpolated dominant element Im<2|t_f*H_CD|3> at arbitrary s."""
        return self._h23_spline(s)

    @property
    def h23_max(self):
        return float(np.max(self.h23_samples))

    def element_samples(self, i, j):
        return self.matrices[:, i, j].imag

    def dominance_ratio(self):
        """max|h23| over the largest of the other independent elements."""
        h23 = np.max(np.abs(self.element_samples(1, 2)))
        others = max(
            np.max(np.abs(self.element_samples(i, j)))
            for (i, j) in self.UPPER_PAIRS
            if (i, j) != (1, 2)
        )
        return h23 / others

    def csv_rows(self):
        """Rows (s, h_01, h_02, h_03, h_12, h_13, h_23) for data dumps."""
        cols = [self.s] + [self.element_samples(i, j) for i, j in self.UPPER_PAIRS]
        return np.column_stack(cols)


def build_cd_profile(spec: SweepSpec, params: SystemParams, n_grid: int = 2001):
    """Sample the CD field on a uniform grid; h23 is spline-interpolated."""
    s = np.linspace(0.0, 1.0, n_grid)
    return CDProfile(spec=spec, s=s, matrices=cd_fields(spec, params, s))
