"""Adiabatic sweep functions f(s) on the rescaled time s in [0, 1].

Every sweep maps the dimensionless half qubit-qubit detuning from f(0) = f0
down to f(1) = 0, monotonically non-increasing. Available kinds:

    lz    linear ramp
    pl    7th-order polynomial with three vanishing boundary derivatives
    beta  regularized incomplete Beta step with k vanishing derivatives
    rc    Roland-Cerf local adiabatic ramp (needs the gap ratio g0/g)
    tan   adiabatic-brachistochrone tangent ramp (needs g0/g)
"""
from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

SWEEP_KINDS = ("lz", "pl", "beta", "rc", "tan")


@dataclass(frozen=True)
class SweepSpec:
    kind: str
    f0: float = 0.2
    k_beta: int = 8
    g0_over_g: float | None = None  # required for rc and tan

    def __post_init__(self):
        if self.kind not in SWEEP_KINDS:
            raise ValueError(f"unknown sweep kind {self.kind!r}")
        if self.f0 <= 0:
            raise ValueError("f0 must be positive")
        if self.kind == "beta":
            if int(self.k_beta) != self.k_beta or self.k_beta < 1:
                raise ValueError("k_beta must be a positive integer")
        if self.kind in ("rc", "tan"):
            if self.g0_over_g is None or self.g0_over_g <= 0:
                raise ValueError(f"sweep {self.kind!r} needs g0_over_g > 0")

    @classmethod
    def for_params(cls, kind, params, k_beta=8):
        """Build a spec with f0 and the gap ratio taken from SystemParams."""
        return cls(kind=kind, f0=params.f0, k_beta=k_beta,
                   g0_over_g=params.g0 / params.g)


def _check_s(s):
    s = np.asarray(s, dtype=float)
    if np.any(s < -1e-12) or np.any(s > 1 + 1e-12):
        raise ValueError("s must lie in [0, 1]")
    return np.clip(s, 0.0, 1.0)


def _log_beta(a, b):
    return math.lgamma(a) + math.lgamma(b) - math.lgamma(a + b)


def _beta_theta(s, k):
    """Regularized incomplete Beta ratio B_s(1+k,1+k)/B_1(1+k,1+k).

    The integrand y^k (1-y)^k is a polynomial of degree 2k, so Gauss-Legendre
    with k+1 nodes on [0, s] is exact.
    """
    nodes, weights = np.polynomial.legendre.leggauss(k + 1)
    # map [-1, 1] -> [0, s] for each s
    y = 0.5 * np.multiply.outer(s, nodes + 1.0)
    integrand = y**k * (1.0 - y) ** k
    incomplete = 0.5 * s * (integrand @ weights)
    return incomplete * math.exp(-_log_beta(k + 1, k + 1))


def eval_sweep(spec: SweepSpec, s):
    """Evaluate f(s); accepts scalars or arrays."""
    s = _check_s(s)
    f0 = spec.f0
    if spec.kind == "lz":
        out = f0 * (1.0 - s)
    elif spec.kind == "pl":
        out = f0 * (1.0 - 35 * s**4 + 84 * s**5 - 70 * s**6 + 20 * s**7)
    elif spec.kind == "beta":
        out = f0 * (1.0 - _beta_theta(s, spec.k_beta))
    elif spec.kind == "rc":
        r = spec.g0_over_g
        out = r * f0 * (1.0 - s) / np.sqrt(r**2 + f0**2 * s * (2.0 - s))
    else:  # tan
        r = spec.g0_over_g
        alpha = math.atan(f0 / r)
        out = r * np.tan(alpha * (1.0 - s))
    return out if out.ndim else float(out)


def eval_sweep_derivative(spec: SweepSpec, s):
    """Analytic df/ds; accepts scalars or arrays."""
    s = _check_s(s)
    f0 = spec.f0
    if spec.kind == "lz":
        out = np.full_like(s, -f0)
    elif spec.kind == "pl":
        out = -140.0 * f0 * s**3 * (1.0 - s) ** 3
    elif spec.kind == "beta":
        k = spec.k_beta
        out = -f0 * s**k * (1.0 - s) ** k * math.exp(-_log_beta(k + 1, k + 1))
    elif spec.kind == "rc":
        r = spec.g0_over_g
        denom = (r**2 + f0**2 * s * (2.0 - s)) ** 1.5
        out = -r * f0 * (r**2 + f0**2) / denom
    else:  # tan
        r = spec.g0_over_g
        alpha = math.atan(f0 / r)
        out = -r * alpha / np.cos(alpha * (1.0 - s)) ** 2
    return out if out.ndim else float(out)


def local_adiabatic_residual(spec: SweepSpec, s, g, x0, t_f, use_norm=False):
    """Left-hand side of the pointwise adiabatic condition for the two-level
    reduction H = g f(t) sigma_z + x0 sigma_x.

    With use_norm=False the numerator is the nonadiabatic matrix element
    |<e| d_f H |gs>|; with use_norm=True it is the Hilbert-Schmidt norm
    ||d_f H|| (the brachistochrone variant). The rc sweep makes the former
    constant in s, the tan sweep the latter.
    """
    s = np.asarray(s, dtype=float)
    f = eval_sweep(spec, s)
    dfdt = eval_sweep_derivative(spec, s) / t_f
    gap_sq = 4.0 * g**2 * (f**2 + (x0 / g) ** 2)
    if use_norm:
        numer = g * np.sqrt(2.0)
    else:
        numer = abs(x0) / np.sqrt(f**2 + (x0 / g) ** 2)
    return np.abs(dfdt) * numer / gap_sq
