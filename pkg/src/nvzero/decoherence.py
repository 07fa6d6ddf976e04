"""Strain broadening, strained noise spread, and phonon-limited lifetime.

Strain spreads come in two flavors: closed-form chains driven by a measured
optical linewidth, and a Monte-Carlo tensor-sampling oracle that checks the
high-field splitting-spread relation directly.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .hamiltonian import abcd
from .model import DjtParams, FieldNV, PhysicalConstants, StrainNV

THZ = 1000.0

REGIME_GENERAL = "general"
REGIME_LARGE_DJT = "large_djt"


def kappa(consts: PhysicalConstants) -> float:
    """Ratio of E-mode to A1-mode strain energy scales."""
    e2 = consts.eps_E**2 + consts.eps_E_prime**2
    a2 = consts.eps_A1**2 + consts.eps_A1_prime**2
    return math.sqrt(e2 / a2)


@dataclass(frozen=True)
class BroadeningResult:
    kappa: float
    delta_s: float        # GHz
    delta_eps: float      # GHz, input linewidth
    regime: str
    assumption: str = "isotropic random strain, one common mode spread"


def _djt_weight(djt: DjtParams, consts: PhysicalConstants) -> float:
    """8 U^2 / (4 U^2 + lambda^2), the distortion share of the linewidth."""
    u2 = djt.upsilon**2
    return 8.0 * u2 / (4.0 * u2 + consts.lambda_par**2)


def strain_broadening(
    delta_eps: float,
    djt: DjtParams,
    consts: PhysicalConstants,
    regime: str = REGIME_GENERAL,
) -> BroadeningResult:
    """Ground-splitting spread implied by an optical-linewidth spread (GHz).

    The general regime keeps the full distortion weighting; the large-DJT
    regime is its 4 U^2 >> lambda^2 limit and needs no DJT parameters.
    """
    if delta_eps < 0:
        raise ValueError("delta_eps must be >= 0")
    k = kappa(consts)
    if regime == REGIME_GENERAL:
        factor = k / math.sqrt(1.0 + k**2 * _djt_weight(djt, consts))
    elif regime == REGIME_LARGE_DJT:
        factor = k / math.sqrt(1.0 + 2.0 * k**2)
    else:
        raise ValueError(f"unknown regime {regime!r}")
    return BroadeningResult(kappa=k, delta_s=factor * delta_eps, delta_eps=delta_eps, regime=regime)


def splitting_spread_from_strain(delta_e: float, consts: PhysicalConstants) -> float:
    """High-field splitting spread (GHz) from an isotropic mode spread delta_e.

    The splitting tracks twice the B coefficient there, so its spread is
    twice the B spread collected from the two in-plane deformation modes.
    """
    return 2.0 * THZ * delta_e * math.sqrt(consts.eps_E**2 + consts.eps_E_prime**2)


def strain_from_linewidth(delta_eps: float, djt: DjtParams, consts: PhysicalConstants) -> float:
    """Isotropic mode spread back-solved from a zero-field linewidth (GHz).

    The linewidth collects the optical-shift spread plus the distortion-
    weighted splitting spread; the normalization here carries a factor 1/2
    so that chaining this with splitting_spread_from_strain reproduces
    strain_broadening exactly rather than to within a model factor.
    """
    if delta_eps < 0:
        raise ValueError("delta_eps must be >= 0")
    a2 = consts.eps_A1**2 + consts.eps_A1_prime**2
    e2 = consts.eps_E**2 + consts.eps_E_prime**2
    return delta_eps / (2.0 * THZ * math.sqrt(a2 + e2 * _djt_weight(djt, consts)))


def splitting_spread_tensor_iid(sigma_component: float, consts: PhysicalConstants) -> float:
    """High-field splitting spread for iid Gaussian tensor components.

    With each of the six components at std sigma_component, the in-plane
    modes carry stds sqrt(2) sigma and 2 sigma, giving
    2 sigma sqrt(2 eps_E^2 + 4 eps_E'^2) in GHz.
    """
    return (
        2.0
        * THZ
        * sigma_component
        * math.sqrt(2.0 * consts.eps_E**2 + 4.0 * consts.eps_E_prime**2)
    )


def mc_splitting_spread(
    sigma_component: float,
    field: FieldNV,
    djt: DjtParams,
    consts: PhysicalConstants,
    n_samples: int = 100_000,
    seed: int = 0,
) -> float:
    """Monte-Carlo std of the ground splitting under random tensor strain.

    Samples the six NV-frame tensor components as iid Gaussians and
    diagonalizes through the closed form.  Deterministic for a given seed
    regardless of how callers batch the samples.
    """
    if sigma_component < 0 or n_samples < 2:
        raise ValueError("need sigma_component >= 0 and n_samples >= 2")
    rng = np.random.default_rng(seed)
    comps = rng.normal(scale=sigma_component, size=(n_samples, 6))
    splits = np.empty(n_samples)
    for i in range(n_samples):
        e = StrainNV(*comps[i])
        splits[i] = abcd(djt, field, e, consts).splitting
    return float(np.std(splits, ddof=1))


@dataclass(frozen=True)
class NoiseSpread:
    p: float
    delta_p: float


def strained_noise_spread(
    s: float, delta_s: float, djt: DjtParams, consts: PhysicalConstants
) -> NoiseSpread:
    """Noise factor and its strain-induced spread at high field.

    s is the field-induced splitting scale (GHz), delta_s the splitting
    spread.  Evaluated at mean strain zero; the spread is first order in
    the distortion's in-plane component.
    """
    if s <= 0:
        raise ValueError("s must be positive")
    if not (s > delta_s >= 0):
        raise ValueError("requires s > delta_s >= 0 (perturbative regime)")
    b = djt.upsilon_x - s / 2.0
    c = djt.upsilon_y
    d = consts.lambda_par / 2.0
    p = (c**2 + d**2) / (4.0 * b**2)
    delta_p = abs(djt.upsilon_y) * delta_s / s**2
    return NoiseSpread(p=p, delta_p=delta_p)


def bose_occupation(temperature: float, splitting: float) -> float:
    """Mean phonon number at energy `splitting` (GHz) and temperature (K)."""
    if temperature <= 0 or splitting <= 0:
        raise ValueError("temperature and splitting must be positive")
    return 1.0 / math.expm1(splitting / (PhysicalConstants.kB * temperature))


@dataclass(frozen=True)
class PhononReference:
    """Measured single-phonon reference point of the charged center."""

    tau_ref_us: float = 1.3     # minimal measured lifetime
    s_ref: float = 3.9          # GHz, splitting of the reference transition
    t_ref: float = 5.8          # K, temperature of the reference point
    chi_ratio: float = 0.5      # reference-to-neutral strain-coupling ratio


@dataclass(frozen=True)
class LifetimeBound:
    tau_min_ns: float
    splitting: float
    temperature: float
    reference: PhononReference


def lifetime_bound(
    splitting: float,
    temperature: float,
    reference: PhononReference = PhononReference(),
) -> LifetimeBound:
    """Lower bound (ns) on the ground-state lifetime from one-phonon decay.

    Scales the reference lifetime by the cubed splitting ratio and the
    thermal occupation ratio; only the coupling ratio enters, never the
    absolute phonon coupling.  temperature = 0 takes the N -> 0 limit.
    """
    if splitting <= 0:
        raise ValueError("splitting must be positive")
    if temperature < 0:
        raise ValueError("temperature must be >= 0")
    n_ref = bose_occupation(reference.t_ref, reference.s_ref)
    n = 0.0 if temperature == 0 else bose_occupation(temperature, splitting)
    tau_ns = (
        1000.0
        * reference.tau_ref_us
        * reference.chi_ratio
        * (reference.s_ref / splitting) ** 3
        * (2.0 * n_ref + 1.0)
        / (2.0 * n + 1.0)
    )
    return LifetimeBound(
        tau_min_ns=tau_ns,
        splitting=splitting,
        temperature=temperature,
        reference=reference,
    )


def phonon_rate_shape(
    splitting: float, temperature: float, prefactor: float = 1.0
) -> float:
    """One-phonon rate up to an unknown prefactor: S^3 (2N + 1)."""
    n = 0.0 if temperature == 0 else bose_occupation(temperature, splitting)
    return prefactor * splitting**3 * (2.0 * n + 1.0)
