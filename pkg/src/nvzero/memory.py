"""Dimensionless Raman memory coupling strength for bulk and waveguide setups.

This module is the SI seam: everything upstream works in GHz and um, and
the single audited conversion for the coupling-detuning product lives here.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

from .model import PhysicalConstants

H_PLANCK = 6.62607015e-34       # J s
EPSILON_0 = 8.8541878128e-12    # F/m
C_LIGHT = 2.99792458e8          # m/s

# (1 GHz)^2 (1 um)^2 / V^2 = 1e18 Hz^2 * 1e-12 m^2 / V^2
GHZ2_UM2_TO_SI = 1.0e6


@dataclass(frozen=True)
class Bulk:
    """Free-space focusing: the wavelength sets the interaction scale."""

    wavelength: float           # m

    def length_scale(self) -> float:
        return self.wavelength


@dataclass(frozen=True)
class Waveguide:
    """Guided geometry: width^2 / length replaces the wavelength."""

    width: float                # m
    length: float               # m

    def length_scale(self) -> float:
        return self.width**2 / self.length


@dataclass(frozen=True)
class MemoryConfig:
    pulse_energy: float         # J
    nv_density: float           # m^-3
    detuning: float             # Hz
    r_times_delta: float        # Hz^2 m^2 / V^2
    geometry: Bulk | Waveguide

    def __post_init__(self):
        if self.pulse_energy < 0 or self.nv_density < 0 or self.r_times_delta < 0:
            raise ValueError("energy, density and coupling must be >= 0")
        if self.detuning <= 0:
            raise ValueError("detuning must be positive")
        g = self.geometry
        if isinstance(g, Bulk):
            if g.wavelength <= 0:
                raise ValueError("wavelength must be positive")
        elif isinstance(g, Waveguide):
            if g.width <= 0 or g.length <= 0:
                raise ValueError("waveguide dimensions must be positive")
        else:
            raise TypeError("geometry must be Bulk or Waveguide")

    @property
    def sub_wavelength(self) -> bool:
        """True when a waveguide beats the default free-space scale."""
        if not isinstance(self.geometry, Waveguide):
            return False
        return self.geometry.length_scale() < default_wavelength()


def default_wavelength(consts: PhysicalConstants | None = None) -> float:
    """Control wavelength from the zero-field optical energy (m)."""
    consts = consts or PhysicalConstants()
    return C_LIGHT / (consts.eps_es * 1e12)


def r_times_delta_si(value_ghz2_um2: float) -> float:
    """Convert a coupling-detuning product from GHz^2 um^2/V^2 to SI."""
    return value_ghz2_um2 * GHZ2_UM2_TO_SI


def coupling_strength(cfg: MemoryConfig) -> float:
    """Relative Raman coupling strength (dimensionless).

    sqrt(pi^2 h / (eps0^2 c)) * sqrt(n E_C) * (R Delta) / (scale * Delta),
    with `scale` the geometry's interaction length scale.
    """
    pref = math.sqrt(math.pi**2 * H_PLANCK / (EPSILON_0**2 * C_LIGHT))
    scale = cfg.geometry.length_scale()
    return (
        pref
        * math.sqrt(cfg.nv_density * cfg.pulse_energy)
        * cfg.r_times_delta
        / (scale * cfg.detuning)
    )


def resolved_si(cfg: MemoryConfig) -> dict:
    """All inputs in SI plus the result, for audit records."""
    return {
        "pulse_energy_J": cfg.pulse_energy,
        "nv_density_per_m3": cfg.nv_density,
        "detuning_Hz": cfg.detuning,
        "r_times_delta_Hz2_m2_per_V2": cfg.r_times_delta,
        "geometry": type(cfg.geometry).__name__.lower(),
        "length_scale_m": cfg.geometry.length_scale(),
        "sub_wavelength": cfg.sub_wavelength,
        "coupling_strength": coupling_strength(cfg),
    }
