"""Storage coupling strength for a bulk focus versus a small waveguide."""

import math

from nvzero.memory import (
    Bulk,
    MemoryConfig,
    Waveguide,
    coupling_strength,
    default_wavelength,
    r_times_delta_si,
)

rd = r_times_delta_si(18.0 / math.sqrt(3.0))   # cube-axis ensemble value

bulk = MemoryConfig(
    pulse_energy=10e-9,          # 10 nJ control pulse
    nv_density=1e22,             # per m^3
    detuning=1e11,               # 100 GHz
    r_times_delta=rd,
    geometry=Bulk(wavelength=default_wavelength()),
)
wg = MemoryConfig(
    pulse_energy=0.1e-9,         # 100 pJ is enough once confined
    nv_density=1e22,
    detuning=1e11,
    r_times_delta=rd,
    geometry=Waveguide(width=1e-6, length=1e-3),
)

print(f"control wavelength        {default_wavelength()*1e9:.1f} nm")
print(f"bulk focus                R = {coupling_strength(bulk):.3f}")
print(f"1 um x 1 mm waveguide     R = {coupling_strength(wg):.1f}  "
      f"(sub-wavelength: {wg.sub_wavelength})")
print()
print("confinement buys two orders of magnitude at a hundredth the energy")
