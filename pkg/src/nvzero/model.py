"""Shared physical constants, parameter types, and NV-frame geometry.

Units policy: ground-manifold energies in GHz, strain energies stored in THz
and converted to GHz (x1000) at Hamiltonian assembly, electric fields in
V/um, dipoles in GHz*um/V, temperatures in K.
"""

from __future__ import annotations

import math
import os
from dataclasses import dataclass, fields, replace
from typing import ClassVar

import numpy as np

try:
    import tomllib
except ModuleNotFoundError:  # py310
    import tomli as tomllib

CONFIG_ENV_VAR = "NVZERO_CONFIG"


@dataclass(frozen=True)
class PhysicalConstants:
    """Coupling energies and dipole moments of the neutral center.

    Every field except kB may be overridden through a config file; the
    defaults are literature estimates, not exact values.  lambda_perp and
    d_par are retained as knobs but default to zero effect: the transverse
    spin-orbit term vanishes in the ground manifold and the longitudinal
    dipole of the excited state is neglected.
    """

    lambda_par: float = 4.3        # GHz, longitudinal spin-orbit splitting
    lambda_perp: float = 0.0       # GHz, enters no assembled matrix
    d_perp: float = 5.0            # GHz*um/V, transverse ground-state dipole
    d_par: float = 0.0             # GHz*um/V, longitudinal excited dipole
    d_ge: float = 6.0              # GHz*um/V, optical transition dipole
    eps_es: float = 521.4          # THz, zero-field excited-state energy
    eps_A1: float = 192.0          # THz per unit strain, A1 mode
    eps_A1_prime: float = -483.0   # THz per unit strain, A1' mode
    eps_E: float = -600.0          # THz per unit strain, E modes
    eps_E_prime: float = 360.0     # THz per unit strain, E' modes

    # Boltzmann constant in GHz/K.  Fixed: not a material estimate.
    kB: ClassVar[float] = 20.836619

    def __post_init__(self):
        for f in fields(self):
            v = getattr(self, f.name)
            if not math.isfinite(v):
                raise ValueError(f"non-finite constant {f.name}={v!r}")

    def to_dict(self) -> dict:
        return {f.name: getattr(self, f.name) for f in fields(self)}

    @classmethod
    def from_dict(cls, d: dict) -> "PhysicalConstants":
        known = {f.name for f in fields(cls)}
        out = {}
        for k, v in d.items():
            if k == "kB":
                raise ValueError("kB is fixed and cannot be overridden")
            if k not in known:
                raise KeyError(f"unknown constant {k!r}")
            out[k] = float(v)
        return cls(**out)


def resolve_config_path(explicit: str | None = None) -> str | None:
    """Explicit flag wins, then the environment variable, then nothing."""
    if explicit:
        return explicit
    return os.environ.get(CONFIG_ENV_VAR) or None


def load_constants(path: str | None = None) -> PhysicalConstants:
    """Read constants from a config file (key = value, tables allowed).

    Keys may live at top level or inside a [constants] table; names mirror
    PhysicalConstants field names exactly.  A missing path returns defaults.
    """
    resolved = resolve_config_path(path)
    if resolved is None:
        return PhysicalConstants()
    with open(resolved, "rb") as fh:
        raw = tomllib.load(fh)
    table = raw.get("constants", {})
    flat = {k: v for k, v in raw.items() if not isinstance(v, dict)}
    overlap = set(flat) & set(table)
    if overlap:
        raise ValueError(f"constants defined twice: {sorted(overlap)}")
    flat.update(table)
    return PhysicalConstants.from_dict(flat)


def normalize_alpha(alpha_deg: float) -> float:
    """Wrap an angle in degrees into (-180, 180]."""
    a = math.fmod(alpha_deg, 360.0)
    if a > 180.0:
        a -= 360.0
    elif a <= -180.0:
        a += 360.0
    return a


@dataclass(frozen=True)
class DjtParams:
    """Dynamic distortion energy (GHz) and its in-plane angle (degrees).

    upsilon_x = U cos(alpha), upsilon_y = U sin(alpha).  Measurements bound
    upsilon at 12 GHz; the bound is documented, not enforced.
    """

    upsilon: float = 0.0
    alpha: float = 0.0

    def __post_init__(self):
        if not (math.isfinite(self.upsilon) and math.isfinite(self.alpha)):
            raise ValueError("non-finite DJT parameters")
        if self.upsilon < 0:
            raise ValueError(f"upsilon must be >= 0, got {self.upsilon}")
        if not (-180.0 < self.alpha <= 180.0):
            raise ValueError(f"alpha must lie in (-180, 180], got {self.alpha}")

    @property
    def upsilon_x(self) -> float:
        return self.upsilon * math.cos(math.radians(self.alpha))

    @property
    def upsilon_y(self) -> float:
        return self.upsilon * math.sin(math.radians(self.alpha))


@dataclass(frozen=True)
class FieldNV:
    """Electric field components (V/um) in the NV frame."""

    fx: float = 0.0
    fy: float = 0.0
    fz: float = 0.0

    def __post_init__(self):
        if not all(map(math.isfinite, (self.fx, self.fy, self.fz))):
            raise ValueError("non-finite field components")


@dataclass(frozen=True)
class StrainNV:
    """Symmetric strain tensor components (dimensionless) in the NV frame."""

    e_xx: float = 0.0
    e_yy: float = 0.0
    e_zz: float = 0.0
    e_xy: float = 0.0
    e_xz: float = 0.0
    e_yz: float = 0.0

    def __post_init__(self):
        vals = (self.e_xx, self.e_yy, self.e_zz, self.e_xy, self.e_xz, self.e_yz)
        if not all(map(math.isfinite, vals)):
            raise ValueError("non-finite strain components")

    # deformation-mode combinations entering the Hamiltonians
    @property
    def e_A1(self) -> float:
        return self.e_zz

    @property
    def e_A1_prime(self) -> float:
        return self.e_xx + self.e_yy

    @property
    def e_Ex(self) -> float:
        return self.e_xx - self.e_yy

    @property
    def e_Ey(self) -> float:
        return 2.0 * self.e_xy

    @property
    def e_Ex_prime(self) -> float:
        return 2.0 * self.e_xz

    @property
    def e_Ey_prime(self) -> float:
        return 2.0 * self.e_yz

    def tensor(self) -> np.ndarray:
        return np.array(
            [
                [self.e_xx, self.e_xy, self.e_xz],
                [self.e_xy, self.e_yy, self.e_yz],
                [self.e_xz, self.e_yz, self.e_zz],
            ]
        )

    @classmethod
    def from_tensor(cls, e: np.ndarray) -> "StrainNV":
        e = np.asarray(e, dtype=float)
        if e.shape != (3, 3):
            raise ValueError(f"strain tensor must be 3x3, got {e.shape}")
        if np.max(np.abs(e - e.T)) > 1e-12 * max(1.0, np.max(np.abs(e))):
            raise ValueError("strain tensor must be symmetric")
        return cls(
            e_xx=e[0, 0], e_yy=e[1, 1], e_zz=e[2, 2],
            e_xy=e[0, 1], e_xz=e[0, 2], e_yz=e[1, 2],
        )


@dataclass(frozen=True)
class NvOrientation:
    """One of the four NV axes with its canonical local frame.

    rotation rows are the NV x, y, z unit vectors in lab (cubic) coordinates,
    so rotation @ v_lab expresses a lab vector in the NV frame.  z points
    along the nitrogen-to-vacancy axis.  The frames are chosen so a [100]
    lab field has the same in-plane azimuth in all four frames.

    alpha_sign records how the internal distortion angle transforms into
    this frame: the symmetry operations relating the four axes flip the
    in-plane handedness for half of them, so a distortion described by
    angle alpha in the [111] convention appears as alpha_sign * alpha here.
    """

    label: str
    rotation: np.ndarray
    alpha_sign: int = 1

    def __post_init__(self):
        r = np.asarray(self.rotation, dtype=float)
        if r.shape != (3, 3):
            raise ValueError("rotation must be 3x3")
        if np.max(np.abs(r @ r.T - np.eye(3))) > 1e-12:
            raise ValueError("rotation is not orthogonal")
        if abs(np.linalg.det(r) - 1.0) > 1e-12:
            raise ValueError("rotation must have determinant +1")
        if self.alpha_sign not in (-1, 1):
            raise ValueError("alpha_sign must be +1 or -1")
        axis = axis_from_label(self.label)
        if np.max(np.abs(r[2] - axis)) > 1e-12:
            raise ValueError(f"z row does not match label {self.label}")
        r.setflags(write=False)
        object.__setattr__(self, "rotation", r)

    @property
    def x_axis(self) -> np.ndarray:
        return self.rotation[0]

    @property
    def y_axis(self) -> np.ndarray:
        return self.rotation[1]

    @property
    def z_axis(self) -> np.ndarray:
        return self.rotation[2]


def axis_from_label(label: str) -> np.ndarray:
    """Parse a direction label like '[1-11]' into a unit vector."""
    body = label.strip("[]")
    comps = []
    i = 0
    while i < len(body):
        if body[i] == "-":
            comps.append(-1.0)
            i += 2
        else:
            comps.append(1.0)
            i += 1
    if len(comps) != 3:
        raise ValueError(f"cannot parse direction label {label!r}")
    v = np.array(comps)
    return v / np.linalg.norm(v)


def _frame(label, x, y, z, sign):
    x = np.array(x, dtype=float)
    y = np.array(y, dtype=float)
    z = np.array(z, dtype=float)
    rot = np.vstack([x / np.linalg.norm(x), y / np.linalg.norm(y), z / np.linalg.norm(z)])
    return NvOrientation(label=label, rotation=rot, alpha_sign=sign)


# Canonical frames for the four NV axes.  For [111], x is along [-1-12];
# the other three follow by tetrahedral symmetry operations, which keep the
# [100] field azimuth common but flip alpha for two of the axes.
ORIENTATIONS: tuple[NvOrientation, ...] = (
    _frame("[111]", (-1, -1, 2), (1, -1, 0), (1, 1, 1), +1),
    _frame("[-1-11]", (-1, -1, -2), (1, -1, 0), (-1, -1, 1), -1),
    _frame("[-11-1]", (-1, 1, 2), (1, 1, 0), (-1, 1, -1), -1),
    _frame("[1-1-1]", (-1, 1, -2), (1, 1, 0), (1, -1, -1), +1),
)


def orientation_by_label(label: str) -> NvOrientation:
    for o in ORIENTATIONS:
        if o.label == label:
            return o
    raise KeyError(f"unknown orientation {label!r}")


def rotate_lab_to_nv(v_lab, orient: NvOrientation) -> np.ndarray:
    return orient.rotation @ np.asarray(v_lab, dtype=float)


def rotate_nv_to_lab(v_nv, orient: NvOrientation) -> np.ndarray:
    return orient.rotation.T @ np.asarray(v_nv, dtype=float)


def lab_field_to_nv(field_lab, orient: NvOrientation) -> FieldNV:
    """Express a lab-frame field vector (V/um) in the NV frame."""
    f = rotate_lab_to_nv(field_lab, orient)
    return FieldNV(fx=f[0], fy=f[1], fz=f[2])


def lab_strain_to_nv(strain_lab: np.ndarray, orient: NvOrientation) -> StrainNV:
    """Rotate a symmetric lab-frame strain tensor into the NV frame."""
    e = np.asarray(strain_lab, dtype=float)
    r = orient.rotation
    return StrainNV.from_tensor(r @ e @ r.T)


def oriented_djt(djt: DjtParams, orient: NvOrientation) -> DjtParams:
    """The distortion parameters as seen in a given orientation's frame."""
    if orient.alpha_sign == 1:
        return djt
    return replace(djt, alpha=normalize_alpha(-djt.alpha))
