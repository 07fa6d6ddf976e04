"""Transition dipoles, selection rules, Raman coupling, and readout noise.

All polarization vectors are 3-vectors in the NV frame; lab-frame inputs
are rotated by the caller (see model.rotate_lab_to_nv).  Dipole matrices
have rows indexed by ground states and columns by excited states.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .hamiltonian import (
    EigenSystem,
    build_ground,
    excited_eigensystem,
    build_excited,
    ground_eigensystem,
)
from .model import (
    DjtParams,
    FieldNV,
    NvOrientation,
    ORIENTATIONS,
    PhysicalConstants,
    StrainNV,
    lab_field_to_nv,
    lab_strain_to_nv,
    oriented_djt,
    rotate_lab_to_nv,
)

# spin projection in the {Ex_up, Ex_dn, Ey_up, Ey_dn} basis
SZ_GROUND = np.diag([0.5, -0.5, 0.5, -0.5])


class ZeroCouplingError(ValueError):
    """Raised when both absorption probabilities vanish (degree undefined)."""


@dataclass(frozen=True)
class DipoleSet:
    dx: np.ndarray
    dy: np.ndarray
    dz: np.ndarray
    ground_basis: str = ""
    excited_basis: str = ""

    def component(self, pol) -> np.ndarray:
        """Dipole matrix projected on a polarization vector."""
        pol = np.asarray(pol, dtype=complex)
        if pol.shape != (3,):
            raise ValueError("polarization must be a 3-vector")
        return pol[0] * self.dx + pol[1] * self.dy + pol[2] * self.dz


def dipole_set_nv0(consts: PhysicalConstants) -> DipoleSet:
    """Canonical ground-excited dipoles: x couples Ex, y couples Ey, z none."""
    s = consts.d_ge / np.sqrt(2.0)
    dx = np.zeros((4, 2), dtype=complex)
    dy = np.zeros((4, 2), dtype=complex)
    dz = np.zeros((4, 2), dtype=complex)
    dx[0, 0] = dx[1, 1] = s      # Ex_up -> A1_up, Ex_dn -> A1_dn
    dy[2, 0] = dy[3, 1] = s      # Ey_up -> A1_up, Ey_dn -> A1_dn
    return DipoleSet(
        dx=dx, dy=dy, dz=dz,
        ground_basis="{Ex_up, Ex_dn, Ey_up, Ey_dn}",
        excited_basis="{A1_up, A1_dn}",
    )


def dipole_set_nvm() -> DipoleSet:
    """Dipoles of the negatively charged center: three spin-diagonal V systems.

    Grounds are {A2 ms=0, ms=+1, ms=-1}; excited columns are Ex then Ey,
    each over the same three spin projections.  Unit scale: used only for
    structural tests of the coupling criterion.
    """
    dx = np.zeros((3, 6), dtype=complex)
    dy = np.zeros((3, 6), dtype=complex)
    dz = np.zeros((3, 6), dtype=complex)
    for m in range(3):
        dx[m, m] = 1.0           # A2_m -> Ex_m
        dy[m, 3 + m] = 1.0       # A2_m -> Ey_m
    return DipoleSet(
        dx=dx, dy=dy, dz=dz,
        ground_basis="{A2_0, A2_+1, A2_-1}",
        excited_basis="{Ex_0, Ex_+1, Ex_-1, Ey_0, Ey_+1, Ey_-1}",
    )


def transform_dipoles(ds: DipoleSet, u_ground: np.ndarray, v_excited: np.ndarray) -> DipoleSet:
    """Basis change D -> U D V+ for unitaries acting on each manifold."""
    vh = np.asarray(v_excited).conj().T
    return DipoleSet(
        dx=u_ground @ ds.dx @ vh,
        dy=u_ground @ ds.dy @ vh,
        dz=u_ground @ ds.dz @ vh,
        ground_basis=ds.ground_basis + " (rotated)",
        excited_basis=ds.excited_basis + " (rotated)",
    )


@dataclass(frozen=True)
class ForcResult:
    holds: bool
    max_offdiag: float
    diag_spread: float


def forc_condition(ds: DipoleSet, rel_tol: float = 1e-10) -> ForcResult:
    """Check whether every polarization-pair product is proportional to identity.

    Evaluates D_b D_a+ for all nine polarization pairs.  holds is true iff
    each product equals (trace/n) I within rel_tol of the largest product
    magnitude, which is the condition for the leading Raman term to vanish
    identically for every ground pair.
    """
    mats = (ds.dx, ds.dy, ds.dz)
    if len({m.shape for m in mats}) != 1:
        raise ValueError("dipole matrices must share one shape")
    n = mats[0].shape[0]
    max_off = 0.0
    spread = 0.0
    scale = 0.0
    for db in mats:
        for da in mats:
            p = db @ da.conj().T
            scale = max(scale, float(np.abs(p).max()))
            a = np.trace(p) / n
            dev = p - a * np.eye(n)
            off = dev - np.diag(np.diag(dev))
            max_off = max(max_off, float(np.abs(off).max()))
            spread = max(spread, float(np.abs(np.diag(dev)).max()))
    tol = rel_tol * max(1.0, scale)
    return ForcResult(
        holds=(max_off <= tol and spread <= tol),
        max_offdiag=max_off,
        diag_spread=spread,
    )


@dataclass(frozen=True)
class RamanResult:
    r_times_delta: complex     # GHz^2 um^2 / V^2
    r_exact: complex           # GHz um^2/V^2 per GHz of detuning, at `detuning`
    detuning: float
    pair: tuple


def _spin_sorted_pair(ground_eigs: EigenSystem) -> tuple:
    """Indices of the spin-up member of the lower and upper doublets."""
    groups = ground_eigs.degenerate_pairs()
    if len(groups) != 2:
        raise ValueError("expected two ground doublets")

    def up_member(group):
        sz = [
            float(np.real(ground_eigs.vectors[:, j].conj() @ SZ_GROUND @ ground_eigs.vectors[:, j]))
            for j in group
        ]
        return group[int(np.argmax(sz))]

    return up_member(groups[0]), up_member(groups[1])


def raman_coupling(
    ground_eigs: EigenSystem,
    excited_eigs: EigenSystem,
    ds: DipoleSet,
    pol_signal,
    pol_control,
    detuning: float,
    pair: tuple | None = None,
) -> RamanResult:
    """Two-photon coupling between a ground pair through all excited states.

    The leading result is the detuning-independent product R*Delta; r_exact
    adds the first correction from excited-state energy spread (offsets
    measured from the mean excited energy).  The default pair is the
    same-spin member of each doublet, chosen by maximal spin projection.
    """
    if detuning == 0:
        raise ValueError("detuning must be nonzero")
    for name, pol in (("signal", pol_signal), ("control", pol_control)):
        nrm = np.linalg.norm(np.asarray(pol, dtype=complex))
        if abs(nrm - 1.0) > 1e-9:
            raise ValueError(f"{name} polarization must be unit norm, got {nrm}")
    if pair is None:
        pair = _spin_sorted_pair(ground_eigs)
    i, f = pair
    wg = ground_eigs.vectors
    we = excited_eigs.vectors
    d_sig = wg.conj().T @ ds.component(pol_signal) @ we
    d_ctl = wg.conj().T @ ds.component(pol_control) @ we
    sigma = excited_eigs.values - excited_eigs.values.mean()
    prod = d_sig[f, :] * d_ctl[i, :].conj()
    n0 = complex(prod.sum())
    n1 = complex((prod * sigma).sum())
    return RamanResult(
        r_times_delta=n0,
        r_exact=n0 / detuning - n1 / detuning**2,
        detuning=detuning,
        pair=(i, f),
    )


def absorption_probability(states: np.ndarray, ds: DipoleSet, axis) -> float:
    """Squared dipole amplitudes from the given ground columns, all excited."""
    states = np.atleast_2d(np.asarray(states, dtype=complex))
    if states.shape[0] != ds.dx.shape[0]:
        states = states.T
    d = ds.component(axis)
    amps = d.conj().T @ states    # excited x states
    return float(np.sum(np.abs(amps) ** 2))


def polarization_degree(states, ds: DipoleSet, axis1, axis2) -> float:
    """(P1 - P2)/(P1 + P2) for absorption on two orthogonal axes.

    states may be a single ground vector or the two columns of a doublet;
    summing a full doublet makes the result gauge independent.
    """
    p1 = absorption_probability(states, ds, axis1)
    p2 = absorption_probability(states, ds, axis2)
    tot = p1 + p2
    if tot == 0.0:
        raise ZeroCouplingError("state does not couple on either axis")
    return (p1 - p2) / tot


def transition_degrees(
    ground_eigs: EigenSystem, ds: DipoleSet, axis1, axis2
) -> tuple[float, float]:
    """Polarization degrees of the lower- and upper-doublet transitions."""
    groups = ground_eigs.degenerate_pairs()
    if len(groups) != 2:
        raise ValueError("expected two ground doublets")
    lo = ground_eigs.vectors[:, groups[0]]
    up = ground_eigs.vectors[:, groups[1]]
    return (
        polarization_degree(lo, ds, axis1, axis2),
        polarization_degree(up, ds, axis1, axis2),
    )


@dataclass(frozen=True)
class NoiseFactor:
    p: float
    per_orientation: dict | None = None


def noise_suppression(ground_eigs: EigenSystem, ds: DipoleSet, control_pol) -> NoiseFactor:
    """Exact fraction of control-field coupling taken by the upper doublet.

    Computed from eigenvector dipole amplitudes, not from the closed-form
    approximation; see noise_suppression_approx for the latter.
    """
    groups = ground_eigs.degenerate_pairs()
    if len(groups) != 2:
        raise ValueError("ground manifold is degenerate: no doublet splitting")
    p_lo = absorption_probability(ground_eigs.vectors[:, groups[0]], ds, control_pol)
    p_up = absorption_probability(ground_eigs.vectors[:, groups[1]], ds, control_pol)
    tot = p_lo + p_up
    if tot == 0.0:
        raise ZeroCouplingError("control polarization couples to neither doublet")
    return NoiseFactor(p=p_up / tot)


def noise_suppression_approx(s: float, djt: DjtParams, consts: PhysicalConstants) -> float:
    """Closed-form noise factor for splitting s much larger than zero-field."""
    den = 4.0 * (s - 2.0 * djt.upsilon_x) ** 2
    if den == 0.0:
        raise ValueError("approximation singular at s = 2 upsilon_x")
    return (consts.lambda_par**2 + 4.0 * djt.upsilon_y**2) / den


def ensemble_noise(
    field_lab,
    djt: DjtParams,
    consts: PhysicalConstants,
    control_pol_lab,
    orientations: tuple[NvOrientation, ...] = ORIENTATIONS,
    strain_lab: np.ndarray | None = None,
) -> NoiseFactor:
    """Orientation-summed noise factor for a lab field and lab polarization.

    Couplings are accumulated over all orientations before normalizing, so
    strongly coupled orientations weigh more.  The per-orientation factors
    are reported alongside.
    """
    ds = dipole_set_nv0(consts)
    tot_up = 0.0
    tot_all = 0.0
    per = {}
    for orient in orientations:
        fnv = lab_field_to_nv(field_lab, orient)
        strain = (
            StrainNV()
            if strain_lab is None
            else lab_strain_to_nv(strain_lab, orient)
        )
        gh = build_ground(oriented_djt(djt, orient), fnv, strain, consts)
        eigs = ground_eigensystem(gh)
        groups = eigs.degenerate_pairs()
        if len(groups) != 2:
            raise ValueError(f"degenerate ground manifold for {orient.label}")
        pol_nv = rotate_lab_to_nv(np.asarray(control_pol_lab, dtype=float), orient)
        p_lo = absorption_probability(eigs.vectors[:, groups[0]], ds, pol_nv)
        p_up = absorption_probability(eigs.vectors[:, groups[1]], ds, pol_nv)
        tot_up += p_up
        tot_all += p_lo + p_up
        per[orient.label] = p_up / (p_lo + p_up) if (p_lo + p_up) > 0 else float("nan")
    if tot_all == 0.0:
        raise ZeroCouplingError("control couples to no orientation")
    return NoiseFactor(p=tot_up / tot_all, per_orientation=per)


def single_nv_spectra(
    field: FieldNV,
    djt: DjtParams,
    strain: StrainNV,
    consts: PhysicalConstants,
):
    """Eigensystems and dipoles for one center, convenience bundle."""
    gh = build_ground(djt, field, strain, consts)
    eh = build_excited(field, strain, consts)
    return ground_eigensystem(gh), excited_eigensystem(eh), dipole_set_nv0(consts)
