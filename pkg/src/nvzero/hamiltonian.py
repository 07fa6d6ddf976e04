"""Ground (4x4) and excited (2x2) manifold Hamiltonians and eigensolvers.

Ground basis order is {Ex_up, Ex_dn, Ey_up, Ey_dn}; excited basis is
{A1_up, A1_dn}.  Ground energies use the mean-zero convention (the matrix
is traceless); the absolute optical scale lives in transition_energy.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .model import DjtParams, FieldNV, PhysicalConstants, StrainNV

GROUND_BASIS = "{Ex_up, Ex_dn, Ey_up, Ey_dn}"
EXCITED_BASIS = "{A1_up, A1_dn}"

# THz -> GHz for the strain energies
THZ = 1000.0


@dataclass(frozen=True)
class AbcdCoefficients:
    """Closed-form coefficients: eigenvalues are a +- sqrt(b^2+c^2+d^2)."""

    a: float
    b: float
    c: float
    d: float

    @property
    def splitting(self) -> float:
        return 2.0 * math.sqrt(self.b**2 + self.c**2 + self.d**2)


def abcd(
    djt: DjtParams,
    field: FieldNV,
    strain: StrainNV,
    consts: PhysicalConstants,
) -> AbcdCoefficients:
    a = (
        -THZ * consts.eps_es
        + consts.d_par * field.fz
        - THZ * (consts.eps_A1 * strain.e_A1 + consts.eps_A1_prime * strain.e_A1_prime)
    )
    b = (
        djt.upsilon_x
        - consts.d_perp * field.fx
        + THZ * (consts.eps_E * strain.e_Ex + consts.eps_E_prime * strain.e_Ex_prime)
    )
    c = (
        djt.upsilon_y
        - consts.d_perp * field.fy
        + THZ * (consts.eps_E * strain.e_Ey + consts.eps_E_prime * strain.e_Ey_prime)
    )
    d = consts.lambda_par / 2.0
    return AbcdCoefficients(a=a, b=b, c=c, d=d)


@dataclass(frozen=True)
class GroundHamiltonian:
    matrix: np.ndarray
    djt: DjtParams
    field: FieldNV
    strain: StrainNV
    consts: PhysicalConstants
    basis: str = GROUND_BASIS


@dataclass(frozen=True)
class ExcitedHamiltonian:
    matrix: np.ndarray
    field: FieldNV
    strain: StrainNV
    consts: PhysicalConstants
    basis: str = EXCITED_BASIS


def build_ground(
    djt: DjtParams,
    field: FieldNV,
    strain: StrainNV,
    consts: PhysicalConstants,
) -> GroundHamiltonian:
    """Assemble the ground-manifold matrix from the B, C, D coefficients.

    Layout: B on the orbital-diagonal (+B for Ex rows, -B for Ey rows),
    the C coefficient on the orbital-off-diagonal as -C (this sign keeps
    the matrix covariant under the frame conventions of model.ORIENTATIONS;
    eigenvalues depend only on C^2), and the spin-orbit D entering the
    orbital-off-diagonal as -iD for spin up, +iD for spin down.  The two
    spin blocks are complex conjugates and never mix.
    """
    co = abcd(djt, field, strain, consts)
    b, c, d = co.b, co.c, co.d
    h = np.zeros((4, 4), dtype=complex)
    h[0, 0] = h[1, 1] = b
    h[2, 2] = h[3, 3] = -b
    h[0, 2] = -c - 1j * d
    h[2, 0] = -c + 1j * d
    h[1, 3] = -c + 1j * d
    h[3, 1] = -c - 1j * d
    h.setflags(write=False)
    return GroundHamiltonian(matrix=h, djt=djt, field=field, strain=strain, consts=consts)


def build_excited(
    field: FieldNV,
    strain: StrainNV,
    consts: PhysicalConstants,
) -> ExcitedHamiltonian:
    """Excited manifold: identity times the absolute optical energy (GHz)."""
    shift = transition_energy(field, strain, consts)
    h = shift * np.eye(2, dtype=complex)
    h.setflags(write=False)
    return ExcitedHamiltonian(matrix=h, field=field, strain=strain, consts=consts)


def transition_energy(
    field: FieldNV,
    strain: StrainNV,
    consts: PhysicalConstants,
) -> float:
    """Mean optical transition energy in GHz (ground mean is zero)."""
    return (
        THZ * consts.eps_es
        - consts.d_par * field.fz
        + THZ * (consts.eps_A1 * strain.e_A1 + consts.eps_A1_prime * strain.e_A1_prime)
    )


@dataclass(frozen=True)
class EigenSystem:
    values: np.ndarray        # ascending, GHz
    vectors: np.ndarray       # orthonormal columns
    basis: str = ""
    degeneracy_tol: float = 1e-9

    def degenerate_pairs(self):
        """Indices grouped by eigenvalue within degeneracy_tol."""
        groups = [[0]]
        for i in range(1, len(self.values)):
            if self.values[i] - self.values[groups[-1][0]] <= self.degeneracy_tol:
                groups[-1].append(i)
            else:
                groups.append([i])
        return groups


def _fix_phase(vectors: np.ndarray, tol: float = 1e-12) -> np.ndarray:
    """Rotate each column so its first nonzero component is real positive."""
    v = vectors.copy()
    for j in range(v.shape[1]):
        col = v[:, j]
        nz = np.flatnonzero(np.abs(col) > tol * max(1.0, np.abs(col).max()))
        if nz.size == 0:
            continue
        lead = col[nz[0]]
        v[:, j] = col * (lead.conjugate() / abs(lead))
    return v


def diagonalize(h: np.ndarray, basis: str = "", degeneracy_tol: float = 1e-9) -> EigenSystem:
    """Sorted eigensystem of a Hermitian matrix with deterministic phases.

    Non-Hermitian input is rejected with the largest asymmetry in the
    message.  Backed by a dense Hermitian solver; the analytic block path
    in ground_eigensystem cross-checks it for the 4x4 ground case.
    """
    h = np.asarray(h, dtype=complex)
    if h.ndim != 2 or h.shape[0] != h.shape[1]:
        raise ValueError(f"matrix must be square, got {h.shape}")
    scale = max(1.0, float(np.abs(h).max()))
    asym = float(np.abs(h - h.conj().T).max())
    if asym > 1e-9 * scale:
        raise ValueError(f"matrix is not Hermitian: max asymmetry {asym:.3e}")
    w, v = np.linalg.eigh(h)
    return EigenSystem(
        values=w, vectors=_fix_phase(v), basis=basis, degeneracy_tol=degeneracy_tol
    )


def _solve_spin_block(b: float, w: complex):
    """Eigenpairs of [[b, w], [conj(w), -b]]: values -r, +r."""
    r = math.sqrt(b * b + abs(w) ** 2)
    if r == 0.0:
        return 0.0, np.eye(2, dtype=complex)
    vecs = np.empty((2, 2), dtype=complex)
    for j, lam in enumerate((-r, r)):
        if abs(w) > 1e-15 * r:
            col = np.array([w, lam - b], dtype=complex)
        else:
            col = np.array([1.0, 0.0] if lam == b else [0.0, 1.0], dtype=complex)
        vecs[:, j] = col / np.linalg.norm(col)
    return r, _fix_phase(vecs)


def ground_eigensystem(gh: GroundHamiltonian, degeneracy_tol: float = 1e-9) -> EigenSystem:
    """Analytic eigensystem of the ground matrix with a fixed spin gauge.

    Column order is (lower, spin up), (lower, spin down), (upper, spin up),
    (upper, spin down): within each doubly degenerate level the vectors
    diagonalize the spin projection, which keeps sweep outputs and golden
    files deterministic.  Eigenvalues are -+ sqrt(B^2 + C^2 + D^2).
    """
    h = gh.matrix
    cross = max(abs(h[0, 1]), abs(h[0, 3]), abs(h[2, 1]), abs(h[2, 3]))
    if cross > 1e-12 * max(1.0, float(np.abs(h).max())):
        raise ValueError("ground matrix mixes spin blocks")
    b = h[0, 0].real
    w = h[0, 2]
    r, up = _solve_spin_block(b, w)
    # spin-down block is the complex conjugate of spin-up
    dn = up.conjugate()
    vectors = np.zeros((4, 4), dtype=complex)
    vectors[np.ix_([0, 2], [0, 2])] = up      # columns: lower_up, upper_up
    vectors[np.ix_([1, 3], [1, 3])] = dn      # columns: lower_dn, upper_dn
    values = np.array([-r, -r, r, r])
    return EigenSystem(
        values=values,
        vectors=_fix_phase(vectors),
        basis=gh.basis,
        degeneracy_tol=degeneracy_tol,
    )


def excited_eigensystem(eh: ExcitedHamiltonian) -> EigenSystem:
    return diagonalize(eh.matrix, basis=eh.basis)


def level_sweep(
    field_values,
    djt: DjtParams,
    strain: StrainNV,
    consts: PhysicalConstants,
    direction=(1.0, 0.0, 0.0),
    orient=None,
):
    """Ground levels versus field magnitude along a fixed direction.

    With orient=None the direction is read in the NV frame; otherwise it is
    a lab direction, rotated per orientation, and the distortion angle is
    adjusted by the orientation's alpha_sign.  Returns an (n, 3) array of
    (field, e_lower, e_upper) rows.
    """
    from .model import lab_field_to_nv, oriented_djt

    fv = np.asarray(field_values, dtype=float)
    if fv.size < 2:
        raise ValueError("need at least two field samples")
    if not (np.all(np.diff(fv) > 0) or np.all(np.diff(fv) < 0)):
        raise ValueError("field values must be monotone")
    direction = np.asarray(direction, dtype=float)
    nrm = np.linalg.norm(direction)
    if nrm == 0:
        raise ValueError("zero sweep direction")
    direction = direction / nrm
    use_djt = djt if orient is None else oriented_djt(djt, orient)
    rows = np.empty((fv.size, 3))
    for i, f in enumerate(fv):
        vec = f * direction
        if orient is None:
            fnv = FieldNV(fx=vec[0], fy=vec[1], fz=vec[2])
        else:
            fnv = lab_field_to_nv(vec, orient)
        co = abcd(use_djt, fnv, strain, consts)
        half = co.splitting / 2.0
        rows[i] = (f, -half, half)
    return rows
