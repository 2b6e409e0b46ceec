"""Spectral analysis: exact diagonalization, Bloch bands, localized states.

Diagonalization is delegated to numpy.linalg.eigh (LAPACK), which returns
ascending eigenvalues with a deterministic orthonormal eigenbasis for a
given input matrix.
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .fock import FockBasis, enumerate_basis
from .hamiltonian import build_hamiltonian
from .lattice import LatticeSpec

HERMITICITY_RTOL = 1e-12


@dataclass(frozen=True)
class Eigensystem:
    """Ascending eigenvalues and orthonormal eigenvector columns."""
    values: np.ndarray
    vectors: np.ndarray
    degeneracy_tol: float

    @property
    def dim(self) -> int:
        return len(self.values)

    def groups(self) -> list:
        """Indices of (quasi-)degenerate eigenvalues, grouped within
        degeneracy_tol of their group's first member."""
        out = []
        start = 0
        n = self.dim
        for k in range(1, n + 1):
            if k == n or self.values[k] - self.values[start] > self.degeneracy_tol:
                out.append(list(range(start, k)))
                start = k
        return out


def eigendecompose(H: np.ndarray, degeneracy_tol: float | None = None) -> Eigensystem:
    """Eigendecomposition of a Hermitian matrix.

    Raises ValueError if H deviates from Hermiticity by more than
    HERMITICITY_RTOL relative to its largest entry.  degeneracy_tol defaults
    to 1e-8 * max(1, max |eigenvalue|).
    """
    H = np.asarray(H)
    if H.ndim != 2 or H.shape[0] != H.shape[1]:
        raise ValueError(f"expected a square matrix, got shape {H.shape}")
    scale = np.abs(H).max()
    dev = np.abs(H - H.conj().T).max()
    if dev > HERMITICITY_RTOL * max(scale, 1.0):
        raise ValueError(f"matrix is not Hermitian (deviation {dev:.3e})")
    values, vectors = np.linalg.eigh((H + H.conj().T) / 2)
    if degeneracy_tol is None:
        degeneracy_tol = 1e-8 * max(1.0, np.abs(values).max())
    return Eigensystem(values, vectors, float(degeneracy_tol))


def spectroscopy_lines(spec: LatticeSpec, n_particles: int,
                       max_occ: int | None = None) -> np.ndarray:
    """Transition energies from the vacuum into the n-particle sector
    (ascending, rad/us): the pump resonances of an n-photon spectroscopy."""
    basis = enumerate_basis(spec.n_sites, n_particles, max_occ)
    eig = eigendecompose(build_hamiltonian(spec, basis))
    vac = enumerate_basis(spec.n_sites, 0)
    e_vac = build_hamiltonian(spec, vac)[0, 0]
    return eig.values - e_vac


@dataclass(frozen=True)
class BandSet:
    """Bloch bands of the infinite rhombus chain on a closed k grid."""
    k: np.ndarray          # wavenumbers in [-pi, pi]
    bands: np.ndarray      # (n_k, 3), ascending at each k, relative to omega
    flux: float            # hopping phase through each plaquette, radians


def bloch_bands(flux: float, t: float = 1.0, n_k: int = 201) -> BandSet:
    """Band structure of the infinite rhombus chain at the given flux.

    Unit cell (spinal, top, bottom); the flux phase rides on the
    top-to-next-spinal bond.  Unlike the lattice builders, any flux in
    radians is accepted here: the Bloch matrix is complex Hermitian.  The
    middle band is flat at zero for every flux; at flux pi all three bands
    are flat (energies 0, +-2t for uniform t).
    """
    if t <= 0:
        raise ValueError("tunneling magnitude must be positive")
    if n_k < 2:
        raise ValueError("need at least two k points")
    ks = np.linspace(-np.pi, np.pi, n_k)
    bands = np.empty((n_k, 3))
    for m, k in enumerate(ks):
        a = -t * (1.0 + np.exp(1j * flux) * np.exp(-1j * k))
        b = -t * (1.0 + np.exp(-1j * k))
        M = np.array([[0.0, a, b],
                      [np.conj(a), 0.0, 0.0],
                      [np.conj(b), 0.0, 0.0]])
        bands[m] = np.linalg.eigvalsh(M)
    return BandSet(ks, bands, float(flux))


def flatness(bandset: BandSet) -> np.ndarray:
    """Bandwidth (max - min over k) of each band."""
    return bandset.bands.max(axis=0) - bandset.bands.min(axis=0)


@dataclass(frozen=True)
class CLSCheck:
    is_eigenstate: bool
    energy: float          # Rayleigh quotient
    residual: float        # ||H psi - E psi||
    support: int           # sites with |amplitude| above tolerance


def verify_cls(spec: LatticeSpec, amplitudes, tol: float = 1e-9) -> CLSCheck:
    """Check whether a single-particle amplitude pattern is a compact
    localized eigenstate of the lattice."""
    psi = np.asarray(amplitudes, dtype=complex)
    if psi.shape != (spec.n_sites,):
        raise ValueError("amplitude vector does not match the lattice")
    nrm = np.linalg.norm(psi)
    if nrm < tol:
        raise ValueError("zero amplitude vector")
    psi = psi / nrm
    basis = enumerate_basis(spec.n_sites, 1)
    # single-particle basis order equals site order
    H = build_hamiltonian(spec, basis)
    energy = float(np.real(psi.conj() @ H @ psi))
    residual = float(np.linalg.norm(H @ psi - energy * psi))
    support = int(np.sum(np.abs(psi) > tol))
    return CLSCheck(residual <= tol * max(1.0, np.abs(H).max()), energy,
                    residual, support)


@dataclass(frozen=True)
class EnergyGroups:
    """Eigenvalues binned by the nearest integer multiple of the interaction
    energy u (attractive: multiples are negative)."""
    multiples: dict        # m -> list of eigenvalue indices
    unassigned: tuple
    u: float
    window: float

    def sizes(self) -> dict:
        return {m: len(v) for m, v in sorted(self.multiples.items())}


def eigenenergy_groups(values, u: float, window: float = 0.25,
                       offset: float = 0.0) -> EnergyGroups:
    """Assign eigenvalues to interaction shells m*u, m = 0, 1, 2, ...

    offset is subtracted first (e.g. n*omega, so that only the interaction
    part is binned).  A value lands in shell m = round((E-offset)/u) when its
    residual is within window*|u|; everything else is reported unassigned.
    """
    if u == 0:
        raise ValueError("grouping needs a nonzero interaction energy")
    if isinstance(values, Eigensystem):
        values = values.values
    values = np.asarray(values, dtype=float)
    multiples: dict = {}
    unassigned = []
    for idx, e in enumerate(values):
        x = e - offset
        m = int(round(x / u))
        if m < 0:
            m = 0
        if abs(x - m * u) <= window * abs(u):
            multiples.setdefault(m, []).append(idx)
        else:
            unassigned.append(idx)
    return EnergyGroups(multiples, tuple(unassigned), float(u), float(window))
