"""Caging analysis: which Fock states and which sites a walk can never reach.

Reachability is decided spectrally.  Eigenvalues are grouped within the
degeneracy tolerance, each group contributes a projector P_k, and a target
state is unreachable from the initial one iff max_k |<target|P_k|initial>|
stays below tolerance: the overlap of the two states through every energy
shell vanishes, so the propagator matrix element is zero at all times.

Classification of an interaction partition runs in one of two modes.

finite_U uses the full n-particle Hamiltonian of the lattice as given.

hardcore_limit models the strong-interaction limit, where states of
different partitions decouple energetically.  Within a partition the
leading dynamics consists of (a) single-particle hops that preserve the
partition (the first-order projection of H) and (b) for state pairs that
differ by relocating a k-particle stack across one bond, the leading
k-th-order transfer whose amplitude follows the generalized bound-pair
formula: moving k particles from a site holding m onto a site holding q

    J = prod_{r=1..k} [-t sqrt((m-r+1)(q+r))] / prod_{r=1..k-1} (E0 - E_r)

with E_r the interaction energy of the intermediate configuration.  For
k=2, m=2, q=0 this is the pair rate 2 t^2 / u: the pair hops with the
square of the bond sign, so it sees twice the flux of a single photon
(pi -> 2pi = 0, which is how the pair escapes the cage), while odd stacks
keep an effective pi flux and stay caged.
"""
from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .fock import FockBasis, enumerate_basis, state_to_string
from .hamiltonian import build_hamiltonian
from .lattice import LatticeSpec, rotation_image
from .spectral import Eigensystem, eigendecompose
from .dynamics import evolve_state, site_occupation

REACH_TOL = 1e-9
FROZEN_TOL = 1e-9
MIN_GRID_POINTS = 400
MIN_GRID_SWAPS = 20


@dataclass(frozen=True)
class ReachabilityResult:
    initial: int
    unreachable: tuple       # indices with projector amplitude below tol
    amplitudes: np.ndarray   # max_k |<j|P_k|initial>| per basis index
    tol: float


def unreachable_states(eigs: Eigensystem, initial: int,
                       tol: float = REACH_TOL) -> ReachabilityResult:
    """States that no amount of evolution can populate from the initial one."""
    d = eigs.dim
    if not (0 <= initial < d):
        raise ValueError(f"initial index {initial} outside basis of size {d}")
    amps = np.zeros(d)
    V = eigs.vectors
    for group in eigs.groups():
        block = V[:, group]
        # column of the group projector at the initial state
        col = block @ block[initial, :].conj()
        amps = np.maximum(amps, np.abs(col))
    unreachable = tuple(int(j) for j in range(d) if amps[j] < tol)
    return ReachabilityResult(initial, unreachable, amps, tol)


def frozen_sites(eigs: Eigensystem, basis: FockBasis, initial: int, grid,
                 tol: float = FROZEN_TOL) -> list:
    """Sites whose mean occupation never deviates from its initial value.

    grid must span at least MIN_GRID_SWAPS characteristic swap periods of
    the Hamiltonian that produced eigs with at least MIN_GRID_POINTS points
    (the caller knows the physical timescale; see classification_grid).
    """
    grid = np.asarray(grid, dtype=float)
    if len(grid) < MIN_GRID_POINTS:
        raise ValueError(f"grid needs at least {MIN_GRID_POINTS} points")
    psi0 = np.zeros(eigs.dim, dtype=complex)
    psi0[initial] = 1.0
    amps = evolve_state(eigs, psi0, grid)
    dens = site_occupation(amps, basis)
    drift = np.abs(dens - dens[0]).max(axis=0)
    return [int(i) for i in np.nonzero(drift < tol)[0]]


def classification_grid(scale: float, n_swaps: int = MIN_GRID_SWAPS,
                        n_points: int = MIN_GRID_POINTS + 1) -> np.ndarray:
    """Time grid spanning n_swaps swap periods of an energy scale (rad/us)."""
    if scale <= 0:
        raise ValueError("need a positive energy scale")
    tau = 2.0 * np.pi / (4.0 * scale)
    return np.linspace(0.0, n_swaps * tau, n_points)


# ---------------------------------------------------------------------------
# hard-core-limit effective model

def _stack_move(sa, sb):
    """(i, j, k) when sb equals sa with k particles moved from i to j across
    exactly two sites, else None."""
    diff = [b - a for a, b in zip(sa, sb)]
    support = [idx for idx, dd in enumerate(diff) if dd != 0]
    if len(support) != 2:
        return None
    i, j = support
    if diff[i] > 0:
        i, j = j, i
    if diff[j] != -diff[i]:
        return None
    return i, j, -diff[i]


def _transfer_amplitude(t: float, u: float, k: int, m: int, q: int) -> float:
    """Leading-order amplitude for moving a k-stack from occupancy m onto
    occupancy q across one bond of tunneling t (see module docstring)."""
    v = 1.0
    for r in range(1, k + 1):
        v *= -t * math.sqrt((m - r + 1) * (q + r))
    def e_int(mm, qq):
        return 0.5 * u * (mm * (mm - 1) + qq * (qq - 1))
    e0 = e_int(m, q)
    denom = 1.0
    for r in range(1, k):
        denom *= e0 - e_int(m - r, q + r)
    if denom == 0.0:
        raise ValueError("hard-core-limit transfer needs a nonzero interaction")
    return v / denom


def hardcore_subspace_hamiltonian(spec: LatticeSpec, basis: FockBasis,
                                  partition) -> tuple:
    """(sub_basis, H_eff) for one partition in the strong-interaction limit.

    Single-hop entries coincide with the projection of the full Hamiltonian
    onto the partition's states (constant diagonal dropped); stack moves of
    k >= 2 particles enter at their leading perturbative order.  Site-energy
    self-corrections are neglected: on the plaquette they are a constant
    shift for uniform tunneling.
    """
    indices = basis.partition_indices(partition)
    if not indices:
        raise ValueError(f"partition {partition} does not occur in the basis")
    sub = basis.restricted(indices)
    ubar = float(np.mean(spec.u()))
    bm = spec.bond_map()
    d = len(sub)
    H = np.zeros((d, d))
    for a in range(d):
        for b in range(a + 1, d):
            move = _stack_move(sub.states[a], sub.states[b])
            if move is None:
                continue
            i, j, k = move
            if (i, j) not in bm:
                continue
            if k > 1 and ubar == 0.0:
                raise ValueError(
                    "hard-core-limit stack transfer needs a nonzero interaction")
            J = _transfer_amplitude(bm[(i, j)], ubar, k, sub.states[a][i],
                                    sub.states[a][j])
            H[a, b] += J
            H[b, a] += J
    return sub, H


# ---------------------------------------------------------------------------
# classification

def integer_partitions(n: int, max_parts: int | None = None) -> list:
    """Partitions of n into at most max_parts parts, descending, e.g.
    integer_partitions(3) = [(3,), (2, 1), (1, 1, 1)]."""
    if n < 1:
        raise ValueError("n must be positive")
    out = []

    def rec(remaining, cap, prefix):
        if remaining == 0:
            out.append(tuple(prefix))
            return
        if max_parts is not None and len(prefix) == max_parts:
            return
        for part in range(min(cap, remaining), 0, -1):
            rec(remaining - part, part, prefix + [part])

    rec(n, n, [])
    return out


NOT_CAGED = "not_caged"
REAL_SPACE = "real_space"
FOCK_SPACE = "fock_space"


@dataclass(frozen=True)
class CagingWitness:
    initial: tuple           # occupation vector
    unreachable: tuple       # occupation vectors
    frozen_sites: tuple      # site labels


@dataclass(frozen=True)
class CagingReport:
    n_particles: int
    partition: tuple
    mode: str
    classification: str
    witnesses: tuple

    def to_dict(self) -> dict:
        return {
            "n": self.n_particles,
            "partition": list(self.partition),
            "mode": self.mode,
            "classification": self.classification,
            "witnesses": [
                {
                    "initial": state_to_string(w.initial),
                    "unreachable": [state_to_string(s) for s in w.unreachable],
                    "frozen_sites": list(w.frozen_sites),
                }
                for w in self.witnesses
            ],
        }


def _mean_offdiagonal(H: np.ndarray) -> float:
    off = np.abs(H - np.diag(np.diag(H)))
    vals = off[off > 1e-14 * max(1.0, off.max() if off.size else 1.0)]
    return float(vals.mean()) if vals.size else 0.0


def classify_partition(spec: LatticeSpec, n_particles: int, partition,
                       mode: str = "hardcore_limit", tol: float = REACH_TOL,
                       grid=None) -> CagingReport:
    """Classify the dynamics within one interaction partition.

    Every partition state serves as a witness initial condition.  The
    partition is real_space caged when any witness has a frozen site,
    fock_space caged when (lacking that) any witness has unreachable
    partition states, and not_caged otherwise.  real_space takes precedence:
    a frozen site is visible in single-site averages, while pure Fock-space
    caging needs multi-site correlators to be seen at all.
    """
    partition = tuple(sorted(partition, reverse=True))
    if sum(partition) != n_particles:
        raise ValueError(f"partition {partition} does not sum to {n_particles}")
    if len(partition) > spec.n_sites:
        raise ValueError(f"partition {partition} has more parts than sites")
    basis = enumerate_basis(spec.n_sites, n_particles)

    if mode == "hardcore_limit":
        witness_basis, H = hardcore_subspace_hamiltonian(spec, basis, partition)
        initials = list(range(len(witness_basis)))
        scale = _mean_offdiagonal(H)
    elif mode == "finite_U":
        H = build_hamiltonian(spec, basis)
        witness_basis = basis
        initials = basis.partition_indices(partition)
        scale = spec.mean_tunneling()
    else:
        raise ValueError(f"unknown mode {mode!r}")
    in_partition = set(initials)

    eigs = eigendecompose(H)
    if grid is None and scale > 0:
        grid = classification_grid(scale)

    witnesses = []
    any_frozen = False
    any_unreachable = False
    for a in initials:
        reach = unreachable_states(eigs, a, tol=tol)
        unreachable = [witness_basis.states[j] for j in reach.unreachable
                       if j in in_partition]
        if scale > 0:
            frozen = frozen_sites(eigs, witness_basis, a, grid, tol=tol)
        else:
            frozen = list(range(spec.n_sites))  # no dynamics at all
        if frozen:
            any_frozen = True
        if unreachable:
            any_unreachable = True
        witnesses.append(CagingWitness(
            witness_basis.states[a],
            tuple(unreachable),
            tuple(spec.labels[i] for i in frozen)))

    if any_frozen:
        cls = REAL_SPACE
    elif any_unreachable:
        cls = FOCK_SPACE
    else:
        cls = NOT_CAGED
    return CagingReport(n_particles, partition, mode, cls, tuple(witnesses))


def caged_partner(report: CagingReport, initial) -> tuple:
    """The unique state a Fock-caged initial state can never reach.

    Defined for witnesses with exactly one unreachable partition state; for
    the plaquette the partner is verified to be the 180-degree rotation
    image of the initial state, and a RuntimeError flags any violation.
    """
    initial = tuple(initial)
    for w in report.witnesses:
        if w.initial == initial:
            if len(w.unreachable) != 1:
                raise RuntimeError(
                    f"{initial} has {len(w.unreachable)} unreachable partners, "
                    "expected exactly one")
            partner = w.unreachable[0]
            if len(initial) == 4 and partner != rotation_image(initial):
                raise RuntimeError(
                    f"partner {partner} of {initial} is not its rotation image")
            return partner
    raise ValueError(f"{initial} is not a witness of this report")
