"""Bosonic Fock bases at fixed particle number.

States are occupation-number tuples over lattice sites.  A basis enumerates
every distribution of n particles over S sites, optionally with a per-site
occupation cap (cap 1 = hard-core bosons).  The canonical ordering is
lexicographically descending occupation vectors, so for a single particle
state i is the particle sitting on site i.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

FockState = tuple  # tuple[int, ...]
Partition = tuple  # tuple[int, ...], parts sorted descending


def partition_of(state: FockState) -> Partition:
    """Multiset of nonzero occupations, sorted descending: (2,0,1,0) -> (2,1)."""
    return tuple(sorted((o for o in state if o > 0), reverse=True))


def state_to_string(state: FockState) -> str:
    return ",".join(str(o) for o in state)


def state_from_string(text: str) -> FockState:
    try:
        occ = tuple(int(tok) for tok in text.split(","))
    except ValueError as exc:
        raise ValueError(f"bad occupation string {text!r}") from exc
    if any(o < 0 for o in occ):
        raise ValueError(f"negative occupation in {text!r}")
    return occ


@dataclass(frozen=True)
class FockBasis:
    """Ordered collection of Fock states over n_sites sites.

    n_particles is the common total of all states, or None for a basis that
    mixes particle-number sectors (used by the dissipative evolution, where
    decay connects sectors).  max_occ None means no per-site cap.
    """
    n_sites: int
    n_particles: int | None
    max_occ: int | None
    states: tuple
    _index: dict = field(repr=False, compare=False, default=None)

    def __post_init__(self):
        object.__setattr__(self, "_index", {s: i for i, s in enumerate(self.states)})

    def __len__(self) -> int:
        return len(self.states)

    def index(self, state: FockState) -> int:
        """Position of a state in the canonical order.  KeyError if absent."""
        return self._index[tuple(state)]

    def __contains__(self, state) -> bool:
        return tuple(state) in self._index

    def occupations(self) -> np.ndarray:
        """(n_states, n_sites) integer matrix of occupations."""
        return np.array(self.states, dtype=np.int64)

    def partition_indices(self, partition: Partition) -> list:
        """Indices of all states whose occupation multiset equals partition."""
        p = tuple(sorted(partition, reverse=True))
        return [i for i, s in enumerate(self.states) if partition_of(s) == p]

    def restricted(self, indices) -> "FockBasis":
        """Sub-basis containing only the given states, order preserved."""
        return FockBasis(self.n_sites, self.n_particles, self.max_occ,
                         tuple(self.states[i] for i in indices))

    def unit_state(self, state: FockState) -> np.ndarray:
        """Normalized amplitude vector concentrated on one Fock state."""
        psi = np.zeros(len(self.states), dtype=complex)
        psi[self.index(state)] = 1.0
        return psi


def basis_size(n_sites: int, n_particles: int, max_occ: int | None = None) -> int:
    """Number of basis states; stars-and-bars when no cap binds."""
    if max_occ is None or max_occ >= n_particles:
        return math.comb(n_particles + n_sites - 1, n_sites - 1)
    total = 0
    # inclusion-exclusion over sites forced above the cap
    for k in range(n_sites + 1):
        rem = n_particles - k * (max_occ + 1)
        if rem < 0:
            break
        total += (-1) ** k * math.comb(n_sites, k) * math.comb(rem + n_sites - 1, n_sites - 1)
    return total


def _enumerate(n_sites: int, n_particles: int, cap: int) -> list:
    states = []

    def rec(prefix, remaining, sites_left):
        if sites_left == 0:
            if remaining == 0:
                states.append(tuple(prefix))
            return
        lo = max(0, remaining - (sites_left - 1) * cap)
        hi = min(cap, remaining)
        for occ in range(hi, lo - 1, -1):
            prefix.append(occ)
            rec(prefix, remaining - occ, sites_left - 1)
            prefix.pop()

    rec([], n_particles, n_sites)
    return states


def enumerate_basis(n_sites: int, n_particles: int, max_occ: int | None = None) -> FockBasis:
    """All states of n_particles on n_sites, descending lexicographic order.

    max_occ caps each site (1 = hard-core); max_occ >= n_particles is
    equivalent to no cap.  Raises ValueError when the cap makes the particle
    number infeasible.
    """
    if n_sites < 1:
        raise ValueError("need at least one site")
    if n_particles < 0:
        raise ValueError("negative particle number")
    if max_occ is not None and max_occ < 0:
        raise ValueError("negative occupation cap")
    if max_occ is not None and n_particles > n_sites * max_occ:
        raise ValueError(
            f"{n_particles} particles do not fit on {n_sites} sites with cap {max_occ}")
    cap = n_particles if max_occ is None else min(max_occ, n_particles)
    states = _enumerate(n_sites, n_particles, cap)
    return FockBasis(n_sites, n_particles, max_occ, tuple(states))


def enumerate_sectors(n_sites: int, n_max: int, max_occ: int | None = None) -> FockBasis:
    """Union of all sectors with 0..n_max particles, descending lexicographic.

    This is the state space for dissipative evolution, where particle decay
    walks down through the sectors.
    """
    if n_max < 0:
        raise ValueError("negative particle number")
    states = []
    for n in range(n_max + 1):
        cap = n if max_occ is None else min(max_occ, n)
        if max_occ is not None and n > n_sites * max_occ:
            raise ValueError(
                f"{n} particles do not fit on {n_sites} sites with cap {max_occ}")
        states.extend(_enumerate(n_sites, n, cap))
    states.sort(reverse=True)
    return FockBasis(n_sites, None, max_occ, tuple(states))
