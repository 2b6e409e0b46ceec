"""Tight-binding lattice descriptions with signed tunneling rates.

A synthetic gauge flux through a plaquette is encoded in the signs of the
bond tunnelings: the flux through a closed loop is 0 when the product of
bond signs around the loop is positive and pi when it is negative.  Only
these two values are representable here; arbitrary complex hopping phases
appear in the Bloch-band computation alone (see spectral.bloch_bands).

The four-site rhombus (diamond) plaquette uses site order L, T, B, R with
bonds L-T, L-B, R-T, R-B.  The pi-flux convention places the sign flip on
the R-T bond; any other single-bond placement is gauge equivalent.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, replace

import numpy as np

PLAQUETTE_LABELS = ("L", "T", "B", "R")
# 180-degree rotation of the plaquette: L<->R, T<->B
PLAQUETTE_ROTATION = (3, 2, 1, 0)
# the single closed loop of the plaquette, as a site cycle
PLAQUETTE_LOOP = (0, 1, 3, 2)


@dataclass(frozen=True)
class SiteParams:
    """One lattice site: label, on-site frequency and interaction (rad/us)."""
    label: str
    omega: float = 0.0
    u: float = 0.0


@dataclass(frozen=True)
class Bond:
    """Signed tunneling t between sites i and j.

    The Hamiltonian hop term is -t (b_i^dag b_j + b_j^dag b_i); a negative t
    therefore realizes a pi hopping phase on this bond.
    """
    i: int
    j: int
    t: float


@dataclass(frozen=True)
class LatticeSpec:
    sites: tuple  # tuple[SiteParams, ...]
    bonds: tuple  # tuple[Bond, ...]

    def __post_init__(self):
        n = len(self.sites)
        seen = set()
        for b in self.bonds:
            if not (0 <= b.i < n and 0 <= b.j < n):
                raise ValueError(f"bond {b} references a missing site")
            if b.i == b.j:
                raise ValueError(f"bond {b} is a self-loop")
            key = frozenset((b.i, b.j))
            if key in seen:
                raise ValueError(f"duplicate bond between sites {b.i} and {b.j}")
            seen.add(key)

    @property
    def n_sites(self) -> int:
        return len(self.sites)

    @property
    def labels(self) -> tuple:
        return tuple(s.label for s in self.sites)

    def omega(self) -> np.ndarray:
        return np.array([s.omega for s in self.sites])

    def u(self) -> np.ndarray:
        return np.array([s.u for s in self.sites])

    def site_index(self, label: str) -> int:
        try:
            return self.labels.index(label)
        except ValueError as exc:
            raise ValueError(f"no site labeled {label!r}") from exc

    def bond_map(self) -> dict:
        """(i, j) -> t for both orientations of every bond."""
        out = {}
        for b in self.bonds:
            out[(b.i, b.j)] = b.t
            out[(b.j, b.i)] = b.t
        return out

    def is_connected(self) -> bool:
        if self.n_sites == 0:
            return False
        adj = {i: set() for i in range(self.n_sites)}
        for b in self.bonds:
            adj[b.i].add(b.j)
            adj[b.j].add(b.i)
        seen = {0}
        stack = [0]
        while stack:
            for nb in adj[stack.pop()]:
                if nb not in seen:
                    seen.add(nb)
                    stack.append(nb)
        return len(seen) == self.n_sites

    def mean_tunneling(self) -> float:
        """Mean magnitude of the bond tunnelings (rad/us)."""
        return float(np.mean([abs(b.t) for b in self.bonds]))

    def with_detuning(self, offsets: dict) -> "LatticeSpec":
        """New spec with omega shifted per site; keys are labels or indices."""
        shift = np.zeros(self.n_sites)
        for key, val in offsets.items():
            idx = key if isinstance(key, int) else self.site_index(key)
            shift[idx] += val
        sites = tuple(replace(s, omega=s.omega + d) for s, d in zip(self.sites, shift))
        return LatticeSpec(sites, self.bonds)


def _check_flux(flux: float) -> bool:
    """True for pi flux, False for zero; other values are not representable."""
    if abs(flux) < 1e-12:
        return False
    if abs(abs(flux) - math.pi) < 1e-12:
        return True
    raise ValueError(f"flux must be 0 or pi (sign-representable), got {flux}")


def plaquette(tunnelings, flux: float = 0.0, omega: float = 0.0,
              u: float = 0.0) -> LatticeSpec:
    """Four-site rhombus plaquette, sites L, T, B, R.

    tunnelings: scalar or (t_LT, t_LB, t_RT, t_RB) magnitudes in rad/us,
    all positive.  flux 0 or pi; pi makes the R-T bond tunneling negative.
    omega and u apply uniformly to all sites.
    """
    if np.isscalar(tunnelings):
        tunnelings = (tunnelings,) * 4
    t_lt, t_lb, t_rt, t_rb = (float(t) for t in tunnelings)
    for t in (t_lt, t_lb, t_rt, t_rb):
        if t <= 0:
            raise ValueError("tunneling magnitudes must be positive; "
                             "flux sets the sign structure")
    if _check_flux(flux):
        t_rt = -t_rt
    sites = tuple(SiteParams(lbl, omega, u) for lbl in PLAQUETTE_LABELS)
    bonds = (Bond(0, 1, t_lt), Bond(0, 2, t_lb), Bond(3, 1, t_rt), Bond(3, 2, t_rb))
    return LatticeSpec(sites, bonds)


def rhombus_chain(n_plaquettes: int, tunnelings, flux: float = 0.0,
                  omega: float = 0.0, u: float = 0.0) -> LatticeSpec:
    """Chain of corner-sharing rhombi; plaquette k+1 reuses plaquette k's
    right spinal site as its left one.

    Sites are ordered S0, T1, B1, S1, T2, B2, S2, ...: 3P+1 sites and 4P
    bonds for P plaquettes.  With pi flux every plaquette gets one negative
    bond, on its right-spinal-to-top analog of the single-plaquette R-T bond.
    """
    if n_plaquettes < 1:
        raise ValueError("need at least one plaquette")
    if np.isscalar(tunnelings):
        tunnelings = (tunnelings,) * 4
    t_lt, t_lb, t_rt, t_rb = (float(t) for t in tunnelings)
    for t in (t_lt, t_lb, t_rt, t_rb):
        if t <= 0:
            raise ValueError("tunneling magnitudes must be positive")
    negate = _check_flux(flux)
    sites = [SiteParams("S0", omega, u)]
    bonds = []
    for k in range(n_plaquettes):
        left = 3 * k
        top, bottom, right = left + 1, left + 2, left + 3
        sites.append(SiteParams(f"T{k + 1}", omega, u))
        sites.append(SiteParams(f"B{k + 1}", omega, u))
        sites.append(SiteParams(f"S{k + 1}", omega, u))
        rt = -t_rt if negate else t_rt
        bonds += [Bond(left, top, t_lt), Bond(left, bottom, t_lb),
                  Bond(right, top, rt), Bond(right, bottom, t_rb)]
    spec = LatticeSpec(tuple(sites), tuple(bonds))
    assert spec.is_connected()
    return spec


def chain_plaquette_loop(k: int):
    """Site cycle of plaquette k (0-based) in a rhombus chain."""
    left = 3 * k
    return (left, left + 1, left + 3, left + 2)


def loop_flux(spec: LatticeSpec, cycle) -> float:
    """Flux through a closed loop of sites: 0.0 or pi.

    cycle lists sites in order; consecutive sites (wrapping around) must be
    bonded.  The flux is read off the product of bond signs.
    """
    bm = spec.bond_map()
    sign = 1.0
    m = len(cycle)
    if m < 3:
        raise ValueError("a loop needs at least three sites")
    for a in range(m):
        i, j = cycle[a], cycle[(a + 1) % m]
        if (i, j) not in bm:
            raise ValueError(f"sites {i} and {j} are not bonded")
        sign *= math.copysign(1.0, bm[(i, j)])
    return 0.0 if sign > 0 else math.pi


def gauge_transform(spec: LatticeSpec, site: int) -> LatticeSpec:
    """Flip the sign of every bond touching the given site.

    This is the local gauge freedom b_site -> -b_site: all loop fluxes and
    all spectra are invariant; Fock-space Hamiltonians transform by the
    diagonal sign matrix (-1)^(n_site).
    """
    if not (0 <= site < spec.n_sites):
        raise ValueError(f"no site {site}")
    bonds = tuple(
        Bond(b.i, b.j, -b.t) if site in (b.i, b.j) else b for b in spec.bonds)
    return LatticeSpec(spec.sites, bonds)


def rotation_image(state) -> tuple:
    """Occupations after rotating the plaquette by 180 degrees (L<->R, T<->B)."""
    if len(state) != 4:
        raise ValueError("rotation image is defined for the 4-site plaquette")
    return tuple(state[p] for p in PLAQUETTE_ROTATION)
