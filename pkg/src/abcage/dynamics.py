"""Closed- and open-system dynamics.

Unitary evolution goes through the eigendecomposition; evolve_bruteforce is
a deliberately independent cross-check that propagates with a scaled-and-
squared truncated exponential series and shares no code with the eigenbasis
path.

The dissipative model is a Lindblad master equation with per-site photon
decay (collapse b_i at rate 1/T1) and pure dephasing (collapse n_i at rate
2/Tphi, calibrated so a 0-1 coherence decays as exp(-t/Tphi)).  It is
integrated with fixed-step classical fourth-order Runge-Kutta on the
vectorized density matrix; for this linear autonomous system one RK4 step
is the constant matrix I + hL + (hL)^2/2 + (hL)^3/6 + (hL)^4/24, which is
precomputed and applied per step.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .fock import FockBasis, enumerate_sectors
from .lattice import LatticeSpec
from .hamiltonian import build_hamiltonian
from .spectral import Eigensystem, eigendecompose

NORM_TOL = 1e-8


def swap_time(spec: LatticeSpec) -> float:
    """Full-transfer time of the single-photon walk, 2*pi/(4*tbar) in us."""
    return 2.0 * np.pi / (4.0 * spec.mean_tunneling())


def doublon_swap_time(spec: LatticeSpec) -> float:
    """Swap time rescaled for pair motion: the bound pair tunnels at the
    second-order rate 2*tbar^2/|u|."""
    ubar = float(np.mean(np.abs(spec.u())))
    if ubar == 0:
        raise ValueError("doublon swap time needs a nonzero interaction")
    t_eff = 2.0 * spec.mean_tunneling() ** 2 / ubar
    return 2.0 * np.pi / (4.0 * t_eff)


def _check_normalized(psi: np.ndarray):
    nrm = np.linalg.norm(psi)
    if abs(nrm - 1.0) > NORM_TOL:
        raise ValueError(f"state is not normalized (norm {nrm})")


def evolve_state(eigs: Eigensystem, psi0, times) -> np.ndarray:
    """Amplitudes at the requested times, shape (n_times, dim).

    psi(t) = V exp(-i E t) V^dag psi0 with the eigendecomposition (V, E).
    """
    psi0 = np.asarray(psi0, dtype=complex)
    _check_normalized(psi0)
    times = np.atleast_1d(np.asarray(times, dtype=float))
    c = eigs.vectors.conj().T @ psi0
    phases = np.exp(-1j * np.outer(times, eigs.values))
    return (eigs.vectors @ (phases * c).T).T


def evolve_bruteforce(H: np.ndarray, psi0, t: float, order: int = 20,
                      theta: float = 0.5) -> np.ndarray:
    """Propagate psi0 by exp(-iHt) via a scaled-and-squared Taylor series.

    Independent of the eigendecomposition path; used as its oracle.  The
    generator is scaled by 2^-s until its infinity norm is below theta, the
    series is summed to the given order, and the propagator squared back up.
    Raises RuntimeError if the truncated series has not converged.
    """
    psi0 = np.asarray(psi0, dtype=complex)
    _check_normalized(psi0)
    A = -1j * np.asarray(H) * float(t)
    norm = np.abs(A).sum(axis=1).max() if A.size else 0.0
    s = 0
    if norm > theta:
        s = int(math.ceil(math.log2(norm / theta)))
        if s > 64:
            raise RuntimeError(f"||H||*t = {norm:.3e} too large to scale down")
        A = A / (2.0 ** s)
    d = A.shape[0]
    U = np.eye(d, dtype=complex)
    term = np.eye(d, dtype=complex)
    for k in range(1, order + 1):
        term = term @ A / k
        U = U + term
    tail = np.abs(term).max() * np.abs(A).sum(axis=1).max() / (order + 1)
    if tail > 1e-13:
        raise RuntimeError(
            f"series not converged at order {order} (tail estimate {tail:.3e})")
    for _ in range(s):
        U = U @ U
    return U @ psi0


# ---------------------------------------------------------------------------
# observables

def site_occupation(amps: np.ndarray, basis: FockBasis) -> np.ndarray:
    """<n_i> for amplitude vectors; amps shape (..., dim) -> (..., n_sites)."""
    probs = np.abs(np.asarray(amps)) ** 2
    return probs @ basis.occupations()


def level_probability(amps: np.ndarray, basis: FockBasis, site: int,
                      level: int) -> np.ndarray:
    """P(n_site = level) for amplitude vectors, shape (...,)."""
    mask = basis.occupations()[:, site] == level
    probs = np.abs(np.asarray(amps)) ** 2
    return probs @ mask.astype(float)


def pair_probability(amps: np.ndarray, basis: FockBasis, site_a: int,
                     site_b: int, levels=(1, 1)) -> np.ndarray:
    """P(n_a = levels[0] and n_b = levels[1]) for amplitude vectors."""
    occ = basis.occupations()
    mask = (occ[:, site_a] == levels[0]) & (occ[:, site_b] == levels[1])
    probs = np.abs(np.asarray(amps)) ** 2
    return probs @ mask.astype(float)


def _diag_from_rho(rhos: np.ndarray) -> np.ndarray:
    return np.real(np.einsum("...ii->...i", rhos))


def site_occupation_rho(rhos, basis):
    return _diag_from_rho(rhos) @ basis.occupations()


def level_probability_rho(rhos, basis, site, level):
    mask = (basis.occupations()[:, site] == level).astype(float)
    return _diag_from_rho(rhos) @ mask


def pair_probability_rho(rhos, basis, site_a, site_b, levels=(1, 1)):
    occ = basis.occupations()
    mask = ((occ[:, site_a] == levels[0]) & (occ[:, site_b] == levels[1])).astype(float)
    return _diag_from_rho(rhos) @ mask


# ---------------------------------------------------------------------------
# time series container

@dataclass
class EvolutionResult:
    """Named observable time series on a common grid.

    columns maps names like "n_L", "P1_T", "P2_R", "PP_L_R" to arrays with
    the same length as times_us.  tau_swap is the single-photon swap time of
    the lattice that produced the series; the CSV form carries time both in
    us and in swap-time units.
    """
    times_us: np.ndarray
    tau_swap: float
    columns: dict
    meta: dict = field(default_factory=dict)
    states: np.ndarray | None = None

    def column_names(self) -> list:
        return list(self.columns.keys())

    def header(self) -> list:
        return ["time_us", "time_swap"] + self.column_names()

    def rows(self):
        names = self.column_names()
        for k, t in enumerate(self.times_us):
            yield [t, t / self.tau_swap] + [float(self.columns[c][k]) for c in names]


def _observable_columns(basis: FockBasis, labels, observables, pairs):
    """Plan of (column_name, kind, args) for the requested observables."""
    plan = []
    max_n = max(max(s) for s in basis.states) if len(basis) else 0
    for kind in observables:
        if kind == "n":
            for i, lbl in enumerate(labels):
                plan.append((f"n_{lbl}", "n", (i,)))
        elif kind == "P1":
            for i, lbl in enumerate(labels):
                plan.append((f"P1_{lbl}", "level", (i, 1)))
        elif kind == "P2":
            if max_n < 2:
                continue
            for i, lbl in enumerate(labels):
                plan.append((f"P2_{lbl}", "level", (i, 2)))
        elif kind == "PP":
            for (la, lb) in pairs or ():
                ia, ib = labels.index(la), labels.index(lb)
                plan.append((f"PP_{la}_{lb}", "pair", (ia, ib)))
        else:
            raise ValueError(f"unknown observable kind {kind!r}")
    return plan


def run_walk(spec: LatticeSpec, basis: FockBasis, psi0, times,
             observables=("n", "P1", "P2"), pairs=None,
             keep_states: bool = False) -> EvolutionResult:
    """Unitary quantum walk: evolve psi0 and evaluate standard observables."""
    H = build_hamiltonian(spec, basis)
    eigs = eigendecompose(H)
    amps = evolve_state(eigs, psi0, times)
    labels = spec.labels
    cols = {}
    for (name, kind, args) in _observable_columns(basis, labels, observables, pairs):
        if kind == "n":
            cols[name] = site_occupation(amps, basis)[:, args[0]]
        elif kind == "level":
            cols[name] = level_probability(amps, basis, *args)
        else:
            cols[name] = pair_probability(amps, basis, *args)
    return EvolutionResult(np.asarray(times, dtype=float), swap_time(spec), cols,
                           states=amps if keep_states else None)


# ---------------------------------------------------------------------------
# Lindblad master equation

@dataclass(frozen=True)
class NoiseParams:
    """Per-site decoherence times in us.

    t1_01: decay time of the 0-1 transition (scalar or per site).
    tphi: pure dephasing time of the 0-1 coherence.
    t1_12: optional separately measured 1-2 decay time.  When absent, a
    single collapse operator b_i per site is used, which makes the 2->1
    decay rate exactly twice the 1->0 rate.  When present, level-resolved
    collapse channels |0><1| and |1><2| are used instead so both measured
    rates are honored.
    """
    t1_01: object
    tphi: object
    t1_12: object = None

    def per_site(self, values, n_sites: int) -> np.ndarray:
        arr = np.asarray(values, dtype=float)
        if arr.ndim == 0:
            arr = np.full(n_sites, float(arr))
        if arr.shape != (n_sites,):
            raise ValueError(f"expected scalar or {n_sites} values, got {arr.shape}")
        if np.any(arr <= 0):
            raise ValueError("decoherence times must be positive")
        return arr


def annihilation_operators(basis: FockBasis) -> list:
    """Matrices of b_i on a basis that spans adjacent particle sectors."""
    ops = []
    d = len(basis)
    for i in range(basis.n_sites):
        B = np.zeros((d, d))
        for a, s in enumerate(basis.states):
            if s[i] > 0:
                moved = list(s)
                moved[i] -= 1
                moved = tuple(moved)
                if moved in basis:
                    B[basis.index(moved), a] = math.sqrt(s[i])
        ops.append(B)
    return ops


def level_collapse_operator(basis: FockBasis, site: int, upper: int) -> np.ndarray:
    """Unit-amplitude collapse |upper-1><upper| on one site."""
    d = len(basis)
    L = np.zeros((d, d))
    for a, s in enumerate(basis.states):
        if s[site] == upper:
            moved = list(s)
            moved[site] -= 1
            moved = tuple(moved)
            if moved in basis:
                L[basis.index(moved), a] = 1.0
    return L


def _liouvillian(H: np.ndarray, collapse) -> np.ndarray:
    """Vectorized generator: rho-flat evolves as drho/dt = L rho."""
    d = H.shape[0]
    eye = np.eye(d)
    L = -1j * (np.kron(eye, H) - np.kron(H.T, eye))
    for (op, rate) in collapse:
        opd_op = op.conj().T @ op
        L = L + rate * (np.kron(op.conj(), op)
                        - 0.5 * np.kron(eye, opd_op)
                        - 0.5 * np.kron(opd_op.T, eye))
    return L


def _rk4_step_matrix(L: np.ndarray, h: float) -> np.ndarray:
    d2 = L.shape[0]
    P = np.eye(d2, dtype=complex)
    term = np.eye(d2, dtype=complex)
    for k in range(1, 5):
        term = term @ (h * L) / k
        P = P + term
    return P


def _collapse_list(spec: LatticeSpec, basis: FockBasis, noise: NoiseParams):
    n = spec.n_sites
    t1 = noise.per_site(noise.t1_01, n)
    tphi = noise.per_site(noise.tphi, n)
    bops = annihilation_operators(basis)
    collapse = []
    if noise.t1_12 is None:
        for i in range(n):
            collapse.append((bops[i], 1.0 / t1[i]))
    else:
        t112 = noise.per_site(noise.t1_12, n)
        max_occ = max(max(s) for s in basis.states)
        if max_occ > 2:
            raise ValueError("level-resolved decay is defined up to occupation 2")
        for i in range(n):
            collapse.append((level_collapse_operator(basis, i, 1), 1.0 / t1[i]))
            if max_occ >= 2:
                collapse.append((level_collapse_operator(basis, i, 2), 1.0 / t112[i]))
    for i in range(n):
        nop = bops[i].T @ bops[i]
        collapse.append((nop, 2.0 / tphi[i]))
    return collapse


def _validate_rho(rho: np.ndarray, tol: float = 1e-9):
    if rho.ndim != 2 or rho.shape[0] != rho.shape[1]:
        raise ValueError("density matrix must be square")
    if abs(np.trace(rho) - 1.0) > 1e-6:
        raise ValueError(f"density matrix trace is {np.trace(rho)}")
    if np.abs(rho - rho.conj().T).max() > 1e-9 * max(1.0, np.abs(rho).max()):
        raise ValueError("density matrix is not Hermitian")
    evals = np.linalg.eigvalsh((rho + rho.conj().T) / 2)
    if evals.min() < -1e-6:
        raise ValueError(f"density matrix has negative eigenvalue {evals.min()}")


def default_lindblad_dt(spec: LatticeSpec, H: np.ndarray, noise: NoiseParams) -> float:
    """Fixed RK4 step: resolve the swap time, the shortest noise time and,
    for interaction-dominated spectra, the largest energy scale."""
    n = spec.n_sites
    tmin = float(min(noise.per_site(noise.t1_01, n).min(),
                     noise.per_site(noise.tphi, n).min(),
                     noise.per_site(noise.t1_12, n).min()
                     if noise.t1_12 is not None else np.inf))
    hnorm = np.abs(H).sum(axis=1).max()
    dt = tmin / 1000.0
    if spec.bonds and spec.mean_tunneling() > 0:
        dt = min(dt, swap_time(spec) / 200.0)
    if hnorm > 0:
        dt = min(dt, 0.02 / hnorm)
    return dt


def lindblad_evolve(spec: LatticeSpec, basis: FockBasis, rho0, times,
                    noise: NoiseParams, dt: float | None = None,
                    check: bool = True, check_tol: float = 1e-5) -> np.ndarray:
    """Density matrices at the requested times, shape (n_times, d, d).

    basis must span all particle sectors the decay cascade can reach (use
    fock.enumerate_sectors).  On-site frequencies are shifted by their mean
    before integration; every Lindblad observable is invariant under that
    uniform shift and the integrator step can stay large.  When check is
    true the grid is also integrated at half step and the runs must agree
    within check_tol, otherwise RuntimeError.
    """
    rho0 = np.asarray(rho0, dtype=complex)
    if rho0.shape != (len(basis), len(basis)):
        raise ValueError("density matrix does not match the basis")
    _validate_rho(rho0)
    times = np.asarray(times, dtype=float)
    if times.ndim != 1 or len(times) < 2 or np.any(np.diff(times) <= 0):
        raise ValueError("times must be strictly increasing with >= 2 points")

    omega = spec.omega()
    shifted = spec.with_detuning({i: -float(np.mean(omega)) for i in range(spec.n_sites)})
    H = build_hamiltonian(shifted, basis)
    collapse = _collapse_list(spec, basis, noise)
    L = _liouvillian(H, collapse)
    if dt is None:
        dt = default_lindblad_dt(spec, H, noise)

    def integrate(step):
        d = len(basis)
        v = rho0.reshape(-1).copy()
        out = np.empty((len(times), d * d), dtype=complex)
        steppers = {}
        t = times[0]
        out[0] = v
        for k, tk in enumerate(times[1:], start=1):
            span = tk - t
            nsteps = max(1, int(math.ceil(span / step - 1e-12)))
            h = span / nsteps
            key = round(h, 15)
            if key not in steppers:
                steppers[key] = _rk4_step_matrix(L, h)
            P = steppers[key]
            for _ in range(nsteps):
                v = P @ v
            t = tk
            out[k] = v
        return out.reshape(len(times), d, d)

    rhos = integrate(dt)
    if check:
        rhos_half = integrate(dt / 2.0)
        dev = np.abs(rhos - rhos_half).max()
        if dev > check_tol:
            raise RuntimeError(
                f"RK4 step-halving check failed: deviation {dev:.3e} at dt={dt:.3e}")
    return rhos


def run_lindblad_walk(spec: LatticeSpec, n_particles: int, initial_state,
                      times, noise: NoiseParams, max_occ: int | None = None,
                      observables=("n", "P1", "P2"), pairs=None,
                      dt: float | None = None, check: bool = True,
                      keep_states: bool = False) -> EvolutionResult:
    """Dissipative quantum walk from a Fock product state."""
    basis = enumerate_sectors(spec.n_sites, n_particles, max_occ)
    rho0 = np.zeros((len(basis), len(basis)), dtype=complex)
    i0 = basis.index(tuple(initial_state))
    rho0[i0, i0] = 1.0
    rhos = lindblad_evolve(spec, basis, rho0, times, noise, dt=dt, check=check)
    labels = spec.labels
    cols = {}
    for (name, kind, args) in _observable_columns(basis, labels, observables, pairs):
        if kind == "n":
            cols[name] = site_occupation_rho(rhos, basis)[:, args[0]]
        elif kind == "level":
            cols[name] = level_probability_rho(rhos, basis, *args)
        else:
            cols[name] = pair_probability_rho(rhos, basis, *args)
    return EvolutionResult(np.asarray(times, dtype=float), swap_time(spec), cols,
                           states=rhos if keep_states else None)


def two_site_envelope(times, t: float, t1_left: float, t1_right: float,
                      tphi: float) -> np.ndarray:
    """Analytic initial-site population of a lossy two-site exchange.

    P(tau) = 1/2 cos(2 t tau) exp(-tau/2T1L - tau/2T1R - tau/Tphi)
           + 1/2 exp(-tau/2T1L - tau/2T1R)

    with both sites assumed to share the dephasing time Tphi.  Valid for a
    single excitation when 2t is large against the decoherence rates.
    """
    times = np.asarray(times, dtype=float)
    decay = np.exp(-times / (2 * t1_left) - times / (2 * t1_right))
    return 0.5 * np.cos(2 * t * times) * decay * np.exp(-times / tphi) + 0.5 * decay
