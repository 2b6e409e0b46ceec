"""Bose-Hubbard Hamiltonians on a fixed Fock basis.

H = -sum_<i,j> t_ij (b_i^dag b_j + b_j^dag b_i)
    + sum_i [ omega_i n_i + (u_i/2) n_i (n_i - 1) ]

built by applying hop moves to each basis state and looking the image up in
the canonical ordering (not by assembling site operators).  A hop whose
image state is absent from the basis (occupation-cap projection) simply
contributes nothing, which is exactly the hard-core projection semantics.
"""
from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .fock import FockBasis, state_to_string
from .lattice import LatticeSpec


def build_hamiltonian(spec: LatticeSpec, basis: FockBasis) -> np.ndarray:
    """Dense real Hamiltonian matrix in the given basis (rad/us)."""
    if basis.n_sites != spec.n_sites:
        raise ValueError(
            f"basis has {basis.n_sites} sites but lattice has {spec.n_sites}")
    omega = spec.omega()
    u = spec.u()
    d = len(basis)
    H = np.zeros((d, d))
    occ = basis.occupations()
    H[np.arange(d), np.arange(d)] = occ @ omega + 0.5 * (occ * (occ - 1)) @ u
    for a, s in enumerate(basis.states):
        for b in spec.bonds:
            for (src, dst) in ((b.j, b.i), (b.i, b.j)):
                if s[src] == 0:
                    continue
                moved = list(s)
                moved[src] -= 1
                moved[dst] += 1
                moved = tuple(moved)
                if moved in basis:
                    amp = -b.t * math.sqrt(s[src] * (s[dst] + 1))
                    H[basis.index(moved), a] += amp
    return H


def project_subspace(H: np.ndarray, indices) -> np.ndarray:
    """Submatrix of H on the given basis indices (order preserved)."""
    idx = np.asarray(indices, dtype=np.intp)
    return H[np.ix_(idx, idx)]


@dataclass(frozen=True)
class AdjacencyGraph:
    """Fock-space connectivity: nodes are basis states, edges the nonzero
    off-diagonal Hamiltonian elements (weights in rad/us)."""
    labels: tuple          # "occ=2,0,1,0" per node
    edges: tuple           # (a, b, weight) with a < b

    @property
    def n_nodes(self) -> int:
        return len(self.labels)

    def to_edge_list(self) -> str:
        """Plain-text edge list: one "node_a node_b weight" line per edge."""
        lines = [f"# nodes {self.n_nodes}"]
        for i, lbl in enumerate(self.labels):
            lines.append(f"# node {i} {lbl}")
        for (a, b, w) in self.edges:
            lines.append(f"{a} {b} {w:.12g}")
        return "\n".join(lines) + "\n"


def adjacency_graph(H: np.ndarray, basis: FockBasis, indices=None,
                    tol: float = 1e-12) -> AdjacencyGraph:
    """Graph of the off-diagonal structure of H over basis (or a subset).

    indices restricts the graph to a state subset, e.g. one interaction
    partition; weights below tol (relative to the largest) are dropped.
    """
    if indices is None:
        indices = range(len(basis))
    indices = list(indices)
    sub = H[np.ix_(indices, indices)]
    scale = np.abs(sub).max()
    cut = tol * (scale if scale > 0 else 1.0)
    labels = tuple("occ=" + state_to_string(basis.states[i]) for i in indices)
    edges = []
    m = len(indices)
    for a in range(m):
        for b in range(a + 1, m):
            if abs(sub[a, b]) > cut:
                edges.append((a, b, float(sub[a, b])))
    return AdjacencyGraph(labels, tuple(edges))
