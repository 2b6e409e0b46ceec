import math

import numpy as np
import pytest

from abcage.caging import (FOCK_SPACE, NOT_CAGED, REAL_SPACE, caged_partner,
                           classification_grid, classify_partition,
                           frozen_sites, hardcore_subspace_hamiltonian,
                           integer_partitions, unreachable_states)
from abcage.fock import enumerate_basis
from abcage.hamiltonian import build_hamiltonian
from abcage.lattice import plaquette, rotation_image
from abcage.spectral import eigendecompose

T = 2 * math.pi * 11.66
U = -13.5 * T


def single_particle_eigs(flux):
    spec = plaquette(T, flux=flux)
    basis = enumerate_basis(4, 1)
    return spec, basis, eigendecompose(build_hamiltonian(spec, basis))


# ---------------------------------------------------------------------------
# partitions

def test_integer_partitions():
    assert integer_partitions(3) == [(3,), (2, 1), (1, 1, 1)]
    assert len(integer_partitions(5)) == 7
    assert integer_partitions(5, max_parts=2) == [(5,), (4, 1), (3, 2)]
    for p in integer_partitions(6):
        assert sum(p) == 6
        assert list(p) == sorted(p, reverse=True)
    with pytest.raises(ValueError):
        integer_partitions(0)


# ---------------------------------------------------------------------------
# reachability and frozen sites

def test_unreachable_opposite_corner_at_pi_flux():
    spec, basis, eigs = single_particle_eigs(math.pi)
    res = unreachable_states(eigs, basis.index((1, 0, 0, 0)))
    assert basis.index((0, 0, 0, 1)) in res.unreachable
    assert basis.index((0, 1, 0, 0)) not in res.unreachable
    assert res.amplitudes[basis.index((0, 0, 0, 1))] < 1e-12


def test_everything_reachable_at_zero_flux():
    spec, basis, eigs = single_particle_eigs(0.0)
    res = unreachable_states(eigs, basis.index((1, 0, 0, 0)))
    assert res.unreachable == ()


def test_unreachable_rejects_bad_index():
    spec, basis, eigs = single_particle_eigs(math.pi)
    with pytest.raises(ValueError):
        unreachable_states(eigs, 4)


def test_frozen_site_is_the_opposite_corner():
    spec, basis, eigs = single_particle_eigs(math.pi)
    grid = classification_grid(T)
    frozen = frozen_sites(eigs, basis, basis.index((1, 0, 0, 0)), grid)
    assert frozen == [3]
    spec0, basis0, eigs0 = single_particle_eigs(0.0)
    assert frozen_sites(eigs0, basis0, basis0.index((1, 0, 0, 0)), grid) == []


def test_frozen_sites_demands_a_long_grid():
    spec, basis, eigs = single_particle_eigs(math.pi)
    with pytest.raises(ValueError):
        frozen_sites(eigs, basis, 0, np.linspace(0.0, 1.0, 50))


def test_classification_grid():
    grid = classification_grid(T)
    assert len(grid) == 401
    assert grid[0] == 0.0
    assert grid[-1] == pytest.approx(20 * 2 * np.pi / (4 * T))
    with pytest.raises(ValueError):
        classification_grid(0.0)


# ---------------------------------------------------------------------------
# hard-core-limit effective model

def test_pair_subspace_sees_zero_flux():
    # the bound pair hops at 2 t^2 / u with the squared bond sign, so the
    # pi-flux sign pattern cancels out of its effective ring
    spec = plaquette(T, flux=math.pi, u=U)
    basis = enumerate_basis(4, 2)
    sub, H = hardcore_subspace_hamiltonian(spec, basis, (2,))
    assert sub.states == ((2, 0, 0, 0), (0, 2, 0, 0), (0, 0, 2, 0), (0, 0, 0, 2))
    J = 2 * T**2 / U
    want = np.zeros((4, 4))
    for a, b in ((0, 1), (0, 2), (3, 1), (3, 2)):
        want[a, b] = want[b, a] = J
    assert np.allclose(H, want, atol=1e-9 * abs(J))


def test_single_hop_block_matches_projected_hamiltonian():
    spec = plaquette((T, 1.1 * T, 0.9 * T, 1.2 * T), flux=math.pi, u=U)
    basis = enumerate_basis(4, 2)
    sub, H = hardcore_subspace_hamiltonian(spec, basis, (1, 1))
    full = build_hamiltonian(spec, basis)
    idx = basis.partition_indices((1, 1))
    block = full[np.ix_(idx, idx)]
    np.fill_diagonal(block, 0.0)
    assert np.allclose(H, block, atol=1e-9 * T)


def test_stack_transfer_needs_interaction():
    spec = plaquette(T, flux=math.pi)
    basis = enumerate_basis(4, 2)
    with pytest.raises(ValueError):
        hardcore_subspace_hamiltonian(spec, basis, (2,))
    with pytest.raises(ValueError):
        hardcore_subspace_hamiltonian(spec, basis, (3,))


# ---------------------------------------------------------------------------
# classification

def test_pi_flux_classification_low_n():
    spec = plaquette(T, flux=math.pi, u=U)
    want = {
        (1, (1,)): REAL_SPACE,
        (2, (1, 1)): FOCK_SPACE,
        (2, (2,)): NOT_CAGED,
        (3, (1, 1, 1)): REAL_SPACE,
        (3, (2, 1)): FOCK_SPACE,
        (3, (3,)): REAL_SPACE,
        (4, (2, 2)): NOT_CAGED,
        (5, (3, 2)): FOCK_SPACE,
    }
    for (n, partition), cls in want.items():
        report = classify_partition(spec, n, partition)
        assert report.classification == cls, (n, partition)


def test_zero_flux_cages_nothing_but_the_full_mott_state():
    spec = plaquette(T, flux=0.0, u=U)
    for n in range(1, 5):
        for partition in integer_partitions(n, max_parts=4):
            cls = classify_partition(spec, n, partition).classification
            if partition == (1, 1, 1, 1):
                assert cls == REAL_SPACE  # single state, nothing can move
            else:
                assert cls == NOT_CAGED, (n, partition)


def test_fock_caged_partner_is_the_rotation_image():
    spec = plaquette(T, flux=math.pi, u=U)
    report = classify_partition(spec, 3, (2, 1))
    assert report.classification == FOCK_SPACE
    assert len(report.witnesses) == 12
    for w in report.witnesses:
        assert caged_partner(report, w.initial) == rotation_image(w.initial)


def test_caged_partner_error_paths():
    spec = plaquette(T, flux=0.0, u=U)
    report = classify_partition(spec, 2, (1, 1))
    with pytest.raises(RuntimeError):
        caged_partner(report, (1, 1, 0, 0))  # nothing unreachable at zero flux
    with pytest.raises(ValueError):
        caged_partner(report, (2, 0, 0, 0))  # not a witness of this partition


def test_finite_u_mode_agrees_for_hardcore_photons():
    spec = plaquette(T, flux=math.pi, u=U)
    report = classify_partition(spec, 2, (1, 1), mode="finite_U")
    assert report.classification == FOCK_SPACE
    report0 = classify_partition(plaquette(T, flux=0.0, u=U), 2, (1, 1),
                                 mode="finite_U")
    assert report0.classification == NOT_CAGED


def test_classify_validation():
    spec = plaquette(T, flux=math.pi, u=U)
    with pytest.raises(ValueError):
        classify_partition(spec, 2, (1, 1), mode="bogus")
    with pytest.raises(ValueError):
        classify_partition(spec, 3, (1, 1))  # sum mismatch
    with pytest.raises(ValueError):
        classify_partition(spec, 5, (1, 1, 1, 1, 1))  # more parts than sites


def test_report_to_dict_shape():
    spec = plaquette(T, flux=math.pi, u=U)
    report = classify_partition(spec, 2, (1, 1))
    d = report.to_dict()
    assert d["n"] == 2 and d["partition"] == [1, 1]
    assert d["classification"] == FOCK_SPACE
    assert len(d["witnesses"]) == 6
    w = d["witnesses"][0]
    assert set(w) == {"initial", "unreachable", "frozen_sites"}
    assert isinstance(w["initial"], str)
