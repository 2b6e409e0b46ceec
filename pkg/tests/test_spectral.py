import math

import numpy as np
import pytest

from abcage.fock import enumerate_basis
from abcage.hamiltonian import build_hamiltonian
from abcage.lattice import Bond, LatticeSpec, SiteParams, plaquette, rhombus_chain
from abcage.spectral import (bloch_bands, eigendecompose, eigenenergy_groups,
                             flatness, spectroscopy_lines, verify_cls)

T = 2 * math.pi * 11.66


def test_eigendecompose_sorted_and_consistent():
    spec = plaquette(T, flux=math.pi)
    H = build_hamiltonian(spec, enumerate_basis(4, 1))
    eig = eigendecompose(H)
    assert np.all(np.diff(eig.values) >= 0)
    recon = eig.vectors @ np.diag(eig.values) @ eig.vectors.conj().T
    assert np.abs(recon - H).max() < 1e-10 * np.abs(H).max()


def test_eigendecompose_rejects_nonhermitian():
    with pytest.raises(ValueError):
        eigendecompose(np.array([[0.0, 1.0], [0.5, 0.0]]))


def test_degenerate_groups():
    spec = plaquette(T, flux=math.pi)
    eig = eigendecompose(build_hamiltonian(spec, enumerate_basis(4, 1)))
    groups = eig.groups()
    assert [len(g) for g in groups] == [2, 2]


def test_spectroscopy_lines_decoupled_sites():
    omega = 2 * math.pi * 4.0
    sites = tuple(SiteParams(lbl, omega) for lbl in "LTBR")
    bonds = (Bond(0, 1, 0.0), Bond(0, 2, 0.0), Bond(3, 1, 0.0),
             Bond(3, 2, 0.0))
    spec = LatticeSpec(sites, bonds)
    lines = spectroscopy_lines(spec, 1)
    assert np.allclose(lines, omega, atol=1e-12)


def test_spectroscopy_lines_single_particle():
    spec = plaquette(T, omega=2 * math.pi * 4000.0)
    lines = spectroscopy_lines(spec, 1)
    rel = lines - 2 * math.pi * 4000.0
    assert np.allclose(np.sort(rel), [-2 * T, 0.0, 0.0, 2 * T],
                       atol=1e-6 * T)


def test_bloch_bands_analytic_any_flux():
    for flux in (0.0, 0.7, math.pi):
        bs = bloch_bands(flux, t=1.0, n_k=101)
        outer = np.sqrt(4.0 + 2.0 * np.cos(bs.k - flux) + 2.0 * np.cos(bs.k))
        assert np.abs(bs.bands[:, 1]).max() < 1e-12
        assert np.abs(bs.bands[:, 0] + outer).max() < 1e-12
        assert np.abs(bs.bands[:, 2] - outer).max() < 1e-12


def test_flux_pi_bands_flat():
    bs = bloch_bands(math.pi, t=1.0, n_k=201)
    assert np.all(flatness(bs) < 1e-12)
    assert bs.bands[0, 0] == pytest.approx(-2.0)
    assert bs.bands[0, 2] == pytest.approx(2.0)


def test_zero_flux_bands_disperse_and_touch():
    bs = bloch_bands(0.0, t=1.0, n_k=201)
    widths = flatness(bs)
    assert widths[1] < 1e-12
    assert widths[0] > 1.0 and widths[2] > 1.0
    gap = (bs.bands[:, 2] - bs.bands[:, 1]).min()
    assert gap < 1e-9


def test_bloch_bands_validation():
    with pytest.raises(ValueError):
        bloch_bands(0.0, t=-1.0)
    with pytest.raises(ValueError):
        bloch_bands(0.0, n_k=1)


def test_compact_localized_state_on_chain():
    spec = rhombus_chain(2, T, flux=math.pi)
    # T1 - B1 + T2 + B2 interferes to zero on both spinal neighbours
    amps = np.zeros(7)
    amps[[1, 2, 4, 5]] = [1.0, -1.0, 1.0, 1.0]
    check = verify_cls(spec, amps / 2.0)
    assert check.is_eigenstate
    assert check.energy == pytest.approx(0.0, abs=1e-9)
    assert check.support == 4


def test_cls_negative_control():
    spec = rhombus_chain(2, T, flux=math.pi)
    amps = np.zeros(7)
    amps[[1, 2]] = [1.0, 1.0]
    check = verify_cls(spec, amps)
    assert not check.is_eigenstate
    assert check.residual > T / 10


def test_cls_validation():
    spec = rhombus_chain(2, T, flux=math.pi)
    with pytest.raises(ValueError):
        verify_cls(spec, np.zeros(7))
    with pytest.raises(ValueError):
        verify_cls(spec, np.ones(3))


def test_eigenenergy_groups_explicit():
    u = -10.0
    values = [0.01, -9.9, -10.1, -30.2, -5.0]
    groups = eigenenergy_groups(values, u, window=0.25)
    assert groups.sizes() == {0: 1, 1: 2, 3: 1}
    assert groups.unassigned == (4,)


def test_eigenenergy_groups_offset():
    u = -10.0
    values = [100.0, 90.0]
    groups = eigenenergy_groups(values, u, offset=100.0)
    assert groups.sizes() == {0: 1, 1: 1}


def test_eigenenergy_groups_requires_interaction():
    with pytest.raises(ValueError):
        eigenenergy_groups([1.0], 0.0)
