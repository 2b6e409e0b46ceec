import math

import numpy as np
import pytest

from abcage.lattice import (Bond, LatticeSpec, SiteParams,
                            chain_plaquette_loop, gauge_transform, loop_flux,
                            plaquette, rhombus_chain, rotation_image,
                            PLAQUETTE_LOOP)

T = 2 * math.pi * 11.66


def test_plaquette_structure():
    spec = plaquette(T)
    assert spec.labels == ("L", "T", "B", "R")
    assert [(b.i, b.j) for b in spec.bonds] == [(0, 1), (0, 2), (3, 1), (3, 2)]
    assert spec.is_connected()
    assert spec.mean_tunneling() == pytest.approx(T)


def test_flux_encoding():
    assert loop_flux(plaquette(T), PLAQUETTE_LOOP) == 0.0
    spec = plaquette(T, flux=math.pi)
    assert loop_flux(spec, PLAQUETTE_LOOP) == math.pi
    negatives = [b for b in spec.bonds if b.t < 0]
    assert len(negatives) == 1
    assert (negatives[0].i, negatives[0].j) == (3, 1)


def test_flux_must_be_zero_or_pi():
    with pytest.raises(ValueError):
        plaquette(T, flux=0.5)


def test_tunneling_magnitudes_positive():
    with pytest.raises(ValueError):
        plaquette(-T)
    with pytest.raises(ValueError):
        plaquette((T, T, 0.0, T))


def test_gauge_transform_preserves_flux():
    for flux in (0.0, math.pi):
        spec = plaquette(T, flux=flux)
        for site in range(4):
            assert loop_flux(gauge_transform(spec, site),
                             PLAQUETTE_LOOP) == flux


def test_per_bond_tunnelings():
    ts = tuple(2 * math.pi * x for x in (11.781, 11.884, 11.736, 11.238))
    spec = plaquette(ts, flux=math.pi)
    assert abs(spec.bond_map()[(0, 1)]) == pytest.approx(ts[0])
    assert spec.bond_map()[(3, 1)] == pytest.approx(-ts[2])
    assert spec.mean_tunneling() == pytest.approx(float(np.mean(ts)))


def test_site_params_and_detuning():
    spec = plaquette(T, omega=5.0, u=-2.0)
    assert np.allclose(spec.omega(), 5.0)
    assert np.allclose(spec.u(), -2.0)
    shifted = spec.with_detuning({"R": 1.5, 0: -0.5})
    assert shifted.omega()[3] == pytest.approx(6.5)
    assert shifted.omega()[0] == pytest.approx(4.5)
    assert shifted.omega()[1] == pytest.approx(5.0)
    with pytest.raises(ValueError):
        spec.site_index("X")


def test_lattice_validation():
    sites = (SiteParams("a"), SiteParams("b"))
    with pytest.raises(ValueError):
        LatticeSpec(sites, (Bond(0, 2, T),))
    with pytest.raises(ValueError):
        LatticeSpec(sites, (Bond(0, 0, T),))
    with pytest.raises(ValueError):
        LatticeSpec(sites, (Bond(0, 1, T), Bond(1, 0, T)))


def test_rotation_image():
    assert rotation_image((1, 0, 0, 0)) == (0, 0, 0, 1)
    assert rotation_image((0, 1, 0, 0)) == (0, 0, 1, 0)
    s = (2, 1, 0, 1)
    assert rotation_image(rotation_image(s)) == s
    with pytest.raises(ValueError):
        rotation_image((1, 0, 0))


def test_rhombus_chain_structure():
    for n_plq in (1, 2, 3):
        spec = rhombus_chain(n_plq, T, flux=math.pi)
        assert spec.n_sites == 3 * n_plq + 1
        assert len(spec.bonds) == 4 * n_plq
        assert spec.is_connected()
        for k in range(n_plq):
            assert loop_flux(spec, chain_plaquette_loop(k)) == math.pi
    spec0 = rhombus_chain(3, T)
    for k in range(3):
        assert loop_flux(spec0, chain_plaquette_loop(k)) == 0.0


def test_rhombus_chain_labels():
    spec = rhombus_chain(2, T)
    assert spec.labels == ("S0", "T1", "B1", "S1", "T2", "B2", "S2")
    with pytest.raises(ValueError):
        rhombus_chain(0, T)


def test_loop_flux_requires_bonded_cycle():
    spec = plaquette(T)
    with pytest.raises(ValueError):
        loop_flux(spec, (0, 3, 1, 2))  # L and R are not bonded
    with pytest.raises(ValueError):
        loop_flux(spec, (0, 1))
