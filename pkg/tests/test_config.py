import math
import re

import numpy as np
import pytest

from abcage.config import (KINDS, ConfigError, load_config, load_config_file)
from abcage.dynamics import swap_time
from abcage.presets import PRESETS, preset_config, preset_text
from abcage.units import angular

FULL = """\
[run]
kind = "lindblad-walk"
seed = 42
notes = "calibration run"

[lattice]
geometry = "plaquette"
flux = "pi"
tunneling_mhz = [11.781, 11.884, 11.736, 11.238]
interaction_mhz = -157.4

[lattice.detuning_mhz]
R = 0.2

[state]
occupations = [2, 0, 0, 0]
max_occ = 2

[time]
t_max_us = 2.0
n_times = 201

[observables]
kinds = ["n", "P1", "P2", "PP"]
pairs = [["L", "R"], ["T", "B"]]

[noise]
t1_01_us = [50.6, 43.6, 50.4, 44.0]
t1_12_us = [27.3, 28.1, 27.9, 27.8]
tphi_us = 20.0

[readout]
fidelity_01 = 0.86
fidelity_12 = 0.80
n_shots = 3000
alpha = 0.05
"""


def err_line(text, exc):
    m = re.match(r".*?:(\d+): ", str(exc))
    assert m, f"no source:line prefix in {exc}"
    return int(m.group(1))


def line_of(text, needle):
    for n, line in enumerate(text.splitlines(), start=1):
        if needle in line:
            return n
    raise AssertionError(f"{needle!r} not in text")


def test_full_config_parses_and_converts_units():
    cfg = load_config(FULL, source="full.toml")
    assert cfg.kind == "lindblad-walk"
    assert cfg.seed == 42
    assert cfg.notes == "calibration run"
    spec = cfg.lattice
    assert spec.labels == ("L", "T", "B", "R")
    # bond order LT, LB, RT, RB; pi flux puts the sign on RT
    ts = [b.t for b in spec.bonds]
    assert ts[0] == pytest.approx(angular(11.781))
    assert ts[1] == pytest.approx(angular(11.884))
    assert ts[2] == pytest.approx(-angular(11.736))
    assert ts[3] == pytest.approx(angular(11.238))
    assert np.allclose(spec.u(), angular(-157.4))
    # detuning lands on site R only
    assert spec.omega()[3] == pytest.approx(angular(0.2))
    assert np.allclose(spec.omega()[:3], 0.0)
    assert cfg.occupations == (2, 0, 0, 0)
    assert cfg.max_occ == 2
    assert cfg.n_particles == 2
    assert len(cfg.times) == 201
    assert cfg.times[0] == 0.0 and cfg.times[-1] == pytest.approx(2.0)
    assert cfg.observables == ("n", "P1", "P2", "PP")
    assert cfg.pairs == (("L", "R"), ("T", "B"))
    assert cfg.noise.t1_12 == [27.3, 28.1, 27.9, 27.8]
    assert cfg.readout.n_shots == 3000
    assert len(cfg.sha256) == 64
    assert cfg.source == "full.toml"


def test_defaults():
    cfg = load_config("[lattice]\ntunneling_mhz = 11.66\n")
    assert cfg.kind is None and cfg.seed == 0 and cfg.notes is None
    assert cfg.occupations is None and cfg.times is None and cfg.noise is None
    assert cfg.observables == ("n", "P1", "P2")
    assert cfg.readout.fidelity_01 == 0.86
    assert cfg.readout.alpha == 0.05
    assert cfg.classify.max_n == 3
    assert cfg.classify.mode == "hardcore_limit"
    assert cfg.spectrum.n_particles == 1
    # bands inherit the lattice scale and flux
    assert cfg.bands.flux == 0.0
    assert cfg.bands.t == pytest.approx(angular(11.66))


def test_time_in_swap_units():
    text = ("[lattice]\nflux = \"pi\"\ntunneling_mhz = 11.66\n"
            "[time]\nt_max_swaps = 3.5\nn_times = 41\n")
    cfg = load_config(text)
    assert cfg.times[-1] == pytest.approx(3.5 * swap_time(cfg.lattice))
    assert len(cfg.times) == 41


def test_time_in_doublon_swap_units_needs_interaction():
    base = ("[lattice]\nflux = \"pi\"\ntunneling_mhz = 11.66\n{}"
            "[time]\nt_max_doublon_swaps = 2.0\n")
    cfg = load_config(base.format("interaction_mhz = -157.4\n"))
    assert cfg.times[-1] > 0
    with pytest.raises(ConfigError, match="interaction"):
        load_config(base.format(""))


def test_zero_tunneling_spectroscopy_lattice():
    text = ("[lattice]\ntunneling_mhz = 0.0\nonsite_mhz = 4700.0\n")
    cfg = load_config(text)
    assert all(b.t == 0.0 for b in cfg.lattice.bonds)
    assert np.allclose(cfg.lattice.omega(), angular(4700.0))
    assert cfg.bands is None
    with pytest.raises(ConfigError, match="zero tunneling"):
        load_config(text + "[time]\nt_max_swaps = 1.0\n")


def test_bands_overrides():
    text = ("[bands]\nflux_rad = 0.7\nt_mhz = 10.0\nn_k = 31\n")
    cfg = load_config(text)
    assert cfg.bands.flux == 0.7
    assert cfg.bands.t == pytest.approx(angular(10.0))
    assert cfg.bands.n_k == 31
    cfg2 = load_config("[bands]\nflux = \"pi\"\nt_mhz = 10.0\n")
    assert cfg2.bands.flux == math.pi


def test_rhombus_chain_geometry():
    text = ("[lattice]\ngeometry = \"rhombus_chain\"\nn_plaquettes = 3\n"
            "flux = \"pi\"\ntunneling_mhz = 11.66\n")
    cfg = load_config(text)
    assert cfg.lattice.n_sites == 10
    assert len(cfg.lattice.bonds) == 12


def test_graph_partition_validation():
    good = ("[lattice]\ntunneling_mhz = 11.0\n"
            "[graph]\nn_particles = 3\npartition = [2, 1]\n")
    assert load_config(good).graph.partition == (2, 1)
    with pytest.raises(ConfigError, match="sum"):
        load_config(good.replace("[2, 1]", "[2, 2]"))


# ---------------------------------------------------------------------------
# error reporting with line numbers

def test_unknown_section_line():
    text = "[lattice]\ntunneling_mhz = 11.0\n\n[bogus]\nx = 1\n"
    with pytest.raises(ConfigError) as exc:
        load_config(text)
    assert err_line(text, exc.value) == line_of(text, "[bogus]")


def test_unknown_key_line():
    text = "[lattice]\ntunneling_mhz = 11.0\ncolor = \"red\"\n"
    with pytest.raises(ConfigError) as exc:
        load_config(text)
    assert err_line(text, exc.value) == line_of(text, "color")
    assert "lattice.color" in str(exc.value)


def test_missing_tunneling_line():
    text = "[run]\nseed = 1\n\n[lattice]\nflux = \"pi\"\n"
    with pytest.raises(ConfigError, match="tunneling_mhz is required"):
        load_config(text)


def test_wrong_tunneling_arity():
    text = "[lattice]\ntunneling_mhz = [11.0, 11.0, 11.0]\n"
    with pytest.raises(ConfigError) as exc:
        load_config(text)
    assert err_line(text, exc.value) == line_of(text, "tunneling_mhz")
    assert "4 values" in str(exc.value)


def test_bad_flux_message():
    text = "[lattice]\nflux = \"half\"\ntunneling_mhz = 11.0\n"
    with pytest.raises(ConfigError, match=r'flux must be "zero" or "pi"'):
        load_config(text)
    with pytest.raises(ConfigError, match="flux must be 0 or pi"):
        load_config("[lattice]\nflux = 1.5\ntunneling_mhz = 11.0\n")


def test_occupation_errors():
    text = ("[lattice]\ntunneling_mhz = 11.0\n"
            "[state]\noccupations = [1, 0, 0]\n")
    with pytest.raises(ConfigError) as exc:
        load_config(text)
    assert err_line(text, exc.value) == line_of(text, "occupations")
    with pytest.raises(ConfigError, match="nonnegative integers"):
        load_config("[state]\noccupations = [1, -1]\n")
    with pytest.raises(ConfigError, match="max_occ"):
        load_config("[state]\noccupations = [2, 0]\nmax_occ = 1\n")
    with pytest.raises(ConfigError, match="occupations is required"):
        load_config("[state]\nmax_occ = 2\n")


def test_time_errors():
    text = ("[lattice]\ntunneling_mhz = 11.0\n"
            "[time]\nt_max_us = 1.0\nt_max_swaps = 2.0\n")
    with pytest.raises(ConfigError, match="exactly one"):
        load_config(text)
    with pytest.raises(ConfigError, match="n_times"):
        load_config("[time]\nt_max_us = 1.0\nn_times = 1\n")
    with pytest.raises(ConfigError, match="positive"):
        load_config("[time]\nt_max_us = -1.0\n")
    with pytest.raises(ConfigError, match=r"\[lattice\] section"):
        load_config("[time]\nt_max_swaps = 1.0\n")


def test_observable_errors():
    text = ("[lattice]\ntunneling_mhz = 11.0\n"
            "[observables]\nkinds = [\"n\", \"PP\"]\n")
    with pytest.raises(ConfigError) as exc:
        load_config(text)
    assert "needs observables.pairs" in str(exc.value)
    with pytest.raises(ConfigError, match="unknown observable"):
        load_config("[observables]\nkinds = [\"Q\"]\n")
    with pytest.raises(ConfigError, match="unknown site"):
        load_config(text.replace("kinds = [\"n\", \"PP\"]",
                                 "kinds = [\"PP\"]\npairs = [[\"L\", \"X\"]]"))


def test_noise_errors():
    with pytest.raises(ConfigError, match="tphi_us is required"):
        load_config("[noise]\nt1_01_us = 40.0\n")
    text = ("[lattice]\ntunneling_mhz = 11.0\n"
            "[noise]\nt1_01_us = [40.0, 40.0]\ntphi_us = 40.0\n")
    with pytest.raises(ConfigError, match="expected scalar or 4"):
        load_config(text)


def test_run_and_readout_errors():
    with pytest.raises(ConfigError, match="run.kind"):
        load_config("[run]\nkind = \"dance\"\n")
    with pytest.raises(ConfigError, match="seed"):
        load_config("[run]\nseed = -1\n")
    with pytest.raises(ConfigError, match="fidelities"):
        load_config("[readout]\nfidelity_01 = 0.4\n")
    with pytest.raises(ConfigError, match="alpha"):
        load_config("[readout]\nalpha = 1.5\n")
    with pytest.raises(ConfigError, match="n_shots"):
        load_config("[readout]\nn_shots = 0\n")


def test_classify_and_detuning_errors():
    with pytest.raises(ConfigError, match="classify.mode"):
        load_config("[classify]\nmode = \"guess\"\n")
    with pytest.raises(ConfigError, match="max_n"):
        load_config("[classify]\nmax_n = 0\n")
    text = ("[lattice]\ntunneling_mhz = 11.0\n"
            "[lattice.detuning_mhz]\nX = 0.5\n")
    with pytest.raises(ConfigError, match="unknown site"):
        load_config(text)


def test_toml_syntax_error_carries_source():
    with pytest.raises(ConfigError, match="bad.toml"):
        load_config("not [valid toml", source="bad.toml")


def test_load_config_file(tmp_path):
    path = tmp_path / "run.toml"
    path.write_text(FULL)
    cfg = load_config_file(path)
    assert cfg.source == str(path)
    with pytest.raises(ConfigError, match="cannot read"):
        load_config_file(tmp_path / "missing.toml")


# ---------------------------------------------------------------------------
# presets

def test_presets_load_and_declare_kinds():
    want_kind = {
        "fig2a": "lindblad-walk", "fig2b": "lindblad-walk",
        "fig3a": "lindblad-walk", "fig3b": "lindblad-walk",
        "fig4a": "lindblad-walk", "fig4b": "lindblad-walk",
        "figS4": "walk", "figS7": "lindblad-walk", "figS8": "cage-classify",
    }
    assert set(PRESETS) == set(want_kind)
    for name, kind in want_kind.items():
        text = preset_text(name)
        assert "[lattice]" in text
        cfg = preset_config(name)
        assert cfg.kind == kind
        assert cfg.kind in KINDS
        assert cfg.lattice is not None
    with pytest.raises(KeyError):
        preset_text("fig99")


def test_preset_flux_assignment():
    # the "a" presets are the zero-flux control, the "b" presets pi flux
    for name, negative in (("fig2a", False), ("fig2b", True),
                           ("fig3a", False), ("fig3b", True),
                           ("fig4a", False), ("fig4b", True)):
        spec = preset_config(name).lattice
        assert any(b.t < 0 for b in spec.bonds) == negative


def test_preset_initial_states():
    assert preset_config("fig2b").occupations == (1, 0, 0, 0)
    assert preset_config("fig3b").occupations == (2, 0, 0, 0)
    assert preset_config("fig4b").occupations == (1, 0, 0, 1)
    assert preset_config("fig4b").max_occ == 1
    s4 = preset_config("figS4")
    assert s4.lattice.n_sites == 10
    assert sum(s4.occupations) == 2
