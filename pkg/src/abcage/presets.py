"""Built-in experiment presets.

Each preset is a complete TOML config (see config.py for the grammar) using
the published device calibrations: per-bond tunnelings and per-site
decoherence times of the four-site plaquette in its zero-flux and pi-flux
tunings, an attractive on-site interaction of 13.5 mean tunnelings, 0/1
readout fidelity 0.86 and 1/2 readout fidelity 0.80.

Site order is (L, T, B, R); bond order is (LT, LB, RT, RB).
"""
from __future__ import annotations

from .config import ExperimentConfig, load_config

# plaquette calibration, linear MHz / us
TUNNELING_ZERO_MHZ = (11.879, 11.792, 11.587, 11.734)
TUNNELING_PI_MHZ = (11.781, 11.884, 11.736, 11.238)
T1_01_ZERO_US = (42.4, 42.2, 44.1, 48.5)
T1_01_PI_US = (50.6, 43.6, 50.4, 44.0)
T1_12_ZERO_US = (32.6, 22.9, 32.8, 19.2)
T1_12_PI_US = (27.3, 28.1, 27.9, 27.8)
TPHI_SINGLE_US = 40.0
TPHI_DOUBLON_US = 20.0
INTERACTION_RATIO = 13.5  # |U| / mean tunneling

MEAN_T_ZERO_MHZ = sum(TUNNELING_ZERO_MHZ) / 4.0    # 11.748
MEAN_T_PI_MHZ = sum(TUNNELING_PI_MHZ) / 4.0        # 11.65975
U_ZERO_MHZ = -INTERACTION_RATIO * MEAN_T_ZERO_MHZ
U_PI_MHZ = -INTERACTION_RATIO * MEAN_T_PI_MHZ


def _fmt(values) -> str:
    return "[" + ", ".join(repr(float(v)) for v in values) + "]"


def _single_photon_walk(flux: str, tunneling, t1_01, seed: int) -> str:
    return f"""\
[run]
kind = "lindblad-walk"
seed = {seed}
notes = "single photon released on L, {flux}-flux plaquette"

[lattice]
geometry = "plaquette"
flux = "{flux}"
tunneling_mhz = {_fmt(tunneling)}

[state]
occupations = [1, 0, 0, 0]
max_occ = 1

[time]
t_max_swaps = 12.0
n_times = 241

[observables]
kinds = ["n"]

[noise]
t1_01_us = {_fmt(t1_01)}
tphi_us = {TPHI_SINGLE_US}

[readout]
n_shots = 3000
"""


def _doublon_walk(flux: str, tunneling, u_mhz, t1_01, t1_12, seed: int,
                  extra: str = "",
                  time_block: str = "t_max_doublon_swaps = 3.0\nn_times = 241") -> str:
    return f"""\
[run]
kind = "lindblad-walk"
seed = {seed}
notes = "doublon released on L, {flux}-flux plaquette"

[lattice]
geometry = "plaquette"
flux = "{flux}"
tunneling_mhz = {_fmt(tunneling)}
interaction_mhz = {u_mhz!r}
{extra}
[state]
occupations = [2, 0, 0, 0]
max_occ = 2

[time]
{time_block}

[observables]
kinds = ["n", "P1", "P2"]

[noise]
t1_01_us = {_fmt(t1_01)}
t1_12_us = {_fmt(t1_12)}
tphi_us = {TPHI_DOUBLON_US}

[readout]
n_shots = 3000
"""


def _pair_walk(flux: str, tunneling, t1_01, seed: int) -> str:
    return f"""\
[run]
kind = "lindblad-walk"
seed = {seed}
notes = "hard-core photon pair released on L and R, {flux}-flux plaquette"

[lattice]
geometry = "plaquette"
flux = "{flux}"
tunneling_mhz = {_fmt(tunneling)}

[state]
occupations = [1, 0, 0, 1]
max_occ = 1

[time]
t_max_swaps = 2.0
n_times = 241

[observables]
kinds = ["n", "PP"]
pairs = [["L", "R"], ["T", "B"], ["L", "T"], ["L", "B"], ["T", "R"], ["B", "R"]]

[noise]
t1_01_us = {_fmt(t1_01)}
tphi_us = {TPHI_SINGLE_US}

[readout]
n_shots = 3000
"""


PRESETS = {
    # single-photon walks, zero vs pi flux
    "fig2a": _single_photon_walk("zero", TUNNELING_ZERO_MHZ, T1_01_ZERO_US, 20),
    "fig2b": _single_photon_walk("pi", TUNNELING_PI_MHZ, T1_01_PI_US, 21),
    # doublon walks: interaction-induced escape from the cage
    "fig3a": _doublon_walk("zero", TUNNELING_ZERO_MHZ, U_ZERO_MHZ,
                           T1_01_ZERO_US, T1_12_ZERO_US, 30),
    "fig3b": _doublon_walk("pi", TUNNELING_PI_MHZ, U_PI_MHZ,
                           T1_01_PI_US, T1_12_PI_US, 31),
    # hard-core pair walks: caging visible only in pair correlators
    "fig4a": _pair_walk("zero", TUNNELING_ZERO_MHZ, T1_01_ZERO_US, 40),
    "fig4b": _pair_walk("pi", TUNNELING_PI_MHZ, T1_01_PI_US, 41),
    # two hard-core photons on the spinal sites of a three-plaquette chain
    "figS4": f"""\
[run]
kind = "walk"
seed = 54
notes = "pair on the middle plaquette's spinal sites; edge sites and the middle top-bottom pair stay dark"

[lattice]
geometry = "rhombus_chain"
n_plaquettes = 3
flux = "pi"
tunneling_mhz = {MEAN_T_PI_MHZ!r}

[state]
occupations = [0, 0, 0, 1, 0, 0, 1, 0, 0, 0]
max_occ = 1

[time]
t_max_swaps = 12.0
n_times = 241

[observables]
kinds = ["n", "PP"]
pairs = [["T2", "B2"]]
""",
    # doublon beating under a 0.2 MHz detuning of site R
    "figS7": _doublon_walk("pi", TUNNELING_PI_MHZ, U_PI_MHZ,
                           T1_01_PI_US, T1_12_PI_US, 57,
                           extra="\n[lattice.detuning_mhz]\nR = 0.2\n",
                           time_block="t_max_us = 2.0\nn_times = 201"),
    # caging classification of every occupation partition up to n = 5
    "figS8": f"""\
[run]
kind = "cage-classify"
seed = 58
notes = "hard-core-limit classification of all occupation partitions"

[lattice]
geometry = "plaquette"
flux = "pi"
tunneling_mhz = {MEAN_T_PI_MHZ!r}
interaction_mhz = {U_PI_MHZ!r}

[classify]
max_n = 5
mode = "hardcore_limit"
""",
}


def preset_text(name: str) -> str:
    try:
        return PRESETS[name]
    except KeyError:
        raise KeyError(f"unknown preset {name!r}; available: "
                       f"{', '.join(sorted(PRESETS))}") from None


def preset_config(name: str) -> ExperimentConfig:
    return load_config(preset_text(name), source=f"<preset:{name}>")
