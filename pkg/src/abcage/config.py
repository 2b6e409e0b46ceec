"""Declarative experiment configuration.

Configs are TOML.  All frequencies in config files are plain linear MHz
(matching hardware calibration tables) and are converted to angular rad/us
here, at the parse boundary, exactly once.  Decoherence times are us.

Sections (all optional unless a subcommand needs them):

  [run]          kind, seed, notes
  [lattice]      geometry ("plaquette" | "rhombus_chain"), flux ("zero" |
                 "pi"), tunneling_mhz (scalar or [LT, LB, RT, RB]),
                 onsite_mhz, interaction_mhz, n_plaquettes
  [lattice.detuning_mhz]   site label -> MHz offset added to that site
  [state]        occupations (per-site list), max_occ
  [time]         exactly one of t_max_us | t_max_swaps |
                 t_max_doublon_swaps; n_times
  [observables]  kinds (subset of "n", "P1", "P2", "PP"), pairs (label pairs
                 for "PP")
  [noise]        t1_01_us, tphi_us (scalar or per site), t1_12_us (optional)
  [readout]      fidelity_01, fidelity_12, n_shots, alpha
  [bands]        flux | flux_rad, t_mhz, n_k
  [spectrum]     n_particles, max_occ
  [graph]        n_particles, max_occ, partition
  [classify]     max_n, mode, tol

Validation failures raise ConfigError carrying "source:line:" so a bad key
can be found in the file directly.
"""
from __future__ import annotations

import math
import re
from dataclasses import dataclass
from pathlib import Path

import numpy as np

try:
    import tomllib as tomli
except ModuleNotFoundError:  # py3.10
    import tomli

from .dynamics import NoiseParams, doublon_swap_time, swap_time
from .io import config_hash
from .lattice import Bond, LatticeSpec, plaquette, rhombus_chain
from .units import angular

KINDS = ("spectrum", "bands", "walk", "lindblad-walk", "graph",
         "cage-classify", "pipeline")
OBSERVABLE_KINDS = ("n", "P1", "P2", "PP")
CLASSIFY_MODES = ("hardcore_limit", "finite_U")

_ALLOWED = {
    "run": {"kind", "seed", "notes"},
    "lattice": {"geometry", "flux", "tunneling_mhz", "onsite_mhz",
                "interaction_mhz", "n_plaquettes", "detuning_mhz"},
    "state": {"occupations", "max_occ"},
    "time": {"t_max_us", "t_max_swaps", "t_max_doublon_swaps", "n_times"},
    "observables": {"kinds", "pairs"},
    "noise": {"t1_01_us", "t1_12_us", "tphi_us"},
    "readout": {"fidelity_01", "fidelity_12", "n_shots", "alpha"},
    "bands": {"flux", "flux_rad", "t_mhz", "n_k"},
    "spectrum": {"n_particles", "max_occ"},
    "graph": {"n_particles", "max_occ", "partition"},
    "classify": {"max_n", "mode", "tol"},
}


class ConfigError(ValueError):
    pass


@dataclass(frozen=True)
class ReadoutConfig:
    fidelity_01: float = 0.86
    fidelity_12: float = 0.80
    n_shots: int = 3000
    alpha: float = 0.05


@dataclass(frozen=True)
class BandsConfig:
    flux: float          # radians; bands accept any value, not just 0/pi
    t: float             # rad/us
    n_k: int = 201


@dataclass(frozen=True)
class SectorConfig:
    n_particles: int = 1
    max_occ: int | None = None
    partition: tuple | None = None


@dataclass(frozen=True)
class ClassifyConfig:
    max_n: int = 3
    mode: str = "hardcore_limit"
    tol: float = 1e-9


@dataclass(frozen=True)
class ExperimentConfig:
    kind: str | None
    seed: int
    notes: str | None
    lattice: LatticeSpec | None
    occupations: tuple | None
    max_occ: int | None
    times: np.ndarray | None
    observables: tuple
    pairs: tuple | None
    noise: NoiseParams | None
    readout: ReadoutConfig
    bands: BandsConfig | None
    spectrum: SectorConfig
    graph: SectorConfig
    classify: ClassifyConfig
    raw: dict
    sha256: str
    source: str

    @property
    def n_particles(self) -> int | None:
        return None if self.occupations is None else int(sum(self.occupations))


def _line_of(text: str, key: str) -> int:
    """Best-effort line lookup of a key or [section] header in TOML text."""
    leaf = key.split(".")[-1]
    pat_kv = re.compile(rf"^\s*{re.escape(leaf)}\s*=")
    pat_hdr = re.compile(rf"^\s*\[.*{re.escape(leaf)}.*\]")
    for n, line in enumerate(text.splitlines(), start=1):
        if pat_kv.match(line) or pat_hdr.match(line):
            return n
    return 0


def _parse_flux(value, err) -> float:
    if isinstance(value, str):
        token = value.strip().lower()
        if token in ("0", "zero", "none"):
            return 0.0
        if token == "pi":
            return math.pi
        raise err(f'flux must be "zero" or "pi", got {value!r}')
    x = float(value)
    if abs(x) < 1e-9:
        return 0.0
    if abs(abs(x) - math.pi) < 1e-9:
        return math.pi
    raise err(f"flux must be 0 or pi, got {x}")


def _scalar_or_list(value, n, key, err):
    try:
        arr = np.asarray(value, dtype=float)
    except (TypeError, ValueError):
        raise err(f"{key} must be a number or list of numbers")
    if arr.ndim == 0:
        return np.full(n, float(arr))
    if arr.shape != (n,):
        raise err(f"{key} needs a scalar or {n} values, got {arr.shape[0]}")
    return arr


def _build_lattice(sec: dict, err) -> LatticeSpec:
    geometry = sec.get("geometry", "plaquette")
    flux = _parse_flux(sec.get("flux", "zero"), err)
    if "tunneling_mhz" not in sec:
        raise err("lattice.tunneling_mhz is required")
    raw_t = sec["tunneling_mhz"]
    t_list = [raw_t] * 4 if np.isscalar(raw_t) else list(raw_t)
    if len(t_list) != 4:
        raise err("lattice.tunneling_mhz needs a scalar or 4 values "
                  "(LT, LB, RT, RB)")
    if any(t < 0 for t in t_list):
        raise err("lattice.tunneling_mhz magnitudes must be >= 0")
    t_rad = [angular(t) for t in t_list]

    try:
        if geometry == "plaquette":
            base = plaquette(t_rad if any(t_rad) else 1.0, flux)
        elif geometry == "rhombus_chain":
            n_plq = int(sec.get("n_plaquettes", 1))
            if n_plq < 1:
                raise ValueError("lattice.n_plaquettes must be >= 1")
            base = rhombus_chain(n_plq, t_rad if any(t_rad) else 1.0, flux)
        else:
            raise ValueError(f"lattice.geometry must be plaquette or "
                             f"rhombus_chain, got {geometry!r}")
    except ValueError as exc:
        raise err(f"lattice: {exc}") from exc
    if not any(t_rad):
        # decoupled sites: keep the geometry but zero every bond
        base = LatticeSpec(base.sites, tuple(
            Bond(b.i, b.j, 0.0) for b in base.bonds))

    n = base.n_sites
    omega = _scalar_or_list(sec.get("onsite_mhz", 0.0), n, "lattice.onsite_mhz", err)
    u = _scalar_or_list(sec.get("interaction_mhz", 0.0), n,
                        "lattice.interaction_mhz", err)
    sites = tuple(
        type(s)(s.label, angular(float(w)), angular(float(uu)))
        for s, w, uu in zip(base.sites, omega, u))
    spec = LatticeSpec(sites, base.bonds)

    detuning = sec.get("detuning_mhz", {})
    if detuning:
        if not isinstance(detuning, dict):
            raise err("lattice.detuning_mhz must be a table of label = MHz")
        offsets = {}
        for label, mhz_off in detuning.items():
            if label not in spec.labels:
                raise err(f"lattice.detuning_mhz names unknown site {label!r}")
            offsets[label] = angular(float(mhz_off))
        spec = spec.with_detuning(offsets)
    return spec


def _build_times(sec: dict, spec: LatticeSpec | None, err) -> np.ndarray:
    keys = [k for k in ("t_max_us", "t_max_swaps", "t_max_doublon_swaps")
            if k in sec]
    if len(keys) != 1:
        raise err("time needs exactly one of t_max_us, t_max_swaps, "
                  "t_max_doublon_swaps")
    value = float(sec[keys[0]])
    if value <= 0:
        raise err(f"time.{keys[0]} must be positive")
    if keys[0] == "t_max_us":
        t_max = value
    else:
        if spec is None:
            raise err(f"time.{keys[0]} needs a [lattice] section")
        if spec.mean_tunneling() == 0:
            raise err(f"time.{keys[0]} is undefined with zero tunneling")
        try:
            unit = (swap_time(spec) if keys[0] == "t_max_swaps"
                    else doublon_swap_time(spec))
        except ValueError as exc:
            raise err(f"time.{keys[0]}: {exc}")
        t_max = value * unit
    n_times = int(sec.get("n_times", 201))
    if n_times < 2:
        raise err("time.n_times must be at least 2")
    return np.linspace(0.0, t_max, n_times)


def load_config(text: str, source: str = "<config>") -> ExperimentConfig:
    try:
        raw = tomli.loads(text)
    except tomli.TOMLDecodeError as exc:
        raise ConfigError(f"{source}: {exc}") from exc

    def err(msg, key=None):
        line = _line_of(text, key) if key else 0
        if key and line == 0:
            line = _line_of(text, key.split(".")[0])
        return ConfigError(f"{source}:{line}: {msg}")

    for section, table in raw.items():
        if section not in _ALLOWED:
            raise err(f"unknown section [{section}]", section)
        if not isinstance(table, dict):
            raise err(f"[{section}] must be a table", section)
        for key in table:
            if key not in _ALLOWED[section]:
                raise err(f"unknown key {section}.{key}", key)

    def section_err(prefix):
        return lambda msg: err(msg, msg.split()[0] if "." in msg.split()[0] else prefix)

    run = raw.get("run", {})
    kind = run.get("kind")
    if kind is not None and kind not in KINDS:
        raise err(f"run.kind must be one of {', '.join(KINDS)}; got {kind!r}", "kind")
    seed = int(run.get("seed", 0))
    if not (0 <= seed < 2 ** 64):
        raise err("run.seed must fit an unsigned 64-bit integer", "seed")
    notes = run.get("notes")

    lattice = None
    if "lattice" in raw:
        lattice = _build_lattice(raw["lattice"], section_err("lattice"))

    occupations = None
    max_occ = None
    if "state" in raw:
        sec = raw["state"]
        if "occupations" not in sec:
            raise err("state.occupations is required", "occupations")
        occ = sec["occupations"]
        if (not isinstance(occ, list) or not occ
                or any(not isinstance(v, int) or v < 0 for v in occ)):
            raise err("state.occupations must be nonnegative integers",
                      "occupations")
        occupations = tuple(occ)
        if lattice is not None and len(occupations) != lattice.n_sites:
            raise err(f"state.occupations has {len(occupations)} entries for "
                      f"{lattice.n_sites} sites", "occupations")
        if "max_occ" in sec:
            max_occ = int(sec["max_occ"])
            if max_occ < 1:
                raise err("state.max_occ must be >= 1", "max_occ")
            if max(occupations) > max_occ:
                raise err("state.occupations exceeds state.max_occ", "max_occ")

    times = None
    if "time" in raw:
        times = _build_times(raw["time"], lattice, section_err("time"))

    observables = ("n", "P1", "P2")
    pairs = None
    if "observables" in raw:
        sec = raw["observables"]
        kinds_list = sec.get("kinds", list(observables))
        bad = [k for k in kinds_list if k not in OBSERVABLE_KINDS]
        if bad:
            raise err(f"unknown observable kinds {bad}", "kinds")
        observables = tuple(kinds_list)
        if "pairs" in sec:
            pairs = tuple(tuple(p) for p in sec["pairs"])
            for p in pairs:
                if len(p) != 2:
                    raise err("observables.pairs entries must be label pairs",
                              "pairs")
                if lattice is not None:
                    for lbl in p:
                        if lbl not in lattice.labels:
                            raise err(f"observables.pairs names unknown site "
                                      f"{lbl!r}", "pairs")
        if "PP" in observables and not pairs:
            raise err('observable "PP" needs observables.pairs', "kinds")

    noise = None
    if "noise" in raw:
        sec = raw["noise"]
        for required in ("t1_01_us", "tphi_us"):
            if required not in sec:
                raise err(f"noise.{required} is required", required)
        noise = NoiseParams(t1_01=sec["t1_01_us"], tphi=sec["tphi_us"],
                            t1_12=sec.get("t1_12_us"))
        if lattice is not None:
            try:
                noise.per_site(noise.t1_01, lattice.n_sites)
                noise.per_site(noise.tphi, lattice.n_sites)
                if noise.t1_12 is not None:
                    noise.per_site(noise.t1_12, lattice.n_sites)
            except ValueError as exc:
                raise err(str(exc), "t1_01_us")

    sec = raw.get("readout", {})
    readout = ReadoutConfig(
        fidelity_01=float(sec.get("fidelity_01", 0.86)),
        fidelity_12=float(sec.get("fidelity_12", 0.80)),
        n_shots=int(sec.get("n_shots", 3000)),
        alpha=float(sec.get("alpha", 0.05)))
    if not (0.5 < readout.fidelity_01 <= 1 and 0.5 < readout.fidelity_12 <= 1):
        raise err("readout fidelities must be in (0.5, 1]", "fidelity_01")
    if readout.n_shots < 1:
        raise err("readout.n_shots must be >= 1", "n_shots")
    if not (0 < readout.alpha < 1):
        raise err("readout.alpha must be in (0, 1)", "alpha")

    bands = None
    if "bands" in raw or lattice is not None:
        sec = raw.get("bands", {})
        if "flux_rad" in sec:
            bflux = float(sec["flux_rad"])
        elif "flux" in sec:
            bflux = _parse_flux(sec["flux"], section_err("bands"))
        elif lattice is not None:
            bflux = math.pi if any(b.t < 0 for b in lattice.bonds) else 0.0
        else:
            raise err("bands needs flux or flux_rad (or a [lattice] section)",
                      "bands")
        if "t_mhz" in sec:
            bt = angular(float(sec["t_mhz"]))
        elif lattice is not None:
            bt = lattice.mean_tunneling()
        else:
            raise err("bands needs t_mhz (or a [lattice] section)", "bands")
        n_k = int(sec.get("n_k", 201))
        if bt > 0:
            bands = BandsConfig(bflux, bt, n_k)

    default_n = 1 if occupations is None else int(sum(occupations))
    sec = raw.get("spectrum", {})
    spectrum = SectorConfig(int(sec.get("n_particles", default_n)),
                            sec.get("max_occ", max_occ))
    sec = raw.get("graph", {})
    graph = SectorConfig(
        int(sec.get("n_particles", default_n)),
        sec.get("max_occ", max_occ),
        tuple(sec["partition"]) if "partition" in sec else None)
    if graph.partition is not None and sum(graph.partition) != graph.n_particles:
        raise err("graph.partition must sum to graph.n_particles", "partition")

    sec = raw.get("classify", {})
    classify = ClassifyConfig(int(sec.get("max_n", 3)),
                              str(sec.get("mode", "hardcore_limit")),
                              float(sec.get("tol", 1e-9)))
    if classify.mode not in CLASSIFY_MODES:
        raise err(f"classify.mode must be one of {CLASSIFY_MODES}", "mode")
    if classify.max_n < 1:
        raise err("classify.max_n must be >= 1", "max_n")

    return ExperimentConfig(
        kind=kind, seed=seed, notes=notes, lattice=lattice,
        occupations=occupations, max_occ=max_occ, times=times,
        observables=observables, pairs=pairs, noise=noise, readout=readout,
        bands=bands, spectrum=spectrum, graph=graph, classify=classify,
        raw=raw, sha256=config_hash(raw), source=source)


def load_config_file(path) -> ExperimentConfig:
    path = Path(path)
    try:
        text = path.read_text()
    except OSError as exc:
        raise ConfigError(f"{path}: cannot read config ({exc})") from exc
    return load_config(text, source=str(path))
