"""Command-line driver.

Subcommands read a TOML config (--config) or a named built-in preset
(--preset), run one experiment, and write data plus a rendered PNG into the
output directory:

  spectrum       n-particle transition lines from the vacuum (JSON)
  bands          Bloch bands of the infinite rhombus chain (CSV)
  walk           unitary quantum walk time series (CSV)
  lindblad-walk  dissipative walk with T1/Tphi channels (CSV)
  graph          Fock-space adjacency edge list (text)
  cage-classify  caging class of every occupation partition (JSON)
  pipeline       walk + synthetic shots + readout correction + intervals (CSV)

Outputs carry a '# key = value' metadata header (version, config sha256,
seed); identical config and seed give byte-identical bodies apart from the
creation timestamp.  Exit status: 0 success, 1 I/O failure, 2 bad config.
"""
from __future__ import annotations

import argparse
import sys
from pathlib import Path

import numpy as np

from . import __version__
from .caging import classify_partition, integer_partitions
from .config import ConfigError, ExperimentConfig, load_config_file
from .dynamics import (evolve_state, level_probability,
                       level_probability_rho, lindblad_evolve,
                       run_lindblad_walk, run_walk, swap_time)
from .fock import enumerate_basis, enumerate_sectors
from .hamiltonian import adjacency_graph, build_hamiltonian
from .io import metadata_lines, write_csv, write_json
from .measurement import ConfusionMatrix, corrected_interval, sample_shots
from .presets import PRESETS, preset_config
from .spectral import bloch_bands, eigendecompose, spectroscopy_lines
from .units import mhz
from . import plotting


def _require(cfg: ExperimentConfig, value, what: str):
    if value is None:
        raise ConfigError(f"{cfg.source}:0: {what}")
    return value


def _meta(cfg: ExperimentConfig, command: str, seed: int, **extra) -> dict:
    meta = {"version": __version__, "command": command,
            "config_sha256": cfg.sha256, "seed": seed}
    if cfg.notes:
        meta["notes"] = cfg.notes
    meta.update(extra)
    return meta


def _walk_inputs(cfg: ExperimentConfig):
    spec = _require(cfg, cfg.lattice, "this subcommand needs a [lattice] section")
    occ = _require(cfg, cfg.occupations, "this subcommand needs state.occupations")
    times = _require(cfg, cfg.times, "this subcommand needs a [time] section")
    return spec, occ, times


def run_spectrum(cfg, outdir, base, seed, plot):
    spec = _require(cfg, cfg.lattice, "spectrum needs a [lattice] section")
    n = cfg.spectrum.n_particles
    lines = spectroscopy_lines(spec, n, cfg.spectrum.max_occ)
    payload = {
        "n_particles": n,
        "max_occ": cfg.spectrum.max_occ,
        "lines_rad_per_us": [float(x) for x in lines],
        "lines_mhz": [float(mhz(x)) for x in lines],
    }
    out = outdir / f"{base}.json"
    write_json(out, payload, _meta(cfg, "spectrum", seed))
    written = [out]
    if plot:
        png = outdir / f"{base}.png"
        plotting.plot_spectrum(payload["lines_mhz"], png,
                               title=f"{n}-particle transition lines")
        written.append(png)
    return written


def run_bands(cfg, outdir, base, seed, plot):
    bc = _require(cfg, cfg.bands, "bands needs a [bands] or [lattice] section")
    bs = bloch_bands(bc.flux, bc.t, bc.n_k)
    columns = {"k_rad": bs.k}
    for i in range(bs.bands.shape[1]):
        columns[f"E{i}_rad_per_us"] = bs.bands[:, i]
        columns[f"E{i}_mhz"] = [mhz(x) for x in bs.bands[:, i]]
    out = outdir / f"{base}.csv"
    write_csv(out, columns, _meta(cfg, "bands", seed, flux_rad=bc.flux,
                                  t_rad_per_us=bc.t, n_k=bc.n_k))
    written = [out]
    if plot:
        png = outdir / f"{base}.png"
        plotting.plot_bands(bs, png)
        written.append(png)
    return written


def _evolution_csv(cfg, result, out, command, seed):
    columns = {"time_us": result.times_us,
               "time_swap": result.times_us / result.tau_swap}
    columns.update(result.columns)
    write_csv(out, columns, _meta(cfg, command, seed,
                                  tau_swap_us=result.tau_swap))


def run_unitary_walk(cfg, outdir, base, seed, plot):
    spec, occ, times = _walk_inputs(cfg)
    basis = enumerate_basis(spec.n_sites, sum(occ), cfg.max_occ)
    psi0 = basis.unit_state(tuple(occ))
    result = run_walk(spec, basis, psi0, times, observables=cfg.observables,
                      pairs=cfg.pairs)
    out = outdir / f"{base}.csv"
    _evolution_csv(cfg, result, out, "walk", seed)
    written = [out]
    if plot:
        png = outdir / f"{base}.png"
        plotting.plot_evolution(result, png, title="unitary walk")
        written.append(png)
    return written


def run_open_walk(cfg, outdir, base, seed, plot):
    spec, occ, times = _walk_inputs(cfg)
    noise = _require(cfg, cfg.noise, "lindblad-walk needs a [noise] section")
    result = run_lindblad_walk(spec, sum(occ), tuple(occ), times, noise,
                               max_occ=cfg.max_occ,
                               observables=cfg.observables, pairs=cfg.pairs)
    out = outdir / f"{base}.csv"
    _evolution_csv(cfg, result, out, "lindblad-walk", seed)
    written = [out]
    if plot:
        png = outdir / f"{base}.png"
        plotting.plot_evolution(result, png, title="dissipative walk")
        written.append(png)
    return written


def run_graph(cfg, outdir, base, seed, plot):
    spec = _require(cfg, cfg.lattice, "graph needs a [lattice] section")
    basis = enumerate_basis(spec.n_sites, cfg.graph.n_particles,
                            cfg.graph.max_occ)
    H = build_hamiltonian(spec, basis)
    indices = None
    if cfg.graph.partition is not None:
        indices = basis.partition_indices(cfg.graph.partition)
    g = adjacency_graph(H, basis, indices)
    out = outdir / f"{base}.txt"
    header = metadata_lines(_meta(cfg, "graph", seed,
                                  n_particles=cfg.graph.n_particles))
    out.write_text("\n".join(header) + "\n" + g.to_edge_list())
    written = [out]
    if plot:
        png = outdir / f"{base}.png"
        plotting.plot_graph(g, png)
        written.append(png)
    return written


def run_classify(cfg, outdir, base, seed, plot):
    spec = _require(cfg, cfg.lattice, "cage-classify needs a [lattice] section")
    cc = cfg.classify
    if (cc.mode == "hardcore_limit" and cc.max_n >= 2
            and not np.any(spec.u())):
        raise ConfigError(f"{cfg.source}:0: hard-core-limit classification of "
                          "occupation stacks needs lattice.interaction_mhz")
    reports = []
    for n in range(1, cc.max_n + 1):
        for partition in integer_partitions(n, spec.n_sites):
            rep = classify_partition(spec, n, partition, mode=cc.mode,
                                     tol=cc.tol)
            reports.append(rep.to_dict())
    payload = {
        "max_n": cc.max_n,
        "mode": cc.mode,
        "reports": reports,
        "summary": {
            f"n={r['n']} [{','.join(str(p) for p in r['partition'])}]":
                r["classification"]
            for r in reports
        },
    }
    out = outdir / f"{base}.json"
    write_json(out, payload, _meta(cfg, "cage-classify", seed))
    return [out]


def _level_series(cfg, spec, occ, times):
    """True P(n_site = level) arrays: dict (site, level) -> (n_times,)."""
    n = sum(occ)
    if cfg.noise is not None:
        basis = enumerate_sectors(spec.n_sites, n, cfg.max_occ)
        rho0 = np.zeros((len(basis), len(basis)), dtype=complex)
        i0 = basis.index(tuple(occ))
        rho0[i0, i0] = 1.0
        states = lindblad_evolve(spec, basis, rho0, times, cfg.noise)
        probability = level_probability_rho
    else:
        basis = enumerate_basis(spec.n_sites, n, cfg.max_occ)
        H = build_hamiltonian(spec, basis)
        states = evolve_state(eigendecompose(H), basis.unit_state(tuple(occ)),
                              times)
        probability = level_probability
    max_level = min(2, max(max(s) for s in basis.states))
    series = {}
    for site in range(spec.n_sites):
        for level in range(max_level + 1):
            series[(site, level)] = probability(states, basis, site, level)
    return series, max_level


def run_pipeline(cfg, outdir, base, seed, plot):
    spec, occ, times = _walk_inputs(cfg)
    ro = cfg.readout
    series, max_level = _level_series(cfg, spec, occ, times)
    if max_level >= 2:
        confusion = ConfusionMatrix.default_three_level(ro.fidelity_01,
                                                        ro.fidelity_12)
    else:
        confusion = ConfusionMatrix.symmetric(ro.fidelity_01, (0, 1))
    levels = list(range(max_level + 1))

    tau = swap_time(spec)
    columns = {"time_us": list(times), "time_swap": [t / tau for t in times]}
    stems = []
    for site, lbl in enumerate(spec.labels):
        for level in levels[1:]:
            stem = f"P{level}_{lbl}"
            stems.append((stem, site, level))
            for suffix in ("raw", "corr", "lo", "hi"):
                columns[f"{stem}_{suffix}"] = []

    for k in range(len(times)):
        for site, lbl in enumerate(spec.labels):
            probs = np.array([series[(site, level)][k] for level in levels])
            probs = np.clip(probs, 0.0, None)
            probs = probs / probs.sum()
            record = sample_shots(probs, ro.n_shots, confusion,
                                  seed=(seed, k, site))
            freqs = record.frequencies()
            for level in levels[1:]:
                stem = f"P{level}_{lbl}"
                corr, ci = corrected_interval(record, confusion, level,
                                              ro.alpha)
                columns[f"{stem}_raw"].append(float(freqs[level]))
                columns[f"{stem}_corr"].append(corr)
                columns[f"{stem}_lo"].append(ci.lo)
                columns[f"{stem}_hi"].append(ci.hi)

    out = outdir / f"{base}.csv"
    write_csv(out, columns, _meta(cfg, "pipeline", seed,
                                  n_shots=ro.n_shots, alpha=ro.alpha,
                                  fidelity_01=ro.fidelity_01,
                                  fidelity_12=ro.fidelity_12,
                                  tau_swap_us=tau))
    written = [out]
    if plot:
        png = outdir / f"{base}.png"
        plot_series = {
            stem: (columns[f"{stem}_corr"], columns[f"{stem}_lo"],
                   columns[f"{stem}_hi"])
            for (stem, _, _) in stems
        }
        plotting.plot_pipeline(times, tau, plot_series, png,
                               title="measurement pipeline")
        written.append(png)
    return written


RUNNERS = {
    "spectrum": run_spectrum,
    "bands": run_bands,
    "walk": run_unitary_walk,
    "lindblad-walk": run_open_walk,
    "graph": run_graph,
    "cage-classify": run_classify,
    "pipeline": run_pipeline,
}


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="abcage",
        description="Bosonic lattice simulator: flux-caged quantum walks, "
                    "spectra, caging classification and readout statistics.")
    parser.add_argument("--version", action="version", version=__version__)
    sub = parser.add_subparsers(dest="command", required=True)
    for name in RUNNERS:
        p = sub.add_parser(name, help=f"run the {name} experiment")
        p.add_argument("--config", type=Path, help="TOML experiment config")
        p.add_argument("--preset", choices=sorted(PRESETS),
                       help="built-in figure preset")
        p.add_argument("--output", type=Path, default=Path("."),
                       help="output directory (default: current)")
        p.add_argument("--seed", type=int, default=None,
                       help="override the config seed")
        p.add_argument("--no-plot", action="store_true",
                       help="skip PNG rendering")
    return parser


def _load(args) -> ExperimentConfig:
    if args.config and args.preset:
        raise ConfigError("give either --config or --preset, not both")
    if args.config:
        return load_config_file(args.config)
    if args.preset:
        return preset_config(args.preset)
    raise ConfigError("either --config or --preset is required")


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        cfg = _load(args)
        seed = cfg.seed if args.seed is None else args.seed
        if not (0 <= seed < 2 ** 64):
            raise ConfigError("--seed must fit an unsigned 64-bit integer")
        outdir = args.output
        outdir.mkdir(parents=True, exist_ok=True)
        base = (args.preset or args.command).replace("-", "_")
        written = RUNNERS[args.command](cfg, outdir, base, seed,
                                        plot=not args.no_plot)
    except ConfigError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    except OSError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    for path in written:
        print(path)
    return 0


if __name__ == "__main__":
    sys.exit(main())
