"""abcage: bosonic tight-binding lattices with synthetic pi flux.

Simulates Aharonov-Bohm caging of photons on rhombus plaquettes and chains:
exact Fock-space diagonalization, unitary and Lindblad walk dynamics, Bloch
bands, configuration-space caging classification, and an emulated readout
statistics pipeline (confusion sampling, correction, Clopper-Pearson
intervals).  The `abcage` CLI drives everything from TOML configs.
"""
from .units import angular, mhz
from .fock import (FockBasis, basis_size, enumerate_basis, enumerate_sectors,
                   partition_of, state_from_string, state_to_string)
from .lattice import (Bond, LatticeSpec, SiteParams, chain_plaquette_loop,
                      gauge_transform, loop_flux, plaquette, rhombus_chain,
                      rotation_image)
from .hamiltonian import (AdjacencyGraph, adjacency_graph, build_hamiltonian,
                          project_subspace)
from .spectral import (BandSet, CLSCheck, Eigensystem, EnergyGroups,
                       bloch_bands, eigendecompose, eigenenergy_groups,
                       flatness, spectroscopy_lines, verify_cls)
from .dynamics import (EvolutionResult, NoiseParams, annihilation_operators,
                       doublon_swap_time, evolve_bruteforce, evolve_state,
                       level_probability, level_probability_rho,
                       lindblad_evolve, pair_probability,
                       pair_probability_rho, run_lindblad_walk, run_walk,
                       site_occupation, site_occupation_rho, swap_time,
                       two_site_envelope)
from .caging import (CagingReport, CagingWitness, ReachabilityResult,
                     caged_partner, classify_partition, frozen_sites,
                     hardcore_subspace_hamiltonian, integer_partitions,
                     unreachable_states)
from .measurement import (ConfusionMatrix, Interval, ShotRecord,
                          apply_confusion, clopper_pearson, correct_readout,
                          corrected_interval, sample_shots)
from .config import (ConfigError, ExperimentConfig, load_config,
                     load_config_file)
from .presets import PRESETS, preset_config, preset_text

__version__ = "0.1.0"

__all__ = [name for name in dir() if not name.startswith("_")]
