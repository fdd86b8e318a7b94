"""Quantum reservoir tomography of temporal quantum maps.

A spin-network reservoir driven by a stream of input density matrices
produces measured features; a trained linear readout reconstructs the
time-dependent outputs of temporal quantum maps (delayed and averaged
depolarizing channels, the quantum switch, entangling unitaries, Bell
creators).  Companion diagnostics cover memory capacity, superoperator
spectra and metastability.
"""

__version__ = "0.1.0"

from . import channels, experiments, metrics, qcore, readout, reservoir, spectral
from .channels import (
    InputStream,
    NarmaParams,
    TemporalMapSpec,
    apply_temporal_map,
    depolarize,
    generate_input_stream,
    narma_p,
)
from .experiments import (
    ExperimentConfig,
    load_config,
    run_memory_sweep,
    run_spectral_sweep,
    run_tomography,
)
from .metrics import MemoryProfile, distance_correlation_sq, memory_profile, rmsf
from .qcore import (
    fidelity,
    haar_random_pure,
    make_rng,
    negativity,
    partial_trace_env,
    project_spectrahedron,
    trace_distance,
)
from .readout import ReadoutModel, baseline_features, fit_ridge, predict_states
from .reservoir import ReservoirConfig, ReservoirState, evolve_step, run_sequence
from .spectral import build_superoperator, metastable_decomposition, spectral_report
