"""Spectra of the one-step map and a two-state metastable regime.

For a fixed input state the reservoir's one cycle is a quantum channel;
its matrix form (the superoperator) has a leading eigenvalue of 1 and a
second eigenvalue l_2 that sets the forgetting rate: T(eps) scales as
1 / ln(1 / |l_2|).  Sweeping tau_b moves the channel from near-unitary
(slow forgetting) to well-mixed.

When l_2 is real, isolated, and close to 1, the channel spends long
stretches in one of two extreme metastable states and hops between them
like a classical two-state chain; the decomposition below extracts the
two states, the classifying measurement, and the effective hop generator.
"""

import numpy as np

from qrtomo.qcore import make_rng
from qrtomo.reservoir import ReservoirConfig
from qrtomo.spectral import (
    build_superoperator,
    ensemble_reports,
    metastable_decomposition,
    spectral_report,
    superoperator_from_map,
)

# --- forgetting rate across the evolution-time scale -------------------
rng = make_rng(7)
print("median 1/|l_2| over 30 random input states:")
for tau_b in (0.5, 2.5, 10.0):
    cfg = ReservoirConfig(n_m=4, n_e=2, tau_b=tau_b, observable_set="z")
    reports = ensemble_reports(cfg, 30, rng)
    inv = np.median([r.inv_lambda2 for r in reports])
    t01 = np.median([r.esp_timescale(0.1) for r in reports])
    print(f"  tau_b = {tau_b:4.1f}: 1/|l_2| = {inv:.4f}, "
          f"steps to forget 90% = {t01:.1f}")

# near tau_b = 0 the channel is close to the identity and barely forgets;
# large tau_b mixes faster, which is what makes the reservoir usable

# --- one concrete channel ----------------------------------------------
cfg = ReservoirConfig(n_m=3, n_e=1, tau_b=5.0)
beta = np.diag([0.8, 0.2]).astype(complex)
sup = build_superoperator(cfg, beta)
rep = spectral_report(sup)
print(f"\nchannel at tau_b = 5 with a fixed mixed input ({sup.source}):")
print("  leading eigenvalues:",
      np.array2string(rep.eigenvalues[:4], precision=4))
print(f"  mean eigenvalue-spacing ratio <r_k> = {rep.ratio_mean:.4f}")

# --- metastable two-state decomposition --------------------------------
# a measure-and-prepare channel whose populations follow a slow classical
# chain: stay with probability 0.95, hop with probability 0.05
a, b = 0.05, 0.05
t = np.array([[1 - a, b], [a, 1 - b]])
chain = superoperator_from_map(
    lambda x: np.diag(t @ np.diag(x)), 2, source="slow two-state chain")
dec = metastable_decomposition(chain)
print(f"\nmetastable decomposition of the {chain.source}:")
print(f"  l_2 = {dec.lambda2:.4f} (relaxation over "
      f"{1.0 / (1.0 - dec.lambda2):.0f} steps)")
print("  extreme metastable state 1:\n", np.round(dec.ems_1.real, 4))
print("  extreme metastable state 2:\n", np.round(dec.ems_2.real, 4))
print("  classifying POVM element P1:\n", np.round(dec.povm_p1.real, 4))
print("  effective classical generator:\n", np.round(dec.a_eff, 4))
print("  steady state:\n", np.round(dec.rho_ss.real, 4))
