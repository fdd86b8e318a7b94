"""Temporal maps that mix several past inputs into one target state.

Three target families built from the same input stream:

  moving_average   uniform mixture of the last d+1 inputs
  weighted_average geometrically decaying mixture of the last d+1 inputs
  convex_mixture   arbitrary convex weights, here favoring the oldest input

All three are convex combinations of past states, so a linear readout on
a reservoir with enough memory can track them.  Inputs can also be held
for several cycles (hold_steps) to slow the drive down.
"""

from qrtomo.experiments import load_config, run_tomography

base = {
    "reservoir": {"n_m": 4, "n_e": 1, "tau_b": 2.6, "multiplexity": 3,
                  "observable_set": "zz"},
    "stream": {"washout": 200, "train": 800, "eval": 200, "hold_steps": 4,
               "seeds": [1]},
}

tasks = {
    "moving_average": {"kind": "moving_average", "delays": [3]},
    "weighted_average": {"kind": "weighted_average", "delays": [3]},
    "convex_mixture": {"kind": "convex_mixture",
                       "weights": [0.1, 0.2, 0.3, 0.4]},
}

print("temporal mixtures over the last 4 inputs (hold_steps = 4):")
for name, task in tasks.items():
    cfg = load_config({**base, "task": task})
    out = run_tomography(cfg)
    r = out.runs[0]
    print(f"  {name:17s} rms fidelity = {r.rmsf:.5f} "
          f"(error {100 * r.error:.3f}%)")

# holding each input for several cycles gives the reservoir more passes
# over the same state; compare against an unheld drive
fast = {**base, "stream": {**base["stream"], "hold_steps": 1},
        "task": tasks["moving_average"]}
out = run_tomography(load_config(fast))
print(f"\nsame moving average without holding inputs: "
      f"rms fidelity = {out.runs[0].rmsf:.5f}")
