# %% [markdown]
# Error budget and rate of the heralded link
#
# Start from the default node and analyser parameters, then switch error
# channels off one at a time to see what each costs in fidelity.

# %%
from dataclasses import replace

import numpy as np

from ionlink.netsim import (
    LinkConfig,
    effective_attempt_rate,
    entanglement_rate,
    heralded_state,
    sample_attempts_until_success,
    success_probability,
)

cfg = LinkConfig()


def mean_fidelity(alice, bob, analyser=cfg.analyser):
    out = heralded_state(node_a=alice, node_b=bob, ap=analyser, timing=cfg.timing)
    return float(np.mean([h.fidelity() for h in out.patterns]))


base = mean_fidelity(cfg.alice, cfg.bob)
print(f"default heralded fidelity {base:.4f}")

# %%
channels = {
    "dark counts": dict(dark_rate_per_detector=0.0),
    "memory dephasing": dict(dephasing_error=0.0),
    "analysis rotations": dict(rotation_error_per_pulse=0.0),
}
for name, change in channels.items():
    f = mean_fidelity(replace(cfg.alice, **change), replace(cfg.bob, **change))
    print(f"{name:>20}: {f - base:.2e}")
perfect = replace(cfg.analyser, mode_overlap=1.0)
print(f"{'mode mismatch':>20}: {mean_fidelity(cfg.alice, cfg.bob, perfect) - base:.2e}")

# %% [markdown]
# Rates: one attempt per period, success needs one photon from each side.

# %%
rate = effective_attempt_rate(cfg.timing)
p = success_probability(cfg.alice, cfg.bob)
print(f"attempt rate {rate:.0f}/s, success probability {p:.3e}, "
      f"{entanglement_rate(p, rate):.1f} links/s")
draws, hist = sample_attempts_until_success(p, seed=3, n_draws=20000)
print(f"mean attempts {draws.mean():.0f} (expected {1 / p:.0f})")
