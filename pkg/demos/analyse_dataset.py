# %% [markdown]
# Tomography of the built-in heralded ion-ion tables
#
# Each herald pattern comes with 9 Pauli settings x 4 outcomes. We fit a
# density matrix per pattern, look at the figures of merit and attach
# parametric bootstrap error bars.

# %%
import numpy as np

from ionlink.datasets import builtin_dataset
from ionlink.pipeline import PipelineOptions, run_pipeline
from ionlink.plotdata import pauli_bars

data = builtin_dataset()
print("patterns:", data.keys, "heralds:", data.grand_total)

# %%
report = run_pipeline(data, PipelineOptions(bootstrap_samples=100, seed=7))
for key, m in report.merits.items():
    print(f"{key}: FEF {m.fully_entangled_fraction:.4f}  E_F {m.entanglement_of_formation:.4f}")
avg = report.average
print(f"average: FEF {avg.fully_entangled_fraction:.4f}  E_F {avg.entanglement_of_formation:.4f}")

# %% [markdown]
# Bootstrap spread per pattern and of the pattern average.

# %%
for metric in ("fully_entangled_fraction", "entanglement_of_formation"):
    print(metric, "per-pattern sem", round(report.mean_pattern_sem(metric), 4),
          "sem of average", round(report.average_sem(metric), 4))

# %% [markdown]
# Measured versus predicted two-qubit correlators, with the 95% band expected
# from shot noise alone.

# %%
rows = pauli_bars(data, report.fits, samples=500, seed=1)
inside = np.mean([lo <= meas <= hi for _, _, meas, _, lo, hi, _ in rows])
print(f"{inside:.0%} of correlators inside their band")
print(np.round(report.density("a").real, 3))
