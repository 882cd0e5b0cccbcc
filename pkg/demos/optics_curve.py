# %% [markdown]
# Collection efficiency and polarisation purity versus numerical aperture
#
# Free-space collection grows with NA but the polarisation of the collected
# light degrades. Coupling into a single-mode fibre filters the mode and
# restores the ion-photon state at the cost of some efficiency.

# %%
import numpy as np

from ionlink import optics

grid = np.array([0.1, 0.2, 0.3, 0.4, 0.5, 0.6, 0.7, 0.8])
points = optics.curve_scan(grid, quadrature_points=128)
print(" ".join(f"{h:>18}" for h in optics.CURVE_HEADER))
for row in points:
    print(" ".join(f"{v:18.5f}" for v in row))

# %%
na = 0.6
eta = optics.fiber_coupled_collection(na)
print(f"NA {na}: fibre {eta:.4f}, ratio to free space {eta / optics.free_space_collection(na):.3f}, "
      f"fibre fidelity {optics.fiber_fidelity(na):.12f}")
