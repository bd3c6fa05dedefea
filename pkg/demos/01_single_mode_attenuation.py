"""Fock states in a lossy fibre thin out binomially.

A photon-number state |n> sent through a medium of optical depth d keeps
each photon independently with probability e^-d. The populations therefore
follow a binomial law and the mean photon number falls exactly like a
classical intensity.
"""

# %%
import math

import numpy as np

from lossyprop.medium import ConstantProfile, PiecewiseConstantProfile
from lossyprop.propagation import single_mode_output

profile = ConstantProfile(mu=0.2, eta=1.0)  # 1/km

# %% [markdown]
# At x = ln 2 / mu exactly half of the photons survive, so |4> ends up in a
# mixture with weights 1, 4, 6, 4, 1 (over 16).

# %%
x_half = math.log(2) / profile.mu
rho = single_mode_output(4, profile, x_half)
print("populations at half survival:", np.round(rho.populations() * 16, 12))

# %%
for x in (0.0, 5.0, 10.0, 20.0):
    rho = single_mode_output(10, profile, x)
    print(f"x = {x:5.1f} km   <n> = {rho.mean_photon_number():.6f}   10 e^(-mu x) = {10 * math.exp(-0.2 * x):.6f}")

# %% [markdown]
# A medium made of two different fibres only cares about the accumulated
# optical depth, 2 km at 0.5/km then 0.1/km after that.

# %%
spliced = PiecewiseConstantProfile.from_segments([
    {"until_km": 2.0, "mu": 0.5, "eta": 1.0},
    {"until_km": None, "mu": 0.1, "eta": 1.0},
])
print("optical depth at 6 km:", spliced.optical_depth(6.0))
print("P(photon survives):", single_mode_output(1, spliced, 6.0).populations()[1])
