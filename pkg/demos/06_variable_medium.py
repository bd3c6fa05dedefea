"""Propagation through a medium whose loss changes along the way.

Only the accumulated optical depth and phase matter, so a profile given as
functions of position is integrated once and then treated like any other.
"""

# %%
import numpy as np

from lossyprop.medium import ChannelPair, ConstantProfile, TabulatedProfile
from lossyprop.metrics import coherence_power
from lossyprop.propagation import noon_output

wavy = TabulatedProfile.from_functions(
    mu=lambda z: 0.2 + 0.1 * np.sin(z),
    eta=lambda z: 1.0 + 0.0 * z,
    x_max=20.0,
)
exact = 0.2 * 10.0 + 0.1 * (1 - np.cos(10.0))
print("optical depth at 10 km:", wavy.optical_depth(10.0), "exact", exact)

# %%
variable = ChannelPair(wavy, ConstantProfile(0.2, 1.0))
flat = ChannelPair.constant(0.2, 1.0)
for x in (0.0, 2.0, 4.0, 8.0):
    print(f"x = {x:3.1f} km   N00N(4) coherence power: variable {coherence_power(noon_output(4, variable, x)):.3e}"
          f"   constant {coherence_power(noon_output(4, flat, x)):.3e}")
