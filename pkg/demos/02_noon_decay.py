"""How fast a N00N state forgets its coherence.

The coherence between |N,0> and |0,N> needs all N photons to survive, so
its magnitude shrinks like e^{-N mu x / 2} per arm. Coherence power (the
squared off-diagonal weight) then falls with log-slope -2 N mu.
"""

# %%
import numpy as np

from lossyprop.medium import ChannelPair
from lossyprop.metrics import coherence_power, negativity
from lossyprop.propagation import noon_output

channels = ChannelPair.constant(mu_a=0.2, eta_a=1.0)
xs = np.linspace(0.0, 5.0, 101)

# %%
for n in (1, 2, 5, 10):
    coh = [coherence_power(noon_output(n, channels, float(x))) for x in xs]
    slope = np.polyfit(xs, np.log(coh), 1)[0]
    print(f"N = {n:2d}   fitted log-slope {slope:+.6f}   expected {-2 * n * 0.2:+.2f}")

# %% [markdown]
# Entanglement goes the same way: negativity starts at 1/2 and decays as the
# surviving coherence does.

# %%
for x in (0.0, 0.5, 1.0, 2.0, 5.0):
    rho = noon_output(10, channels, x)
    print(f"x = {x:3.1f} km   negativity {negativity(rho):.3e}   purity {rho.purity:.4f}")

# %% [markdown]
# A phase mismatch between the arms rotates the coherence but never changes
# its size.

# %%
skewed = ChannelPair.constant(mu_a=0.2, eta_a=1.0, mu_b=0.2, eta_b=-1.0)
a, b = noon_output(3, channels, 1.0), noon_output(3, skewed, 1.0)
print("|rho_(3,0),(0,3)|:", abs(a.element(3, 0, 0, 3)), abs(b.element(3, 0, 0, 3)))
print("phase difference (N * 2 rad, wrapped):", np.angle(b.element(3, 0, 0, 3) / a.element(3, 0, 0, 3)))
