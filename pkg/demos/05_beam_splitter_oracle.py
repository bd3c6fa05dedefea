"""The continuum loss law as a limit of many weak beam splitters.

Replace a medium of optical depth d by M splitters, each reflecting a
fraction d/M of the light into its own scatter port. The finite-chain output
approaches the continuum one with error shrinking like 1/M.
"""

# %%
import numpy as np

from lossyprop.fock import make_two_mode_state
from lossyprop.medium import ChannelPair
from lossyprop.propagation import general_output
from lossyprop.splitter import (
    build_transfer_matrix,
    chain_for_depth,
    finite_m_two_mode_output,
    loglog_slope,
    single_mode_convergence,
)

# %%
chain = chain_for_depth(8, depth=1.0, phase=0.3)
u = build_transfer_matrix(chain)
print("transfer matrix unitary:", np.allclose(u.conj().T @ u, np.eye(9)))
print("survival |T|^(2M):", chain.survival, "vs e^-1 =", np.exp(-1))

# %%
m_values = [10, 100, 1000, 10000]
errors = single_mode_convergence(4, 1.0, m_values)
for m, e in zip(m_values, errors):
    print(f"M = {m:6d}   max |finite - continuum| = {e:.3e}")
print("log-log slope:", loglog_slope(m_values, errors))

# %% [markdown]
# The same check for an entangled two-mode input, using the single-splitter
# Kraus map iterated M times on each arm.

# %%
rng = np.random.default_rng(3)
state = make_two_mode_state(2, rng.normal(size=(3, 3)) + 1j * rng.normal(size=(3, 3)))
exact = general_output(state, ChannelPair.constant(0.8, 0.3, 1.3, -0.4), 1.0)
for m in (500, 5000):
    finite = finite_m_two_mode_output(state, chain_for_depth(m, 0.8, 0.3), chain_for_depth(m, 1.3, -0.4))
    print(f"M = {m:5d}   two-mode error {np.max(np.abs(finite.elements - exact.elements)):.2e}")
