"""Finite chains of identical beam splitters.

A chain of ``M`` splitters with transmission ``T`` and reflection ``L``
attenuates the travelling mode and dumps the rest into ``M`` scatter ports.
This module computes the resulting output states directly at finite ``M``
(closed-form populations, literal enumeration, or iterated single-splitter
Kraus maps) so that the continuum formulas in :mod:`lossyprop.propagation`
can be checked against a discrete model they were not derived from in code.

Phase convention: ``T = |T| e^{i phi}`` and ``L = i |L| e^{i phi}``, which
satisfies both ``|L|^2 + |T|^2 = 1`` and ``L conj(T) + T conj(L) = 0``.
"""

from __future__ import annotations

import cmath
import math
from dataclasses import dataclass, field
from itertools import product

import numpy as np

from .exceptions import ConfigError, CutoffExceeded, InvalidLossFraction
from .fock import (
    SingleModeDensityMatrix,
    TwoModeDensityMatrix,
    TwoModeState,
    check_cutoff,
    single_mode_density_matrix,
    two_mode_density_matrix,
)

UNITARITY_TOL = 1e-12


@dataclass(frozen=True)
class SplitterChain:
    m_count: int
    transmission: complex
    reflection: complex

    def __post_init__(self):
        if int(self.m_count) != self.m_count or self.m_count < 0:
            raise ConfigError(f"number of splitters must be a non-negative integer, got {self.m_count}")
        t, l = complex(self.transmission), complex(self.reflection)
        if abs(abs(l) ** 2 + abs(t) ** 2 - 1) > UNITARITY_TOL:
            raise ConfigError("|L|^2 + |T|^2 != 1")
        if abs(l * t.conjugate() + t * l.conjugate()) > UNITARITY_TOL:
            raise ConfigError("L conj(T) + T conj(L) != 0")

    @property
    def survival(self) -> float:
        """Probability that one photon crosses the whole chain, ``|T|^(2M)``."""
        return abs(self.transmission) ** (2 * self.m_count)


def make_chain(m: int, loss_fraction: float, phase: float = 0.0) -> SplitterChain:
    """Chain of ``m`` splitters each losing ``loss_fraction`` of the power.

    Args:
        m: number of splitters.
        loss_fraction: ``|L|^2`` per splitter, strictly between 0 and 1.
        phase: phase of ``T`` per splitter, radians.
    """
    if not 0.0 < loss_fraction < 1.0:
        raise InvalidLossFraction(f"loss fraction must lie in (0, 1), got {loss_fraction!r}")
    rot = cmath.exp(1j * phase)
    t = math.sqrt(1.0 - loss_fraction) * rot
    l = 1j * math.sqrt(loss_fraction) * rot
    return SplitterChain(m, t, l)


def chain_for_depth(m: int, depth: float, phase: float = 0.0) -> SplitterChain:
    """Discretize a medium of total optical depth and phase into ``m`` splitters.

    ``|L|^2 = depth / m`` and ``arg T = phase / m``; as ``m`` grows the chain
    survival ``(1 - depth/m)^m`` tends to ``e^-depth``.
    """
    if m < 1:
        raise ConfigError("need at least one splitter")
    return make_chain(m, depth / m, phase / m)


def build_transfer_matrix(chain: SplitterChain) -> np.ndarray:
    """``(M+1) x (M+1)`` matrix taking output creation operators to input ones.

    Row 0 expresses the input mode, rows ``1..M`` the auxiliary input ports;
    column 0 is the transmitted output, columns ``1..M`` the scatter ports.
    """
    m, t, l = chain.m_count, complex(chain.transmission), complex(chain.reflection)
    u = np.zeros((m + 1, m + 1), dtype=complex)
    u[0, 0] = t ** m
    for j in range(1, m + 1):
        u[0, j] = l * t ** (j - 1)
    for i in range(1, m + 1):
        u[i, 0] = l * t ** (m - i)
        u[i, i] = t
        for j in range(i + 1, m + 1):
            u[i, j] = l * l * t ** (j - i - 1)
    return u


def input_mode_coefficients(chain: SplitterChain) -> np.ndarray:
    """Expansion of the input creation operator over ``(a_M, s_1, ..., s_M)``."""
    return build_transfer_matrix(chain)[0]


def finite_m_single_mode_output(n: int, chain: SplitterChain,
                                n_max: int | None = None) -> SingleModeDensityMatrix:
    """Transmitted-mode state for Fock input ``|n>`` after the whole chain.

    The scatter-port sum collapses through the geometric series
    ``sum_i |T|^{2(i-1)} |L|^2 = 1 - |T|^{2M}``, leaving binomial populations
    at survival ``|T|^{2M}``.
    """
    n_max = check_cutoff(n if n_max is None else n_max)
    if not 0 <= n <= n_max:
        raise CutoffExceeded(f"photon number {n} exceeds cutoff {n_max}")
    s = chain.survival
    lost = 1.0 - s
    pops = np.zeros(n_max + 1)
    for k in range(n + 1):
        pops[k] = math.comb(n, k) * s ** k * lost ** (n - k)
    return single_mode_density_matrix(n_max, np.diag(pops).astype(complex))


def enumerate_finite_m_populations(n: int, chain: SplitterChain) -> np.ndarray:
    """Transmitted-mode populations by brute-force multinomial enumeration.

    Sums over every way of distributing ``n`` photons among the transmitted
    mode and the ``M`` scatter ports. Exponential in size, so it is limited
    to ``n <= 4`` and ``M <= 8``.
    """
    m = chain.m_count
    if n > 4 or m > 8:
        raise ConfigError("literal enumeration limited to n <= 4, M <= 8")
    t2 = abs(chain.transmission) ** 2
    l2 = abs(chain.reflection) ** 2
    pops = np.zeros(n + 1)
    for counts in product(range(n + 1), repeat=m + 1):
        if sum(counts) != n:
            continue
        n0, rest = counts[0], counts[1:]
        multinomial = math.factorial(n)
        for c in counts:
            multinomial //= math.factorial(c)
        term = multinomial * t2 ** (n0 * m)
        term *= t2 ** sum(i * c for i, c in enumerate(rest))  # port i+1 carries |T|^{2i}
        term *= l2 ** sum(rest)
        pops[n0] += term
    return pops


@dataclass(frozen=True)
class KrausChannel:
    """Single-splitter loss map on a truncated mode.

    ``operators[k]`` removes exactly ``k`` photons.
    """

    n_max: int
    operators: np.ndarray = field(repr=False)

    def completeness_defect(self) -> float:
        total = np.einsum("kij,kil->jl", self.operators.conj(), self.operators)
        return float(np.max(np.abs(total - np.eye(self.n_max + 1))))

    def superoperator(self) -> np.ndarray:
        """``S[p, p', l, l'] = sum_k A_k[p, l] conj(A_k[p', l'])``."""
        a = self.operators
        return np.einsum("kpl,kqm->pqlm", a, a.conj())


def single_splitter_kraus(n_max: int, transmission: complex,
                          reflection: complex | None = None) -> KrausChannel:
    """Kraus operators ``<n-k|A_k|n> = sqrt(C(n,k)) T^(n-k) L^k``.

    If ``reflection`` is omitted it is fixed by the phase convention of this
    module.
    """
    n_max = check_cutoff(n_max)
    t = complex(transmission)
    if abs(t) > 1 + UNITARITY_TOL:
        raise ConfigError(f"|T| must not exceed 1, got {abs(t)}")
    if reflection is None:
        rot = t / abs(t) if t != 0 else 1.0
        reflection = 1j * math.sqrt(max(0.0, 1.0 - abs(t) ** 2)) * rot
    l = complex(reflection)
    size = n_max + 1
    ops = np.zeros((size, size, size), dtype=complex)
    for k in range(size):
        for n in range(k, size):
            ops[k, n - k, n] = math.sqrt(math.comb(n, k)) * t ** (n - k) * l ** k
    return KrausChannel(n_max, ops)


def kraus_for_chain(chain: SplitterChain, n_max: int) -> KrausChannel:
    return single_splitter_kraus(n_max, chain.transmission, chain.reflection)


def iterate_channel(rho: SingleModeDensityMatrix, channel: KrausChannel,
                    times: int) -> SingleModeDensityMatrix:
    """Apply ``rho -> sum_k A_k rho A_k^dagger`` ``times`` times."""
    if rho.n_max != channel.n_max:
        raise ConfigError("density matrix and channel cutoffs differ")
    a = channel.operators
    mat = np.array(rho.elements)
    for _ in range(times):
        mat = np.einsum("kij,jl,kml->im", a, mat, a.conj())
    return single_mode_density_matrix(rho.n_max, mat)


def finite_m_two_mode_output(state: TwoModeState, chain_a: SplitterChain,
                             chain_b: SplitterChain) -> TwoModeDensityMatrix:
    """Two-mode output after independent finite chains on modes a and b.

    Each mode's single-splitter map is applied ``M`` times to its own index
    pair of the ``[p, q, p', q']`` tensor. Tracing out ``2M`` scatter ports
    from the full multimode state gives the same matrix, at exponential cost.
    """
    n_max = state.n_max
    s_a = kraus_for_chain(chain_a, n_max).superoperator()
    s_b = kraus_for_chain(chain_b, n_max).superoperator()
    rho = np.einsum("lm,no->lmno", state.alpha, state.alpha.conj())
    for _ in range(chain_a.m_count):
        rho = np.einsum("pPlL,lqLQ->pqPQ", s_a, rho)
    for _ in range(chain_b.m_count):
        rho = np.einsum("qQmM,pmPM->pqPQ", s_b, rho)
    dim = (n_max + 1) ** 2
    mat = rho.reshape(dim, dim)
    return two_mode_density_matrix(n_max, 0.5 * (mat + mat.conj().T))


def single_mode_convergence(n: int, depth: float, m_values) -> list[float]:
    """Max-element error of the finite chain against the continuum law.

    Returns one error per entry of ``m_values``.
    """
    from .medium import ConstantProfile
    from .propagation import single_mode_output

    continuum = single_mode_output(n, ConstantProfile(depth), 1.0).elements
    errors = []
    for m in m_values:
        finite = finite_m_single_mode_output(n, chain_for_depth(int(m), depth)).elements
        errors.append(float(np.max(np.abs(finite - continuum))))
    return errors


def loglog_slope(xs, ys) -> float:
    """Least-squares slope of ``log y`` against ``log x``."""
    return float(np.polyfit(np.log(np.asarray(xs, float)), np.log(np.asarray(ys, float)), 1)[0])
