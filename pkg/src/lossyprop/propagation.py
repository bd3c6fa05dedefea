"""Continuum loss channel for one and two bosonic modes.

A mode that has crossed optical depth ``d`` and accumulated phase ``phi``
maps its density-matrix element ``rho[l, l']`` onto ``rho[p, p']`` with
``l - p = l' - p' = k`` photons lost, weighted by

    sqrt(l! l'! / (p! p'!)) / k! * (1 - e^-d)^k * e^-(p + p') d / 2 * e^i (p - p') phi

The two modes of a two-mode state are propagated independently. The
production path :func:`general_output` evaluates the rearranged sum (output
indices outer, input indices inner); :func:`general_output_form_a` evaluates
the original input-major sum with exact integer factorials and is kept as a
cross-check.
"""

from __future__ import annotations

import math

import numpy as np

from .exceptions import CutoffExceeded
from .fock import (
    CombinatoricsTable,
    SingleModeDensityMatrix,
    TwoModeDensityMatrix,
    TwoModeState,
    check_cutoff,
    single_mode_density_matrix,
    two_mode_density_matrix,
)
from .medium import ChannelPair, MediumProfile, PropagationPoint, as_point


def survival_probability(depth: float) -> float:
    """Per-photon transmission ``e^-depth``."""
    return math.exp(-depth)


def loss_probability(depth: float) -> float:
    """``1 - e^-depth`` without cancellation at small depth."""
    return -math.expm1(-depth)


def loss_weights(n_max: int, depth: float, phase: float = 0.0) -> np.ndarray:
    """Transfer weights ``W[k, p, p']`` for one mode.

    ``W[k, p, p']`` multiplies input element ``rho[p + k, p' + k]`` in output
    element ``rho[p, p']``. Entries whose input index would exceed the cutoff
    are zero.
    """
    table = CombinatoricsTable.for_cutoff(n_max)
    lf = table.log_factorials
    size = n_max + 1
    n = np.arange(size)
    loss = loss_probability(depth)
    # e^{-(p + p') d / 2} e^{i (p - p') phi}, as an outer product of per-index factors
    amp = np.exp(-0.5 * depth * n + 1j * phase * n)
    envelope = np.outer(amp, amp.conj())

    w = np.zeros((size, size, size), dtype=complex)
    for k in range(size):
        m = size - k  # p, p' range over 0..n_max - k
        p = n[:m]
        log_root = 0.5 * (lf[p + k][:, None] + lf[p + k][None, :] - lf[p][:, None] - lf[p][None, :])
        w[k, :m, :m] = np.exp(log_root - lf[k]) * (loss ** k) * envelope[:m, :m]
    return w


def _apply_two_mode_loss(rho: np.ndarray, w_a: np.ndarray, w_b: np.ndarray) -> np.ndarray:
    """Accumulate the output tensor ``[p, q, p', q']`` from an input tensor.

    Loops over the photon-loss counts ``(k, j) = (l - p, m - q)`` so that every
    term of the inner ``(l, m)`` sum lands on its output element in one
    vectorized slice update.
    """
    size = rho.shape[0]
    out = np.zeros_like(rho)
    for k in range(size):
        ma = size - k
        wa = w_a[k, :ma, :ma][:, None, :, None]
        for j in range(size):
            mb = size - j
            wb = w_b[j, :mb, :mb][None, :, None, :]
            out[:ma, :mb, :ma, :mb] += wa * wb * rho[k:, j:, k:, j:]
    return out


def _symmetrized(n_max: int, out: np.ndarray) -> TwoModeDensityMatrix:
    dim = (n_max + 1) ** 2
    mat = out.reshape(dim, dim)
    asym = float(np.max(np.abs(mat - mat.conj().T)))
    return two_mode_density_matrix(n_max, 0.5 * (mat + mat.conj().T), asymmetry=asym)


def evolve_two_mode(rho: TwoModeDensityMatrix, channels: ChannelPair, point) -> TwoModeDensityMatrix:
    """Propagate an arbitrary (possibly mixed) two-mode density matrix."""
    point = as_point(point)
    d_a, d_b, phi_a, phi_b = channels.depths(point)
    n_max = rho.n_max
    out = _apply_two_mode_loss(
        rho.tensor(), loss_weights(n_max, d_a, phi_a), loss_weights(n_max, d_b, phi_b)
    )
    return _symmetrized(n_max, out)


def general_output(state: TwoModeState, channels: ChannelPair, point) -> TwoModeDensityMatrix:
    """Output density matrix of a pure two-mode input after lossy propagation.

    Args:
        state: normalized input with coefficients ``alpha[l, m]``.
        channels: media traversed by modes a and b.
        point: :class:`PropagationPoint`, a ``(x_a, x_b)`` tuple, or a single
            distance used for both modes.

    Returns:
        The output matrix, symmetrized; ``asymmetry`` records the rounding
        defect removed by symmetrization.
    """
    point = as_point(point)
    d_a, d_b, phi_a, phi_b = channels.depths(point)
    n_max = state.n_max
    alpha = state.alpha
    rho_in = np.einsum("lm,no->lmno", alpha, alpha.conj())
    out = _apply_two_mode_loss(
        rho_in, loss_weights(n_max, d_a, phi_a), loss_weights(n_max, d_b, phi_b)
    )
    return _symmetrized(n_max, out)


def output_summand(
    alpha: np.ndarray,
    p: int, q: int, pp: int, qq: int,
    l: int, m: int,
    depth_a: float, depth_b: float,
    phase_a: float = 0.0, phase_b: float = 0.0,
) -> complex:
    """One ``(l, m)`` term of output element ``(p, q), (p', q')``, prefactors included.

    Any term that would need a factorial of a negative integer (``l < p``,
    ``m < q``, or a partner index ``l + p' - p`` / ``m + q' - q`` outside the
    grid) is exactly zero.
    """
    n_max = alpha.shape[0] - 1
    lp, mq = l + pp - p, m + qq - q
    if l < p or m < q or min(p, q, pp, qq, lp, mq) < 0 or max(l, m, lp, mq) > n_max:
        return 0.0j
    lf = CombinatoricsTable.for_cutoff(n_max).log_factorials
    log_root = 0.5 * (lf[l] + lf[lp] + lf[m] + lf[mq] - lf[p] - lf[q] - lf[pp] - lf[qq])
    weight = math.exp(log_root - lf[l - p] - lf[m - q])
    weight *= loss_probability(depth_a) ** (l - p) * loss_probability(depth_b) ** (m - q)
    weight *= math.exp(-0.5 * (p + pp) * depth_a - 0.5 * (q + qq) * depth_b)
    phase = np.exp(1j * ((p - pp) * phase_a + (q - qq) * phase_b))
    return complex(alpha[l, m] * np.conj(alpha[lp, mq]) * weight * phase)


def general_output_form_a(state: TwoModeState, channels: ChannelPair, point) -> TwoModeDensityMatrix:
    """Same output as :func:`general_output`, summed input-major.

    Iterates over input pairs ``(l, m), (l', m')`` and photons kept
    ``(p, q)``, using exact integer factorials. Slow; meant for checking.
    """
    point = as_point(point)
    d_a, d_b, phi_a, phi_b = channels.depths(point)
    n_max = state.n_max
    size = n_max + 1
    alpha = state.alpha
    fact = [math.factorial(i) for i in range(size)]
    loss_a, loss_b = loss_probability(d_a), loss_probability(d_b)
    surv_a, surv_b = math.exp(-d_a), math.exp(-d_b)

    def keep_coeffs(l, lp, depth, loss, surv):
        # coefficient for each kept count p = 0..l; zero where p + lp - l < 0
        c = np.zeros(size)
        for p in range(l + 1):
            p2 = p + lp - l
            if p2 < 0:
                continue
            root = math.sqrt(fact[l] * fact[lp] / (fact[p] * fact[p2]))
            c[p] = root / fact[l - p] * surv ** p * loss ** (l - p)
        return c * math.exp(-0.5 * (lp - l) * depth)

    ca = {(l, lp): keep_coeffs(l, lp, d_a, loss_a, surv_a) for l in range(size) for lp in range(size)}
    cb = {(m, mp): keep_coeffs(m, mp, d_b, loss_b, surv_b) for m in range(size) for mp in range(size)}

    out = np.zeros((size,) * 4, dtype=complex)
    nz = [(l, m) for l in range(size) for m in range(size) if alpha[l, m] != 0]
    for l, m in nz:
        for lp, mp in nz:
            amp = alpha[l, m] * np.conj(alpha[lp, mp])
            amp *= np.exp(1j * ((l - lp) * phi_a + (m - mp) * phi_b))
            block = amp * np.outer(ca[l, lp], cb[m, mp])
            # block[p, q] lands on (p, q), (p + lp - l, q + mp - m)
            sa, sb = lp - l, mp - m
            pa = np.arange(max(0, -sa), min(l, size - 1 - sa) + 1)
            qb = np.arange(max(0, -sb), min(m, size - 1 - sb) + 1)
            if pa.size == 0 or qb.size == 0:
                continue
            P, Q = pa[:, None], qb[None, :]
            out[P, Q, P + sa, Q + sb] += block[P, Q]
    return _symmetrized(n_max, out)


def noon_output(n: int, channels: ChannelPair, point, n_max: int | None = None) -> TwoModeDensityMatrix:
    """Closed-form output for the N00N input ``(|n,0> + |0,n>)/sqrt(2)``.

    Two binomial blocks on the diagonal plus the coherence pair linking
    ``|n,0>`` and ``|0,n>``, whose magnitude is ``e^-n (d_a + d_b) / 2 / 2``.
    """
    n_max = check_cutoff(n if n_max is None else n_max)
    if not 1 <= n <= n_max:
        raise CutoffExceeded(f"N00N photon number {n} must lie in [1, {n_max}]")
    point = as_point(point)
    d_a, d_b, phi_a, phi_b = channels.depths(point)
    size = n_max + 1
    out = np.zeros((size,) * 4, dtype=complex)
    for k in range(n + 1):
        out[k, 0, k, 0] += 0.5 * _binomial_population(n, k, d_a)
        out[0, k, 0, k] += 0.5 * _binomial_population(n, k, d_b)
    coh = 0.5 * math.exp(-0.5 * n * (d_a + d_b)) * np.exp(1j * n * (phi_a - phi_b))
    out[n, 0, 0, n] = coh
    out[0, n, n, 0] = np.conj(coh)
    return two_mode_density_matrix(n_max, out)


def _binomial_population(n: int, k: int, depth: float) -> float:
    # C(n, k) s^k (1 - s)^(n - k), s = e^-depth
    return math.comb(n, k) * math.exp(-k * depth) * loss_probability(depth) ** (n - k)


def single_mode_output(n: int, profile: MediumProfile, x: float,
                       n_max: int | None = None) -> SingleModeDensityMatrix:
    """Output of the Fock input ``|n>`` after distance ``x``: binomial populations."""
    n_max = check_cutoff(n if n_max is None else n_max)
    if not 0 <= n <= n_max:
        raise CutoffExceeded(f"photon number {n} exceeds cutoff {n_max}")
    depth = profile.optical_depth(x)
    pops = np.zeros(n_max + 1)
    for k in range(n + 1):
        pops[k] = _binomial_population(n, k, depth)
    return single_mode_density_matrix(n_max, np.diag(pops).astype(complex))


def evolve_single_mode(rho: SingleModeDensityMatrix, profile: MediumProfile,
                       x: float) -> SingleModeDensityMatrix:
    """Propagate any single-mode density matrix through ``profile`` to ``x``."""
    w = loss_weights(rho.n_max, profile.optical_depth(x), profile.accumulated_phase(x))
    size = rho.n_max + 1
    src = rho.elements
    out = np.zeros_like(src)
    for k in range(size):
        m = size - k
        out[:m, :m] += w[k, :m, :m] * src[k:, k:]
    out = 0.5 * (out + out.conj().T)
    return single_mode_density_matrix(rho.n_max, out)


__all__ = [
    "evolve_single_mode",
    "evolve_two_mode",
    "general_output",
    "general_output_form_a",
    "loss_probability",
    "loss_weights",
    "noon_output",
    "output_summand",
    "single_mode_output",
    "survival_probability",
    "PropagationPoint",
]
