"""Fock-basis bookkeeping for one and two bosonic modes.

Two-mode operators are stored densely over the product basis ``|p>_a |q>_b``
with mode ``a`` as the major index, ``flatten(p, q) = p * (N + 1) + q``.
With that layout ``elements.reshape(N+1, N+1, N+1, N+1)`` is indexed
``[p, q, p', q']``, which is how most of the library reads it.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from functools import lru_cache

import numpy as np
from scipy.special import gammaln

from .exceptions import AllZeroAmplitudes, CutoffExceeded, DimensionMismatch

#: Largest supported photon number per mode. Beyond this the log-factorial
#: weights lose too many digits in double precision.
MAX_CUTOFF = 30

STATE_NORM_TOL = 1e-12
EVOLVED_TRACE_TOL = 1e-10


def check_cutoff(n_max) -> int:
    """Validate a per-mode photon cutoff and return it as an ``int``."""
    if isinstance(n_max, bool) or int(n_max) != n_max:
        raise CutoffExceeded(f"photon cutoff must be an integer, got {n_max!r}")
    n_max = int(n_max)
    if not 0 <= n_max <= MAX_CUTOFF:
        raise CutoffExceeded(f"photon cutoff {n_max} outside [0, {MAX_CUTOFF}]")
    return n_max


def flatten(p: int, q: int, n_max: int) -> int:
    return p * (n_max + 1) + q


def unflatten(index: int, n_max: int) -> tuple[int, int]:
    return divmod(index, n_max + 1)


def _frozen(array: np.ndarray) -> np.ndarray:
    array = np.array(array, copy=True)
    array.flags.writeable = False
    return array


# ---------------------------------------------------------------------------
# Combinatorics
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class CombinatoricsTable:
    """Log-factorials and exact binomials up to ``2 * n_max``.

    Attributes:
        n_max: photon cutoff the table was built for.
        log_factorials: ``ln(n!)`` for ``0 <= n <= 2 * n_max``.
        exact_binomials: integer ``C(n, k)`` as a nested tuple, zero for ``k > n``.
    """

    n_max: int
    log_factorials: np.ndarray = field(repr=False)
    exact_binomials: tuple = field(repr=False)

    @classmethod
    def for_cutoff(cls, n_max: int) -> "CombinatoricsTable":
        return _combinatorics(check_cutoff(n_max))

    @property
    def size(self) -> int:
        return 2 * self.n_max + 1

    def log_factorial(self, n: int) -> float:
        """``ln(n!)``; ``+inf`` for negative ``n`` so that ``exp(-...)`` vanishes."""
        if n < 0:
            return math.inf
        return float(self.log_factorials[n])

    def binomial(self, n: int, k: int) -> int:
        if k < 0 or n < 0 or k > n:
            return 0
        return self.exact_binomials[n][k]


@lru_cache(maxsize=None)
def _combinatorics(n_max: int) -> CombinatoricsTable:
    top = 2 * n_max
    logs = gammaln(np.arange(top + 1, dtype=float) + 1.0)
    binomials = tuple(
        tuple(math.comb(n, k) for k in range(top + 1)) for n in range(top + 1)
    )
    return CombinatoricsTable(n_max, _frozen(logs), binomials)


# ---------------------------------------------------------------------------
# Pure states
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class SingleModeState:
    n_max: int
    amplitudes: np.ndarray = field(repr=False)

    def __post_init__(self):
        norm = np.linalg.norm(self.amplitudes)
        if abs(norm - 1.0) > STATE_NORM_TOL:
            raise ValueError(f"single-mode state has norm {norm!r}, expected 1")


@dataclass(frozen=True)
class TwoModeState:
    """Pure two-mode input state with coefficient grid ``alpha[l, m]``.

    ``alpha[l, m]`` multiplies ``|l>_a |m>_b``. Build instances with
    :func:`make_two_mode_state` or :func:`noon_state` rather than directly.
    """

    n_max: int
    alpha: np.ndarray = field(repr=False)
    rescaled: bool = False

    def __post_init__(self):
        norm2 = float(np.sum(np.abs(self.alpha) ** 2))
        if abs(norm2 - 1.0) > STATE_NORM_TOL:
            raise ValueError(f"two-mode state has squared norm {norm2!r}, expected 1")

    @property
    def dim(self) -> int:
        return (self.n_max + 1) ** 2

    def vector(self) -> np.ndarray:
        """State vector in the flattened product basis."""
        return self.alpha.reshape(-1)


def make_two_mode_state(n_max: int, alpha) -> TwoModeState:
    """Normalize a coefficient grid into a :class:`TwoModeState`.

    Args:
        n_max: photon cutoff per mode.
        alpha: complex array of shape ``(n_max + 1, n_max + 1)``.

    Returns:
        The normalized state. ``rescaled`` is ``True`` when the input norm
        differed from one by more than the construction tolerance.

    Raises:
        DimensionMismatch: grid shape disagrees with the cutoff.
        AllZeroAmplitudes: every coefficient is zero.
    """
    n_max = check_cutoff(n_max)
    alpha = np.asarray(alpha, dtype=complex)
    if alpha.shape != (n_max + 1, n_max + 1):
        raise DimensionMismatch(
            f"coefficient grid has shape {alpha.shape}, cutoff {n_max} needs "
            f"{(n_max + 1, n_max + 1)}"
        )
    norm = math.sqrt(float(np.sum(np.abs(alpha) ** 2)))
    if norm == 0.0:
        raise AllZeroAmplitudes("coefficient grid is identically zero")
    rescaled = abs(norm * norm - 1.0) > STATE_NORM_TOL
    return TwoModeState(n_max, _frozen(alpha / norm), rescaled)


def noon_state(n: int, n_max: int | None = None) -> TwoModeState:
    """``(|n,0> + |0,n>)/sqrt(2)``, optionally embedded in a larger cutoff."""
    if n_max is None:
        n_max = n
    n_max = check_cutoff(n_max)
    if isinstance(n, bool) or int(n) != n or not 1 <= n <= n_max:
        raise CutoffExceeded(f"N00N photon number {n!r} must lie in [1, {n_max}]")
    alpha = np.zeros((n_max + 1, n_max + 1), dtype=complex)
    alpha[n, 0] = alpha[0, n] = 1 / math.sqrt(2)
    return TwoModeState(n_max, _frozen(alpha))


def fock_product_state(p: int, q: int, n_max: int) -> TwoModeState:
    """The basis state ``|p>_a |q>_b``."""
    n_max = check_cutoff(n_max)
    if not (0 <= p <= n_max and 0 <= q <= n_max):
        raise CutoffExceeded(f"|{p},{q}> does not fit under cutoff {n_max}")
    alpha = np.zeros((n_max + 1, n_max + 1), dtype=complex)
    alpha[p, q] = 1.0
    return TwoModeState(n_max, _frozen(alpha))


def product_state(amplitudes_a, amplitudes_b) -> TwoModeState:
    """Separable state ``|a> (x) |b>`` from two single-mode amplitude vectors."""
    a = np.asarray(amplitudes_a, dtype=complex)
    b = np.asarray(amplitudes_b, dtype=complex)
    if a.shape != b.shape or a.ndim != 1:
        raise DimensionMismatch("product_state needs two vectors of equal length")
    return make_two_mode_state(a.size - 1, np.outer(a, b))


# ---------------------------------------------------------------------------
# Density matrices
# ---------------------------------------------------------------------------


class _DensityMatrixMixin:
    elements: np.ndarray

    def trace(self) -> complex:
        return complex(np.trace(self.elements))

    @property
    def trace_error(self) -> float:
        return abs(self.trace() - 1.0)

    @property
    def hermiticity_defect(self) -> float:
        return float(np.max(np.abs(self.elements - self.elements.conj().T)))

    def eigenvalues(self) -> np.ndarray:
        from .metrics import hermitian_eigenvalues

        return hermitian_eigenvalues(self.elements)

    @property
    def min_eigenvalue(self) -> float:
        return float(self.eigenvalues()[0])

    @property
    def purity(self) -> float:
        # tr(rho^2) = sum |rho_ij|^2 for Hermitian rho
        return float(np.sum(np.abs(self.elements) ** 2))

    def populations(self) -> np.ndarray:
        return self.elements.diagonal().real.copy()


@dataclass(frozen=True)
class SingleModeDensityMatrix(_DensityMatrixMixin):
    n_max: int
    elements: np.ndarray = field(repr=False)

    def mean_photon_number(self) -> float:
        return float(np.dot(np.arange(self.n_max + 1), self.populations()))


@dataclass(frozen=True)
class TwoModeDensityMatrix(_DensityMatrixMixin):
    """Dense two-mode density matrix over the flattened product basis.

    Attributes:
        n_max: photon cutoff per mode.
        elements: ``(N+1)^2 x (N+1)^2`` complex matrix.
        asymmetry: largest ``|rho - rho^dagger|`` seen before the output was
            symmetrized. Zero for matrices built exactly Hermitian.
    """

    n_max: int
    elements: np.ndarray = field(repr=False)
    asymmetry: float = 0.0

    @property
    def dim(self) -> int:
        return (self.n_max + 1) ** 2

    def tensor(self) -> np.ndarray:
        """Read-only view indexed ``[p, q, p', q']``."""
        k = self.n_max + 1
        return self.elements.reshape(k, k, k, k)

    def element(self, p: int, q: int, pp: int, qq: int) -> complex:
        return complex(self.tensor()[p, q, pp, qq])

    def marginal_populations(self) -> tuple[np.ndarray, np.ndarray]:
        """Photon-number distributions of mode a and mode b."""
        k = self.n_max + 1
        diag = self.elements.diagonal().real.reshape(k, k)
        return diag.sum(axis=1), diag.sum(axis=0)

    def mean_photon_numbers(self) -> tuple[float, float]:
        pa, pb = self.marginal_populations()
        n = np.arange(self.n_max + 1)
        return float(n @ pa), float(n @ pb)


def two_mode_density_matrix(n_max: int, elements, asymmetry: float = 0.0):
    n_max = check_cutoff(n_max)
    elements = np.asarray(elements, dtype=complex)
    dim = (n_max + 1) ** 2
    if elements.shape == (n_max + 1,) * 4:
        elements = elements.reshape(dim, dim)
    if elements.shape != (dim, dim):
        raise DimensionMismatch(f"expected a {dim}x{dim} matrix, got {elements.shape}")
    return TwoModeDensityMatrix(n_max, _frozen(elements), float(asymmetry))


def single_mode_density_matrix(n_max: int, elements) -> SingleModeDensityMatrix:
    n_max = check_cutoff(n_max)
    elements = np.asarray(elements, dtype=complex)
    if elements.shape != (n_max + 1, n_max + 1):
        raise DimensionMismatch(
            f"expected a {n_max + 1}x{n_max + 1} matrix, got {elements.shape}"
        )
    return SingleModeDensityMatrix(n_max, _frozen(elements))


def pure_density_matrix(state: TwoModeState) -> TwoModeDensityMatrix:
    """Projector ``|psi><psi|`` of a two-mode pure state."""
    v = state.vector()
    return two_mode_density_matrix(state.n_max, np.outer(v, v.conj()))


def single_mode_pure_density_matrix(amplitudes) -> SingleModeDensityMatrix:
    amps = np.asarray(amplitudes, dtype=complex)
    state = SingleModeState(amps.size - 1, amps)
    return single_mode_density_matrix(state.n_max, np.outer(amps, amps.conj()))


def single_mode_fock_density_matrix(n: int, n_max: int | None = None):
    """``|n><n|`` for one mode."""
    if n_max is None:
        n_max = n
    n_max = check_cutoff(n_max)
    if not 0 <= n <= n_max:
        raise CutoffExceeded(f"photon number {n} exceeds cutoff {n_max}")
    rho = np.zeros((n_max + 1, n_max + 1), dtype=complex)
    rho[n, n] = 1.0
    return single_mode_density_matrix(n_max, rho)
