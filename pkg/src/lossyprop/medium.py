"""Propagation media: extinction and phase-rotation profiles along a channel.

Distances are in km and rates in 1/km throughout. Every profile reduces to
two integrals, the optical depth ``int_0^x mu`` and the accumulated phase
``int_0^x eta``; the loss formulas only ever see those two numbers.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Callable, Sequence

import numpy as np
from scipy.integrate import cumulative_trapezoid

from .exceptions import ConfigError, OutOfDomain

DEFAULT_PANELS_PER_KM = 4000


def _check_distance(x: float, limit: float = math.inf) -> float:
    x = float(x)
    if not math.isfinite(x) or x < 0:
        raise OutOfDomain(f"distance must be finite and >= 0, got {x!r}")
    if x > limit:
        raise OutOfDomain(f"distance {x} km beyond profile range {limit} km")
    return x


@dataclass(frozen=True)
class ConstantProfile:
    mu: float
    eta: float = 0.0

    def __post_init__(self):
        if not (math.isfinite(self.mu) and math.isfinite(self.eta)):
            raise ConfigError("mu and eta must be finite")
        if self.mu < 0:
            raise ConfigError(f"extinction coefficient must be >= 0, got {self.mu}")

    @property
    def x_max(self) -> float:
        return math.inf

    def optical_depth(self, x: float) -> float:
        return self.mu * _check_distance(x)

    def accumulated_phase(self, x: float) -> float:
        return self.eta * _check_distance(x)

    def to_dict(self) -> dict:
        return {"kind": "constant", "mu": self.mu, "eta": self.eta}


@dataclass(frozen=True)
class PiecewiseConstantProfile:
    """Constant ``mu``/``eta`` on consecutive segments ``[prev_end, end)``.

    ``ends`` are the right edges of the segments, strictly increasing; the
    first segment starts at 0. The last end may be ``inf``.
    """

    ends: tuple[float, ...]
    mu: tuple[float, ...]
    eta: tuple[float, ...]

    def __post_init__(self):
        if not (len(self.ends) == len(self.mu) == len(self.eta) >= 1):
            raise ConfigError("piecewise profile needs equal, non-empty ends/mu/eta")
        prev = 0.0
        for end in self.ends:
            if not end > prev:
                raise ConfigError(f"segment ends must be strictly increasing, got {self.ends}")
            prev = end
        if any(m < 0 or not math.isfinite(m) for m in self.mu):
            raise ConfigError("extinction coefficients must be finite and >= 0")
        if any(not math.isfinite(e) for e in self.eta):
            raise ConfigError("phase-rotation coefficients must be finite")

    @classmethod
    def from_segments(cls, segments: Sequence[dict]) -> "PiecewiseConstantProfile":
        """Build from ``[{"until_km": ..., "mu": ..., "eta": ...}, ...]``.

        ``until_km`` may be ``None`` on the last segment to mean unbounded.
        """
        try:
            ends = tuple(
                math.inf if s["until_km"] is None else float(s["until_km"]) for s in segments
            )
            mu = tuple(float(s["mu"]) for s in segments)
            eta = tuple(float(s.get("eta", 0.0)) for s in segments)
        except (KeyError, TypeError, ValueError) as exc:
            raise ConfigError(f"malformed profile segment: {exc}") from exc
        return cls(ends, mu, eta)

    @property
    def x_max(self) -> float:
        return self.ends[-1]

    def _integrate(self, rates: tuple[float, ...], x: float) -> float:
        x = _check_distance(x, self.x_max)
        total, start = 0.0, 0.0
        for end, rate in zip(self.ends, rates):
            if x <= start:
                break
            total += rate * (min(x, end) - start)
            start = end
        return total

    def optical_depth(self, x: float) -> float:
        return self._integrate(self.mu, x)

    def accumulated_phase(self, x: float) -> float:
        return self._integrate(self.eta, x)

    def to_dict(self) -> dict:
        return {
            "kind": "piecewise",
            "segments": [
                {"until_km": None if math.isinf(e) else e, "mu": m, "eta": h}
                for e, m, h in zip(self.ends, self.mu, self.eta)
            ],
        }


@dataclass(frozen=True, eq=False)
class TabulatedProfile:
    """Sampled ``mu(zeta)``, ``eta(zeta)`` with linear interpolation.

    Integrals are the exact integrals of the piecewise-linear interpolant,
    i.e. the trapezoid rule on the samples.
    """

    zeta: np.ndarray = field(repr=False)
    mu: np.ndarray = field(repr=False)
    eta: np.ndarray = field(repr=False)
    _depth: np.ndarray = field(init=False, repr=False, compare=False)
    _phase: np.ndarray = field(init=False, repr=False, compare=False)

    def __post_init__(self):
        zeta = np.array(self.zeta, dtype=float)
        mu = np.array(self.mu, dtype=float)
        eta = np.array(self.eta, dtype=float)
        if zeta.ndim != 1 or zeta.size < 2 or mu.shape != zeta.shape or eta.shape != zeta.shape:
            raise ConfigError("tabulated profile needs >= 2 samples of matching shape")
        if zeta[0] != 0.0 or np.any(np.diff(zeta) <= 0):
            raise ConfigError("sample positions must start at 0 and increase strictly")
        if not (np.all(np.isfinite(mu)) and np.all(np.isfinite(eta))):
            raise ConfigError("profile samples must be finite")
        if np.any(mu < 0):
            raise ConfigError("extinction samples must be >= 0")
        for name, arr in (("zeta", zeta), ("mu", mu), ("eta", eta)):
            arr.flags.writeable = False
            object.__setattr__(self, name, arr)
        object.__setattr__(self, "_depth", cumulative_trapezoid(mu, zeta, initial=0.0))
        object.__setattr__(self, "_phase", cumulative_trapezoid(eta, zeta, initial=0.0))

    @classmethod
    def from_functions(
        cls,
        mu: Callable[[np.ndarray], np.ndarray],
        eta: Callable[[np.ndarray], np.ndarray] | None,
        x_max: float,
        panels_per_km: int = DEFAULT_PANELS_PER_KM,
    ) -> "TabulatedProfile":
        """Tabulate vectorized callables on a uniform grid over ``[0, x_max]``."""
        if x_max <= 0 or panels_per_km < 1:
            raise ConfigError("x_max and panels_per_km must be positive")
        panels = max(1, math.ceil(x_max * panels_per_km))
        zeta = np.linspace(0.0, x_max, panels + 1)
        mu_s = np.broadcast_to(np.asarray(mu(zeta), dtype=float), zeta.shape)
        eta_s = np.zeros_like(zeta) if eta is None else np.asarray(eta(zeta), dtype=float)
        return cls(zeta, np.array(mu_s), np.broadcast_to(eta_s, zeta.shape).copy())

    @property
    def x_max(self) -> float:
        return float(self.zeta[-1])

    def _integrate(self, rates: np.ndarray, cumulative: np.ndarray, x: float) -> float:
        x = _check_distance(x, self.x_max)
        i = int(np.searchsorted(self.zeta, x, side="right")) - 1
        i = min(i, self.zeta.size - 2)
        z0, z1 = self.zeta[i], self.zeta[i + 1]
        r0, r1 = rates[i], rates[i + 1]
        h = x - z0
        # exact integral of the linear interpolant over [z0, x]
        partial = h * r0 + 0.5 * h * h * (r1 - r0) / (z1 - z0)
        return float(cumulative[i] + partial)

    def optical_depth(self, x: float) -> float:
        return self._integrate(self.mu, self._depth, x)

    def accumulated_phase(self, x: float) -> float:
        return self._integrate(self.eta, self._phase, x)

    def to_dict(self) -> dict:
        return {
            "kind": "tabulated",
            "zeta": self.zeta.tolist(),
            "mu": self.mu.tolist(),
            "eta": self.eta.tolist(),
        }


MediumProfile = ConstantProfile | PiecewiseConstantProfile | TabulatedProfile


def profile_from_dict(data: dict) -> MediumProfile:
    """Inverse of the profiles' ``to_dict``."""
    kind = data.get("kind")
    if kind == "constant":
        return ConstantProfile(float(data["mu"]), float(data.get("eta", 0.0)))
    if kind == "piecewise":
        return PiecewiseConstantProfile.from_segments(data["segments"])
    if kind == "tabulated":
        return TabulatedProfile(data["zeta"], data["mu"], data["eta"])
    raise ConfigError(f"unknown profile kind {kind!r}")


def optical_depth(profile: MediumProfile, x: float) -> float:
    """``int_0^x mu(zeta) dzeta`` (dimensionless)."""
    return profile.optical_depth(x)


def accumulated_phase(profile: MediumProfile, x: float) -> float:
    """``int_0^x eta(zeta) dzeta`` in radians."""
    return profile.accumulated_phase(x)


@dataclass(frozen=True)
class ChannelPair:
    """Independent media for modes a and b."""

    channel_a: MediumProfile
    channel_b: MediumProfile

    @classmethod
    def constant(cls, mu_a: float, eta_a: float = 0.0, mu_b: float | None = None,
                 eta_b: float | None = None) -> "ChannelPair":
        mu_b = mu_a if mu_b is None else mu_b
        eta_b = eta_a if eta_b is None else eta_b
        return cls(ConstantProfile(mu_a, eta_a), ConstantProfile(mu_b, eta_b))

    @classmethod
    def symmetric(cls, profile: MediumProfile) -> "ChannelPair":
        return cls(profile, profile)

    def depths(self, point: "PropagationPoint") -> tuple[float, float, float, float]:
        """``(depth_a, depth_b, phase_a, phase_b)`` at ``point``."""
        a, b = self.channel_a, self.channel_b
        return (
            a.optical_depth(point.x_a),
            b.optical_depth(point.x_b),
            a.accumulated_phase(point.x_a),
            b.accumulated_phase(point.x_b),
        )

    def to_dict(self) -> dict:
        return {"a": self.channel_a.to_dict(), "b": self.channel_b.to_dict()}


@dataclass(frozen=True)
class PropagationPoint:
    x_a: float
    x_b: float

    def __post_init__(self):
        _check_distance(self.x_a)
        _check_distance(self.x_b)

    @classmethod
    def at(cls, x: float) -> "PropagationPoint":
        return cls(x, x)


def as_point(point) -> PropagationPoint:
    if isinstance(point, PropagationPoint):
        return point
    if isinstance(point, tuple):
        return PropagationPoint(*point)
    return PropagationPoint.at(point)
