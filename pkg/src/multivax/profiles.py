"""Infectivity profiles over the time elapsed since vaccination or recovery.

A profile maps ``tau`` (days since the event) to a residual infectivity
coefficient.  Every profile has a ``baseline`` (the susceptible rate it
returns to), a ``floor`` (the best protection it reaches) and a ``horizon``
after which individuals leave the delay line.  Unbounded profiles
(``horizon == inf``) freeze their value once the protective ramp is done.
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from enum import Enum

import numpy as np


class ShapeFn(str, Enum):
    PHI = "phi"
    PSI = "psi"


def _phi(s):
    return (4.0 - 3.0 * s) * s**3


def _psi(s):
    return (1.0 - 6.75 * s * (1.0 - s) ** 2) ** 4


_SHAPES = {ShapeFn.PHI: _phi, ShapeFn.PSI: _psi}

# where each shape reaches the floor: phi starts there, psi bottoms out at 1/3
_SHAPE_MIN = {ShapeFn.PHI: 0.0, ShapeFn.PSI: 1.0 / 3.0}


def eval_shape(fn: ShapeFn | str, s):
    """Evaluate a unit shape on ``s`` in [0, 1]; raises ValueError outside."""
    fn = ShapeFn(fn)
    arr = np.asarray(s, dtype=float)
    if np.any(arr < 0.0) or np.any(arr > 1.0) or np.any(np.isnan(arr)):
        raise ValueError(f"shape argument outside [0, 1]: {s!r}")
    out = _SHAPES[fn](arr)
    return float(out) if out.ndim == 0 else out


class EfficacyProfile:
    """Base class; subclasses implement ``_values`` on a validated array."""

    baseline: float
    floor: float
    horizon: float

    @property
    def unbounded(self) -> bool:
        return math.isinf(self.horizon)

    @property
    def ramp_end(self) -> float:
        """Age after which an unbounded version of this profile is frozen."""
        raise NotImplementedError

    def _values(self, tau: np.ndarray) -> np.ndarray:
        raise NotImplementedError

    def __call__(self, tau):
        arr = np.asarray(tau, dtype=float)
        if np.any(arr < 0.0) or np.any(np.isnan(arr)):
            raise ValueError(f"negative or NaN time since event: {tau!r}")
        if not self.unbounded and np.any(arr > self.horizon * (1 + 1e-12)):
            raise ValueError(f"tau beyond horizon {self.horizon}: {tau!r}")
        out = self._values(np.minimum(arr, self.horizon))
        return float(out) if out.ndim == 0 else out


@dataclass(frozen=True)
class ShapedProfile(EfficacyProfile):
    """``floor + (baseline - floor) * shape(tau / horizon)``."""

    baseline: float
    floor: float
    horizon: float
    shape: ShapeFn = ShapeFn.PSI

    def __post_init__(self):
        object.__setattr__(self, "shape", ShapeFn(self.shape))
        if not (0.0 <= self.floor <= self.baseline):
            raise ValueError("need 0 <= floor <= baseline")
        if not self.horizon > 0 or math.isinf(self.horizon):
            raise ValueError("shaped profiles need a finite positive horizon")

    @property
    def ramp_end(self) -> float:
        return _SHAPE_MIN[self.shape] * self.horizon

    def _values(self, tau):
        s = np.clip(tau / self.horizon, 0.0, 1.0)
        return self.floor + (self.baseline - self.floor) * _SHAPES[self.shape](s)


@dataclass(frozen=True)
class PlateauProfile(EfficacyProfile):
    """Constant ``level`` on [lo, hi], linear ramps to ``baseline`` at 0 and horizon."""

    baseline: float
    level: float
    lo: float
    hi: float
    horizon: float

    def __post_init__(self):
        if not (0.0 <= self.level <= self.baseline):
            raise ValueError("need 0 <= level <= baseline")
        if not (0.0 <= self.lo <= self.hi <= self.horizon) or math.isinf(self.horizon):
            raise ValueError("need 0 <= lo <= hi <= horizon < inf")

    @property
    def floor(self) -> float:
        return self.level

    @property
    def ramp_end(self) -> float:
        return self.hi

    def _values(self, tau):
        return np.interp(
            tau,
            [0.0, self.lo, self.hi, self.horizon],
            [self.baseline, self.level, self.level, self.baseline],
        )


@dataclass(frozen=True)
class TwoDoseProfile(EfficacyProfile):
    """Piecewise-linear profile through user knots ``(tau, rho)``.

    The knots must start at ``(0, baseline)``, end at ``(horizon, baseline)``,
    dip below baseline before ``second_dose`` and dip again after it.
    """

    baseline: float
    knots: tuple[tuple[float, float], ...]
    second_dose: float

    def __post_init__(self):
        knots = tuple((float(a), float(b)) for a, b in self.knots)
        object.__setattr__(self, "knots", knots)
        taus = [k[0] for k in knots]
        vals = [k[1] for k in knots]
        if len(knots) < 4 or taus[0] != 0.0 or any(b <= a for a, b in zip(taus, taus[1:])):
            raise ValueError("knots need increasing tau starting at 0, at least 4 of them")
        if vals[0] != self.baseline or vals[-1] != self.baseline:
            raise ValueError("two-dose profile must start and end at baseline")
        if any(v < 0.0 or v > self.baseline for v in vals):
            raise ValueError("knot values must lie in [0, baseline]")
        if not (0.0 < self.second_dose < taus[-1]):
            raise ValueError("second dose must fall inside the horizon")
        before = [v for t, v in knots if 0.0 < t < self.second_dose]
        after = [v for t, v in knots if self.second_dose < t < taus[-1]]
        if not before or min(before) >= self.baseline or not after or min(after) >= self.baseline:
            raise ValueError("expected a dip before and after the second dose")

    @property
    def horizon(self) -> float:
        return self.knots[-1][0]

    @property
    def floor(self) -> float:
        return min(v for _, v in self.knots)

    @property
    def ramp_end(self) -> float:
        return max(t for t, v in self.knots if v == self.floor)

    def _values(self, tau):
        return np.interp(tau, [k[0] for k in self.knots], [k[1] for k in self.knots])


@dataclass(frozen=True)
class ConstantProfile(EfficacyProfile):
    """Same rate at every age; ``rate=0`` gives a permanently immune line."""

    rate: float
    horizon: float = math.inf

    @property
    def baseline(self) -> float:
        return self.rate

    @property
    def floor(self) -> float:
        return self.rate

    @property
    def ramp_end(self) -> float:
        return 0.0

    def _values(self, tau):
        return np.full_like(tau, self.rate, dtype=float)


@dataclass(frozen=True)
class FrozenTailProfile(EfficacyProfile):
    """Unbounded version of ``inner``: follows it up to ``inner.ramp_end``
    and holds that value forever after, so protection never wears off."""

    inner: EfficacyProfile

    @property
    def baseline(self) -> float:
        return self.inner.baseline

    @property
    def floor(self) -> float:
        return self.inner.floor

    @property
    def horizon(self) -> float:
        return math.inf

    @property
    def ramp_end(self) -> float:
        return self.inner.ramp_end

    @property
    def frozen_value(self) -> float:
        return float(self.inner._values(np.asarray(self.ramp_end)))

    def _values(self, tau):
        return self.inner._values(np.minimum(tau, self.ramp_end))


def unbounded(profile: EfficacyProfile) -> EfficacyProfile:
    if profile.unbounded:
        return profile
    return FrozenTailProfile(profile)


def eval_profile(p: EfficacyProfile, tau: float) -> float:
    return p(tau)
