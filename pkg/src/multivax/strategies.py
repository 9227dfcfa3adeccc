"""Vaccination policies: pure maps ``(t, state, r0) -> dose rates[class, vaccine]``.

Rates are requests.  Availability of susceptibles is enforced later by the
integrator's corrector, so a policy never has to look ahead.
"""
from __future__ import annotations

from dataclasses import dataclass
from typing import Union

import numpy as np

from .state import SystemState

CAMPAIGN_START = 30.0


@dataclass(frozen=True)
class Zero:
    kind = "zero"

    def rate_cap(self) -> float:
        return 0.0


@dataclass(frozen=True)
class Threshold:
    """Dose ``rate`` per day from ``t_on`` while ``S > S_star``."""

    S_star: float
    t_on: float = CAMPAIGN_START
    rate: float = 1.0
    kind = "threshold"

    def rate_cap(self) -> float:
        return self.rate


@dataclass(frozen=True)
class R0Feedback:
    """Dose ``p_star`` per day from ``t_on`` while ``S > 0`` and ``r0 > r_star``."""

    p_star: float
    r_star: float
    t_on: float = CAMPAIGN_START
    kind = "r0_feedback"

    def rate_cap(self) -> float:
        return self.p_star


@dataclass(frozen=True)
class VaccineSchedule:
    """Windows ``(vaccine, t_from, t_to)``: vaccine index 0-based, window half-open."""

    windows: tuple[tuple[int, float, float], ...]
    rate: float = 1.0
    kind = "vaccine_schedule"

    def __post_init__(self):
        object.__setattr__(
            self, "windows", tuple((int(i), float(a), float(b)) for i, a, b in self.windows)
        )

    def rate_cap(self) -> float:
        return self.rate


@dataclass(frozen=True)
class SplitSchedule:
    """Total ``rate`` shared equally by all vaccines from ``t_on``."""

    rate: float = 1.0
    t_on: float = CAMPAIGN_START
    kind = "split_schedule"

    def rate_cap(self) -> float:
        return self.rate


@dataclass(frozen=True)
class AgeFeedback:
    """Class ``a`` gets ``rate * I_a / sum(I)``."""

    rate: float = 1.0
    t_on: float = CAMPAIGN_START
    kind = "age_feedback"

    def rate_cap(self) -> float:
        return self.rate


@dataclass(frozen=True)
class AgeHalfHalf:
    rate: float = 1.0
    t_on: float = CAMPAIGN_START
    kind = "age_half_half"

    def rate_cap(self) -> float:
        return self.rate


@dataclass(frozen=True)
class AgeClassFirst:
    """``first_class`` (0-based) alone until ``t_switch``, then the other class(es)."""

    first_class: int
    t_switch: float = 380.0
    rate: float = 1.0
    t_on: float = CAMPAIGN_START
    kind = "age_class_first"

    def rate_cap(self) -> float:
        return self.rate


StrategySpec = Union[
    Zero, Threshold, R0Feedback, VaccineSchedule, SplitSchedule, AgeFeedback, AgeHalfHalf, AgeClassFirst
]

STRATEGY_KINDS = {
    cls.kind: cls
    for cls in (
        Zero,
        Threshold,
        R0Feedback,
        VaccineSchedule,
        SplitSchedule,
        AgeFeedback,
        AgeHalfHalf,
        AgeClassFirst,
    )
}


def dose_request(s: StrategySpec, t: float, state: SystemState, r0: float | None) -> np.ndarray:
    m, k = state.m, state.k
    out = np.zeros((m, k))
    S = np.array([c.S for c in state.classes])

    if isinstance(s, Zero) or k == 0:
        return out
    if isinstance(s, Threshold):
        if t >= s.t_on and S[0] > s.S_star:
            out[0, 0] = s.rate
    elif isinstance(s, R0Feedback):
        if r0 is None:
            raise ValueError("r0_feedback needs the reproduction number")
        if t >= s.t_on and S[0] > 0 and r0 > s.r_star:
            out[0, 0] = s.p_star
    elif isinstance(s, VaccineSchedule):
        if S[0] > 0:
            for i, t0, t1 in s.windows:
                if t0 <= t < t1:
                    out[0, i] += s.rate
    elif isinstance(s, SplitSchedule):
        if t >= s.t_on and S[0] > 0:
            out[0, :] = s.rate / k
    elif isinstance(s, AgeFeedback):
        I = np.array([c.I for c in state.classes])
        total = I.sum()
        if t >= s.t_on and total > 0:
            out[:, 0] = np.where(S > 0, s.rate * I / total, 0.0)
    elif isinstance(s, AgeHalfHalf):
        if t >= s.t_on:
            out[:, 0] = np.where(S > 0, s.rate / m, 0.0)
    elif isinstance(s, AgeClassFirst):
        if t >= s.t_on:
            active = [s.first_class] if t < s.t_switch else [a for a in range(m) if a != s.first_class]
            for a in active:
                if S[a] > 0:
                    out[a, 0] = s.rate / len(active)
    else:
        raise TypeError(f"not a strategy: {s!r}")
    return out
