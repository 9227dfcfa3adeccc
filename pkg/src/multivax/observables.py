"""Reproduction number, casualties, doses and a few time-series statistics."""
from __future__ import annotations

import numpy as np

from .models import ModelSpec, pressure_matrix
from .state import SystemState


class UnsupportedModel(ValueError):
    pass


def r0(spec: ModelSpec, state: SystemState) -> float:
    """Instantaneous reproduction number; defined for single-class models only."""
    if spec.m != 1:
        raise UnsupportedModel("the reproduction number is only defined for one age class")
    N = pressure_matrix(spec, state)
    return float(N[0, 0] / (spec.theta[0] + spec.mu[0]))


def _window(series, t0: float, T: float) -> tuple[int, int]:
    t = series.t
    if not t0 < T:
        raise ValueError("need t0 < T")
    i0 = int(np.searchsorted(t, t0 - 1e-9))
    i1 = int(np.searchsorted(t, T - 1e-9))
    if i0 >= len(t) or i1 >= len(t) or abs(t[i0] - t0) > 1e-9 or abs(t[i1] - T) > 1e-9:
        raise ValueError(f"[{t0}, {T}] not on the recorded grid [{t[0]}, {t[-1]}]")
    return i0, i1


def deaths(series, t0: float, T: float) -> tuple[float, float]:
    """Casualties over ``[t0, T]`` as ``(accumulated mu*I*dt, discrepancy)``.

    The discrepancy is the population-difference form minus the accumulated
    form and measures how well the scheme keeps the bookkeeping exact.
    """
    i0, i1 = _window(series, t0, T)
    accumulated = float(series.cum_deaths[i1].sum() - series.cum_deaths[i0].sum())
    by_population = float(series.living[i0].sum() - series.living[i1].sum())
    return accumulated, by_population - accumulated


def deaths_by_class(series, t0: float, T: float) -> np.ndarray:
    i0, i1 = _window(series, t0, T)
    return series.cum_deaths[i1] - series.cum_deaths[i0]


def doses(series, t0: float, T: float) -> tuple[np.ndarray, float]:
    """Delivered doses over ``[t0, T]``: per vaccine (summed over classes) and total."""
    i0, i1 = _window(series, t0, T)
    per_vaccine = (series.cum_doses[i1] - series.cum_doses[i0]).sum(axis=0)
    return per_vaccine, float(per_vaccine.sum())


def local_maxima(t: np.ndarray, y: np.ndarray, after: float = 0.0, rel_prominence: float = 1e-3) -> np.ndarray:
    """Times of strict interior local maxima of ``y`` after ``after``.

    Bumps smaller than ``rel_prominence * max(y)`` on either side are ignored
    so that round-off ripples on a flat curve do not count as waves.
    """
    y = np.asarray(y, dtype=float)
    tol = rel_prominence * float(np.max(np.abs(y))) if y.size else 0.0
    peaks = []
    for j in range(1, len(y) - 1):
        if t[j] <= after or not (y[j] > y[j - 1] and y[j] >= y[j + 1]):
            continue
        left = y[: j + 1][::-1]
        right = y[j:]
        # drop to a lower point on both sides before exceeding the peak again
        ldrop = _drop(left, y[j])
        rdrop = _drop(right, y[j])
        if ldrop > tol and rdrop > tol:
            peaks.append(t[j])
    return np.array(peaks)


def _drop(seq: np.ndarray, peak: float) -> float:
    higher = np.nonzero(seq > peak)[0]
    end = higher[0] if higher.size else len(seq)
    return float(peak - seq[:end].min())


def burst_starts(t: np.ndarray, cum: np.ndarray, on_rate: float = 0.5) -> np.ndarray:
    """Times where the daily dose rate first rises above ``on_rate`` after a pause."""
    rate = np.diff(cum) / np.diff(t)
    on = rate > on_rate
    starts = np.nonzero(on[1:] & ~on[:-1])[0] + 1
    if on.size and on[0]:
        starts = np.concatenate([[0], starts])
    return t[starts]
