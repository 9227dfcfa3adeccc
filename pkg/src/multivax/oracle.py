"""Closed-form solutions used to check the integrator.

* :func:`lemma_uuu` solves ``u_t + u_tau = u phi(t)`` with ``u(t, 0) = alpha phi(t)``.
* :func:`stabilized_I`, :func:`stabilized_R`, :func:`deaths_closed_form` give the
  solution once the reproduction number is held at ``r_star``.
* :class:`PinnedR0` is a dosing controller that holds the reproduction
  number at a target so the two can be compared.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Callable

import numpy as np
from scipy import integrate

from .integrator import _decay, _shift
from .models import ModelSpec
from .state import DelayLine, Mesh
from .strategies import R0Feedback, StrategySpec, dose_request


def _quad(f: Callable[[float], float], a: float, b: float) -> float:
    if a == b:
        return 0.0
    val, _ = integrate.quad(f, a, b, epsabs=1e-13, epsrel=1e-10, limit=200)
    return val


def lemma_uuu(alpha: float, phi: Callable[[float], float], t: float, tau: float) -> float:
    if tau < 0 or tau > t:
        raise ValueError(f"need 0 <= tau <= t, got tau={tau}, t={t}")
    return alpha * phi(t - tau) * math.exp(_quad(phi, t - tau, t))


def stabilized_I(I_star: float, r_star: float, theta: float, mu: float, t: float, t_star: float) -> float:
    if t < t_star:
        raise ValueError("t must not precede t_star")
    return I_star * math.exp((r_star - 1.0) * (theta + mu) * (t - t_star))


def stabilized_R(
    theta: float, rho_R_floor: float, I_path: Callable[[float], float], t: float, tau: float
) -> float:
    """Recovered density at age ``tau`` when the recovered rate is the constant ``rho_R_floor``."""
    return theta * I_path(t - tau) * math.exp(-rho_R_floor * _quad(I_path, t - tau, t))


def deaths_closed_form(
    I_star: float, r_star: float, theta: float, mu: float, t_star: float, T: float
) -> float:
    span = (theta + mu) * (T - t_star)
    x = (1.0 - r_star) * span
    # (1 - e^{-x}) / (1 - r*) written so that r* -> 1 is smooth
    factor = span if x == 0.0 else -math.expm1(-x) / x * span
    return mu / (theta + mu) * I_star * factor


def manufactured_line(
    alpha: float, phi: Callable[[float], float], horizon: float, t_end: float, dt: float
) -> tuple[np.ndarray, np.ndarray]:
    """Drive an empty line with growth ``phi(t)`` and inflow ``alpha phi(t)`` up to ``t_end``.

    Uses the integrator's own decay/shift primitives; returns ``(tau, density)``.
    """
    line = DelayLine.empty(horizon, dt)
    n_steps = int(round(t_end / dt))
    for n in range(n_steps):
        t = n * dt
        rate = phi(t)
        _decay(line, line.density * rate, 0.0, dt)
        _shift(line)
        line.density[0] = alpha * rate
    return line.tau, line.density


@dataclass
class PinnedR0:
    """Dose just enough to pull the reproduction number back to ``r_star``.

    A dose moves one individual from rate ``rho_S`` to ``rho_V(tau)``, which is
    ``rho_S`` at ``tau = 0``, so a single step has no leverage.  The controller
    therefore inverts the numerator over a ``lookahead``: dosing ``p`` per day
    for that long lowers it by about ``p * int_0^h (rho_S - rho_V)``.
    """

    r_star: float
    t_on: float = 30.0
    lookahead: float = 2.0
    p_max: float = 10.0
    lead_in: object | None = None
    _gain: float | None = field(default=None, init=False, repr=False)

    def _leverage(self, spec: ModelSpec, dt: float) -> float:
        if self._gain is None:
            prof = spec.vaccine_profiles[0][0][0]
            h = min(self.lookahead, prof.horizon)
            self._gain = _quad(lambda s: spec.rho_S[0, 0] - prof(s), 0.0, h)
        return self._gain

    def request(self, t, state, r0, spec: ModelSpec, dt: float) -> np.ndarray:
        out = np.zeros((1, spec.k))
        c = state.classes[0]
        if t < self.t_on and self.lead_in is not None:
            return dose_request(self.lead_in, t, state, r0)
        if t < self.t_on or c.S <= 0 or r0 is None:
            return out
        excess = (r0 - self.r_star) * (spec.theta[0] + spec.mu[0])
        if excess > 0:
            out[0, 0] = min(self.p_max, excess / self._leverage(spec, dt))
        return out


@dataclass
class PinnedRegimeCheck:
    r_star: float
    t_star: float
    T: float
    I_rel_err: float
    deaths_sim: float
    deaths_closed: float
    r0_band: tuple[float, float]

    @property
    def deaths_rel_err(self) -> float:
        return abs(self.deaths_sim - self.deaths_closed) / self.deaths_closed


def pinned_regime_check(
    r_star: float = 1.0,
    t_star: float = 500.0,
    T: float = 730.0,
    dt: float = 0.05,
    lookahead: float = 2.0,
    lead_in: StrategySpec = R0Feedback(4.0, 1.0),
    settle: float = 30.0,
) -> PinnedRegimeCheck:
    """Run the single-vaccine preset under ``lead_in``, switch to :class:`PinnedR0`
    ``settle`` days before ``t_star`` and compare ``[t_star, T]`` with the closed forms."""
    from .integrator import run
    from .models import make_preset
    from .observables import deaths

    spec, init = make_preset("single_vaccine", dt=dt)
    controller = PinnedR0(r_star, t_on=t_star - settle, lookahead=lookahead, lead_in=lead_in)
    series = run(spec, init, controller, Mesh(dt=dt, horizon_T=T))
    theta, mu = float(spec.theta[0]), float(spec.mu[0])
    sel = series.t >= t_star - 1e-9
    t = series.t[sel]
    I = series.I[sel, 0]
    I_star = float(I[0])
    closed = np.array([stabilized_I(I_star, r_star, theta, mu, tt, t_star) for tt in t])
    err = float(np.max(np.abs(I - closed)) / np.max(closed))
    d_sim, _ = deaths(series, t_star, T)
    d_closed = deaths_closed_form(I_star, r_star, theta, mu, t_star, T)
    r0 = series.r0[sel]
    return PinnedRegimeCheck(r_star, t_star, T, err, d_sim, d_closed, (float(r0.min()), float(r0.max())))


def manufactured_rate(t: float) -> float:
    """Smooth positive forcing used by the convergence study."""
    return 0.02 * (1.0 + 0.5 * math.sin(t / 5.0))


@dataclass
class ConvergenceStudy:
    dts: tuple[float, ...]
    errors: tuple[float, ...]

    @property
    def order(self) -> float:
        """Least-squares slope of log(error) against log(dt)."""
        return float(np.polyfit(np.log(self.dts), np.log(self.errors), 1)[0])


def uuu_convergence(
    dts: tuple[float, ...] = (0.2, 0.1, 0.05),
    alpha: float = 1.0,
    phi: Callable[[float], float] = manufactured_rate,
    t_end: float = 40.0,
    horizon: float = 60.0,
) -> ConvergenceStudy:
    """L-inf error of :func:`manufactured_line` against :func:`lemma_uuu` on several meshes."""
    errors = []
    for dt in dts:
        tau, u = manufactured_line(alpha, phi, horizon, t_end, dt)
        sel = tau < t_end - 1e-9  # cells wholly inside tau < t
        exact = np.array([lemma_uuu(alpha, phi, t_end, float(x)) for x in tau[sel]])
        errors.append(float(np.max(np.abs(u[sel] - exact))))
    return ConvergenceStudy(tuple(dts), tuple(errors))
