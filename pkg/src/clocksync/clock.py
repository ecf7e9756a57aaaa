"""Ground-truth clock model.

A simulated clock maps true time ``t`` to a local reading

    T_c(t) = t0 + integral_0^t (1 + s(x)) dx + theta

where the skew ``s`` may itself vary with time through a constant drift
rate, a long-term aging trend, and a parabolic temperature dependence.
When ``s`` is polynomial in ``t`` the integral has a closed form; the
temperature term is integrated numerically on a fixed sub-step grid.

Sign convention (used everywhere in this package): positive ``theta``
means the clock reads ahead of true time.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, replace

import numpy as np

# Sub-step for numerical integration of non-polynomial skew terms.
# Trapezoid error is O(dt^2), far below the jitter floors simulated here.
INTEGRATION_DT = 1e-3


@dataclass(frozen=True)
class TempModel:
    """Parabolic temperature dependence of skew (tuning-fork crystal style).

    ``profile_knots`` is a piecewise-linear temperature profile given as a
    sorted sequence of ``(true_time_s, celsius)`` pairs; it is clamped to
    the end values outside the knot range.  The skew contribution is

        f0_ppm_offset + parabolic_coeff * 1e-6 * (T(t) - T0)^2

    so at ``T = T0`` it equals ``f0_ppm_offset`` exactly.  Note that
    ``f0_ppm_offset`` is dimensionless (1e-6 == 1 ppm) while
    ``parabolic_coeff`` is in ppm per degC^2.
    """

    f0_ppm_offset: float = 0.0
    T0: float = 25.0
    parabolic_coeff: float = -0.04
    profile_knots: tuple[tuple[float, float], ...] = ()

    def temperature(self, t):
        if not self.profile_knots:
            return np.full_like(np.asarray(t, dtype=float), self.T0)
        knots_t = np.array([k[0] for k in self.profile_knots])
        knots_T = np.array([k[1] for k in self.profile_knots])
        return np.interp(t, knots_t, knots_T)

    def skew_contribution(self, t):
        dT = self.temperature(t) - self.T0
        return self.f0_ppm_offset + self.parabolic_coeff * 1e-6 * dT * dT


@dataclass(frozen=True)
class ClockParams:
    """Static description of a physical clock.

    theta        offset in seconds (positive: reads ahead of true time)
    beta         skew, dimensionless (1e-6 == 1 ppm)
    alpha        skew drift rate, 1/s
    aging_rate   long-term skew trend, 1/s (e.g. 1e-6 / 86400 for 1 ppm/day)
    """

    t0: float = 0.0
    theta: float = 0.0
    beta: float = 0.0
    alpha: float = 0.0
    aging_rate: float = 0.0
    temp: TempModel | None = None
    read_noise_rms: float = 0.0

    def __post_init__(self):
        if self.read_noise_rms < 0:
            raise ValueError("read_noise_rms must be >= 0")


def skew_at(params: ClockParams, t):
    """Total instantaneous skew s(t); accepts scalars or arrays."""
    t = np.asarray(t, dtype=float)
    s = params.beta + (params.alpha + params.aging_rate) * t
    if params.temp is not None:
        s = s + params.temp.skew_contribution(t)
    return s if s.ndim else float(s)


class _TempIntegralCache:
    """Cumulative trapezoid integral of the temperature skew term on a
    fixed INTEGRATION_DT grid, grown on demand."""

    def __init__(self, temp: TempModel):
        self.temp = temp
        self.grid_t = np.array([0.0])
        self.cum = np.array([0.0])

    def _grow(self, t_max: float):
        n = int(math.ceil(t_max / INTEGRATION_DT)) + 2
        grid = np.arange(n + 1) * INTEGRATION_DT
        vals = self.temp.skew_contribution(grid)
        seg = 0.5 * (vals[1:] + vals[:-1]) * INTEGRATION_DT
        self.grid_t = grid
        self.cum = np.concatenate([[0.0], np.cumsum(seg)])

    def integral(self, t):
        """integral_0^t temp_skew(x) dx, vectorized."""
        t = np.asarray(t, dtype=float)
        t_max = float(np.max(t)) if t.size else 0.0
        if t_max > self.grid_t[-1]:
            self._grow(t_max * 1.5 + 1.0)
        idx = np.minimum(
            np.searchsorted(self.grid_t, t, side="right") - 1,
            len(self.grid_t) - 2,
        )
        base_t = self.grid_t[idx]
        frac = t - base_t
        v0 = self.temp.skew_contribution(base_t)
        v1 = self.temp.skew_contribution(t)
        return self.cum[idx] + 0.5 * (v0 + v1) * frac


_temp_caches: dict[int, _TempIntegralCache] = {}


def _temp_integral(params: ClockParams, t):
    cache = _temp_caches.get(id(params.temp))
    if cache is None or cache.temp is not params.temp:
        cache = _TempIntegralCache(params.temp)
        _temp_caches[id(params.temp)] = cache
    return cache.integral(t)


def local_time(params: ClockParams, t):
    """Clock reading at true time ``t`` (no corrections, no read noise).

    The polynomial part of the skew integrates in closed form:
        0.5*(alpha+aging)*t^2 + (1+beta)*t + theta + t0
    A temperature model adds a numerically integrated contribution.
    Accepts scalars or arrays.
    """
    t = np.asarray(t, dtype=float)
    a = params.alpha + params.aging_rate
    out = 0.5 * a * t * t + (1.0 + params.beta) * t + (params.theta + params.t0)
    if params.temp is not None:
        out = out + _temp_integral(params, t)
    return out if out.ndim else float(out)


def local_time_integrated(params: ClockParams, t: float, dt: float = INTEGRATION_DT) -> float:
    """Reference implementation: full trapezoid integration of 1 + s(x).

    Uses exact summation (math.fsum) so that for polynomial skew the only
    error is the quadrature error itself (zero for linear s).  Slow; test
    oracle only.
    """
    n = int(math.floor(t / dt))
    grid = np.arange(n + 1) * dt
    vals = 1.0 + np.asarray(skew_at(params, grid), dtype=float)
    terms = (0.5 * (vals[1:] + vals[:-1]) * dt).tolist()
    rem = t - n * dt
    if rem > 0:
        v_end = 1.0 + float(skew_at(params, t))
        terms.append(0.5 * (vals[-1] + v_end) * rem)
    return math.fsum(terms) + params.theta + params.t0


@dataclass(frozen=True)
class SimClock:
    """A clock plus the correction state installed by a controller.

    ``read`` subtracts the correction polynomial (anchored at
    ``corr_epoch``) from the raw model time:

        read(t) = local_time(t)
                  - [corr_offset + corr_freq*(t-e) + 0.5*corr_drift*(t-e)^2]
                  + N(0, read_noise_rms)

    With all corrections zero, read(t) equals the uncorrected model time.
    """

    params: ClockParams
    corr_offset: float = 0.0
    corr_freq: float = 0.0
    corr_drift: float = 0.0
    corr_epoch: float = 0.0

    def correction_at(self, t):
        dt = np.asarray(t, dtype=float) - self.corr_epoch
        out = self.corr_offset + self.corr_freq * dt + 0.5 * self.corr_drift * dt * dt
        return out if out.ndim else float(out)

    def read(self, t, rng: np.random.Generator | None = None):
        """Corrected clock reading at true time t; vectorized.

        Deterministic given the rng state; pass rng=None for a noiseless
        read regardless of read_noise_rms.
        """
        t = np.asarray(t, dtype=float)
        out = local_time(self.params, t) - self.correction_at(t)
        if rng is not None and self.params.read_noise_rms > 0:
            out = out + rng.normal(0.0, self.params.read_noise_rms, size=t.shape)
        return out if np.ndim(out) else float(out)

    def apply_correction(self, offset_adj: float, freq_adj: float,
                         drift_adj: float, t: float) -> "SimClock":
        """Accumulate adjustments and re-anchor the correction at ``t``.

        The existing correction polynomial is re-expanded about the new
        epoch before the adjustments are added, so corrections compose
        exactly (a correction equal to the true model parameters pins
        read(t) == t for all t).
        """
        d = t - self.corr_epoch
        off = self.corr_offset + self.corr_freq * d + 0.5 * self.corr_drift * d * d
        freq = self.corr_freq + self.corr_drift * d
        return replace(
            self,
            corr_offset=off + offset_adj,
            corr_freq=freq + freq_adj,
            corr_drift=self.corr_drift + drift_adj,
            corr_epoch=t,
        )


def true_discrepancy(slave: SimClock, master: SimClock, t):
    """Noiseless slave-minus-master reading difference at true time t."""
    return slave.read(t) - master.read(t)
