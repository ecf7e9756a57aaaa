"""Two-way timestamp exchange over a noisy, possibly asymmetric channel.

Each exchange produces the four PTP-style timestamps (t1, t2, t3, t4) and
from them a band point: an upper bound ``t2 - t1`` and a lower bound
``t3 - t4`` on the slave-minus-master discrepancy.  One-way delays are the
propagation term plus one-sided gaussian jitter plus an optional queueing
extra, so every sampled delay is at least the physical propagation time.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .clock import SimClock

DEFAULT_TURNAROUND = 1e-3  # slave-side response delay, seconds


@dataclass(frozen=True)
class QueueModel:
    """Exponential queueing delay modulated by a sinusoidal load pattern.

    The instantaneous mean extra delay is
        mean_extra + burst_amplitude * 0.5 * (1 + sin(2*pi*t/burst_period))
    and each sample is exponential with that mean.  With
    burst_amplitude == 0 the long-run mean extra delay is exactly
    ``mean_extra``.
    """

    mean_extra: float = 0.0
    burst_amplitude: float = 0.0
    burst_period: float = 0.0

    def __post_init__(self):
        if min(self.mean_extra, self.burst_amplitude, self.burst_period) < 0:
            raise ValueError("queue parameters must be >= 0")

    def mean_at(self, t):
        m = np.asarray(t, dtype=float) * 0.0 + self.mean_extra
        if self.burst_amplitude > 0 and self.burst_period > 0:
            m = m + self.burst_amplitude * 0.5 * (
                1.0 + np.sin(2.0 * np.pi * np.asarray(t, dtype=float) / self.burst_period)
            )
        return m


@dataclass(frozen=True)
class DelayModel:
    """One-way delay model for both directions of the exchange."""

    d_fwd: float = 5e-6
    d_rev: float = 5e-6
    jitter_rms: float = 1e-8  # 0.01 us
    queue_fwd: QueueModel | None = None
    queue_rev: QueueModel | None = None

    def __post_init__(self):
        if self.d_fwd <= 0 or self.d_rev <= 0:
            raise ValueError("propagation delays must be > 0")
        if self.jitter_rms < 0:
            raise ValueError("jitter_rms must be >= 0")


@dataclass(frozen=True)
class ExchangeRecord:
    """One two-way exchange; ``true_time`` tags the true time of t1
    (kept for test oracles only)."""

    t1: float
    t2: float
    t3: float
    t4: float
    true_time: float


@dataclass(frozen=True)
class BandPoint:
    t: float
    upper: float  # t2 - t1
    lower: float  # t3 - t4


def sample_delay(model: DelayModel, direction: str, t, rng: np.random.Generator):
    """Sample a one-way delay at true time t; vectorized over t.

    direction is "fwd" (master->slave) or "rev".  The result is clamped
    at the propagation term, which jitter (one-sided) and queueing
    (nonnegative) already respect.
    """
    t = np.asarray(t, dtype=float)
    if direction == "fwd":
        prop, queue = model.d_fwd, model.queue_fwd
    elif direction == "rev":
        prop, queue = model.d_rev, model.queue_rev
    else:
        raise ValueError(f"unknown direction {direction!r}")
    delay = np.full(t.shape, prop)
    if model.jitter_rms > 0:
        delay = delay + np.abs(rng.normal(0.0, model.jitter_rms, size=t.shape))
    if queue is not None:
        mean = queue.mean_at(t)
        extra = np.where(mean > 0, rng.exponential(1.0, size=t.shape) * mean, 0.0)
        delay = delay + extra
    delay = np.maximum(delay, prop)
    return delay if delay.ndim else float(delay)


def exchange_batch(master: SimClock, slave: SimClock, model: DelayModel,
                   times, turnaround: float, rng: np.random.Generator):
    """Run one two-way exchange at each true time in ``times``.

    Returns (t1, t2, t3, t4) arrays.  This is the vectorized path the
    controller uses; `two_way_exchange` is the single-exchange wrapper.
    """
    times = np.asarray(times, dtype=float)
    if turnaround < 0:
        raise ValueError("turnaround must be >= 0")
    d1 = np.asarray(sample_delay(model, "fwd", times, rng))
    t2_true = times + d1
    t3_true = t2_true + turnaround
    d2 = np.asarray(sample_delay(model, "rev", t3_true, rng))
    t4_true = t3_true + d2
    t1 = master.read(times, rng)
    t2 = slave.read(t2_true, rng)
    t3 = slave.read(t3_true, rng)
    t4 = master.read(t4_true, rng)
    return t1, t2, t3, t4


def two_way_exchange(master: SimClock, slave: SimClock, model: DelayModel,
                     t: float, turnaround: float, rng: np.random.Generator) -> ExchangeRecord:
    """One four-timestamp exchange starting at true time t."""
    t1, t2, t3, t4 = exchange_batch(master, slave, model, np.array([t]), turnaround, rng)
    return ExchangeRecord(float(t1[0]), float(t2[0]), float(t3[0]), float(t4[0]), t)


def propagation_distance(rec: ExchangeRecord) -> float:
    """Half the difference of the two bounds: ((t2-t1) - (t3-t4)) / 2."""
    return ((rec.t2 - rec.t1) - (rec.t3 - rec.t4)) / 2.0


def band_point(rec: ExchangeRecord) -> BandPoint:
    """Band bounds from an exchange, placed at t1 + propagation distance
    (approximately the true time of the slave-side stamps)."""
    upper = rec.t2 - rec.t1
    lower = rec.t3 - rec.t4
    return BandPoint(t=rec.t1 + (upper - lower) / 2.0, upper=upper, lower=lower)
