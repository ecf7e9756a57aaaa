"""Two-way exchange channel: delay sampling, band geometry, and the
propagation-distance identity."""

import numpy as np
import pytest

from clocksync import (ClockParams, DelayModel, ExchangeRecord, QueueModel,
                       SimClock, band_point, exchange_batch,
                       propagation_distance, true_discrepancy,
                       two_way_exchange, sample_delay)

IDENT = SimClock(ClockParams())


def test_sample_delay_no_noise_is_propagation():
    model = DelayModel(d_fwd=5e-6, d_rev=7e-6, jitter_rms=0.0)
    rng = np.random.default_rng(0)
    assert sample_delay(model, "fwd", 0.0, rng) == 5e-6
    assert sample_delay(model, "rev", 3.0, rng) == 7e-6


def test_sample_delay_never_below_propagation():
    model = DelayModel(d_fwd=5e-6, jitter_rms=1e-7,
                       queue_fwd=QueueModel(mean_extra=1e-6))
    rng = np.random.default_rng(1)
    delays = sample_delay(model, "fwd", np.zeros(10000), rng)
    assert np.all(delays >= 5e-6)


def test_queue_mean_extra_law_of_large_numbers():
    model = DelayModel(d_fwd=5e-6, jitter_rms=0.0,
                       queue_fwd=QueueModel(mean_extra=1e-6))
    rng = np.random.default_rng(2)
    delays = sample_delay(model, "fwd", np.zeros(100000), rng)
    extra = np.mean(delays) - 5e-6
    assert extra == pytest.approx(1e-6, rel=0.05)


def test_bursty_queue_modulates_mean():
    q = QueueModel(mean_extra=1e-6, burst_amplitude=2e-6, burst_period=10.0)
    # sinusoid peaks at t = period/4, bottoms out at 3*period/4
    assert q.mean_at(2.5) == pytest.approx(3e-6)
    assert q.mean_at(7.5) == pytest.approx(1e-6)


def test_two_way_exchange_band_geometry():
    # slave 3 us ahead over a symmetric noiseless 2 us channel
    slave = SimClock(ClockParams(theta=3e-6))
    model = DelayModel(d_fwd=2e-6, d_rev=2e-6, jitter_rms=0.0)
    rec = two_way_exchange(IDENT, slave, model, 0.0, 0.0, np.random.default_rng(0))
    assert rec.t2 - rec.t1 == pytest.approx(5e-6, abs=1e-18)
    assert rec.t3 - rec.t4 == pytest.approx(1e-6, abs=1e-18)


def test_collapsed_band_when_offsets_match():
    # both clocks identical: the band midline is zero and the width is 2d
    model = DelayModel(d_fwd=2e-6, d_rev=2e-6, jitter_rms=0.0)
    rec = two_way_exchange(IDENT, IDENT, model, 0.0, 0.0, np.random.default_rng(0))
    bp = band_point(rec)
    assert bp.upper == pytest.approx(2e-6, abs=1e-18)
    assert bp.lower == pytest.approx(-2e-6, abs=1e-18)


def test_propagation_distance_worked_pair():
    rec = ExchangeRecord(t1=0.0, t2=1e-5, t3=1e-5, t4=6e-6, true_time=0.0)
    assert propagation_distance(rec) == pytest.approx(3e-6, rel=1e-12)


def test_propagation_distance_collapsed_band_is_zero():
    rec = ExchangeRecord(t1=0.0, t2=2.0, t3=0.0, t4=-2.0, true_time=0.0)
    assert propagation_distance(rec) == 0.0


def test_propagation_distance_symmetric_channel_exact():
    model = DelayModel(d_fwd=2e-6, d_rev=2e-6, jitter_rms=0.0)
    rec = two_way_exchange(IDENT, IDENT, model, 0.0, 0.0, np.random.default_rng(0))
    assert propagation_distance(rec) == 2e-6
    slave = SimClock(ClockParams(theta=3e-6, beta=1e-5))
    rec = two_way_exchange(IDENT, slave, model, 50.0, 1e-3, np.random.default_rng(0))
    # the skew * turnaround term tilts the band slightly
    assert propagation_distance(rec) == pytest.approx(2e-6, abs=1e-5 * 1.1e-3)


def test_band_contains_true_discrepancy():
    slave = SimClock(ClockParams(theta=1e-4, beta=1e-5, alpha=1e-8))
    model = DelayModel(jitter_rms=1e-8,
                       queue_fwd=QueueModel(mean_extra=5e-7, burst_amplitude=1e-6,
                                            burst_period=7.0),
                       queue_rev=QueueModel(mean_extra=2e-7))
    rng = np.random.default_rng(3)
    times = np.linspace(0.0, 100.0, 10000)
    t1, t2, t3, t4 = exchange_batch(IDENT, slave, model, times, 1e-3, rng)
    upper = t2 - t1
    lower = t3 - t4
    tb = t1 + 0.5 * (upper - lower)
    disc = np.array([true_discrepancy(slave, IDENT, t) for t in tb[::100]])
    assert np.all(upper[::100] - disc >= -1e-12)
    assert np.all(disc - lower[::100] >= -1e-12)


def test_symmetric_channel_midpoint_matches_discrepancy():
    slave = SimClock(ClockParams(theta=1e-4, beta=1e-5))
    model = DelayModel(d_fwd=4e-6, d_rev=4e-6, jitter_rms=0.0)
    rng = np.random.default_rng(4)
    for t in (0.0, 10.0, 99.0):
        rec = two_way_exchange(IDENT, slave, model, t, 0.0, rng)
        bp = band_point(rec)
        mid = 0.5 * (bp.upper + bp.lower)
        disc = true_discrepancy(slave, IDENT, bp.t)
        # skew * (d + turnaround) bounds the asymmetry of the stamps
        assert abs(mid - disc) <= 1e-15 + 1e-5 * (4e-6 + 0.0)


def test_exchange_batch_deterministic_per_seed():
    slave = SimClock(ClockParams(theta=1e-4, read_noise_rms=1e-9))
    model = DelayModel(jitter_rms=1e-8)
    times = np.linspace(0.0, 10.0, 500)
    a = exchange_batch(IDENT, slave, model, times, 1e-3, np.random.default_rng(5))
    b = exchange_batch(IDENT, slave, model, times, 1e-3, np.random.default_rng(5))
    for x, y in zip(a, b):
        assert np.array_equal(x, y)


def test_invalid_parameters_rejected():
    with pytest.raises(ValueError):
        DelayModel(d_fwd=0.0)
    with pytest.raises(ValueError):
        DelayModel(jitter_rms=-1e-9)
    with pytest.raises(ValueError):
        QueueModel(mean_extra=-1e-6)
    with pytest.raises(ValueError):
        sample_delay(DelayModel(), "sideways", 0.0, np.random.default_rng(0))
