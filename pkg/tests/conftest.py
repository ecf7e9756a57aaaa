"""Shared builders for the test suite."""

import numpy as np

import clocksync as cs
from clocksync.estimator import BandDataset


def make_band(theta=1e-4, beta=1e-5, alpha=1e-8, d=5e-6, n=2000, span=100.0,
              jitter=0.0, seed=0, turnaround=0.0, master=None, slave=None):
    """Simulate n two-way exchanges evenly spaced over [0, span] and
    collect the band points (sorted by placement time)."""
    rng = np.random.default_rng(seed)
    if master is None:
        master = cs.SimClock(cs.ClockParams())
    if slave is None:
        slave = cs.SimClock(cs.ClockParams(theta=theta, beta=beta, alpha=alpha))
    model = cs.DelayModel(d_fwd=d, d_rev=d, jitter_rms=jitter)
    times = np.arange(n) * (span / n)
    t1, t2, t3, t4 = cs.exchange_batch(master, slave, model, times, turnaround, rng)
    upper = t2 - t1
    lower = t3 - t4
    tb = t1 + 0.5 * (upper - lower)
    order = np.argsort(tb, kind="stable")
    return BandDataset(
        t=tb[order], upper=upper[order], lower=lower[order],
        window_start=float(tb[order][0]), window_end=float(tb[order][-1]))


def inject_upper_outliers(data, frac, seed, depth=4e-6):
    """Shift a random fraction of upper points below the band midline
    (physically impossible exchanges).  Returns (dirty dataset, mask of
    injected points)."""
    rng = np.random.default_rng(seed)
    n_bad = max(1, int(round(data.n * frac)))
    idx = rng.choice(data.n, n_bad, replace=False)
    upper = data.upper.copy()
    upper[idx] = data.midpoint[idx] - rng.uniform(0.0, depth, n_bad)
    mask = np.zeros(data.n, dtype=bool)
    mask[idx] = True
    dirty = BandDataset(t=data.t, upper=upper, lower=data.lower,
                        window_start=data.window_start, window_end=data.window_end)
    return dirty, mask
