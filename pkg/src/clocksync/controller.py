"""Closed-loop synchronization of a slave clock against a master.

Each step collects a fixed number of two-way exchanges, fits the band,
and (after the warmup steps) installs the correction derived from the
step's model at the step boundary.  Two correction modes:

* ``jump_and_freq`` — offset jump plus constant frequency steering
  (the linear baseline).
* ``smooth`` — frequency plus drift steering so an exactly-quadratic
  residual is cancelled over the whole coming window.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import TYPE_CHECKING

import numpy as np

from .channel import exchange_batch
from .clock import SimClock, true_discrepancy
from .errors import ClockSyncError, InsufficientData
from .estimator import BandDataset, ClockEstimate, fit

if TYPE_CHECKING:
    from .scenario import Scenario

MODES = ("jump_and_freq", "smooth")


@dataclass(frozen=True)
class Phase:
    step_s: float
    n_steps: int


@dataclass(frozen=True)
class SyncSchedule:
    phases: tuple[Phase, ...]
    exchanges_per_step: int = 2000
    warmup_steps: int = 3
    correction_mode: str = "smooth"

    def __post_init__(self):
        object.__setattr__(self, "phases",
                           tuple(p if isinstance(p, Phase) else Phase(*p) for p in self.phases))
        if not self.phases:
            raise ValueError("schedule needs at least one phase")
        if any(p.step_s <= 0 or p.n_steps < 1 for p in self.phases):
            raise ValueError("phase step_s must be > 0 and n_steps >= 1")
        if self.exchanges_per_step < 3:
            raise ValueError("exchanges_per_step must be >= 3")
        if self.warmup_steps < 1:
            raise ValueError("warmup_steps must be >= 1")
        if self.correction_mode not in MODES:
            raise ValueError(f"correction_mode must be one of {MODES}")


@dataclass(frozen=True)
class StepReport:
    step_index: int
    sim_time: float  # true time at the end of the step
    step_s: float
    offset_before: float  # true discrepancy at step end, pre-correction
    offset_after: float
    freq_corr_applied: float  # steering in effect during the step (speed-up positive)
    drift_corr_applied: float
    estimate: ClockEstimate | None
    correction_active: bool = False  # a correction was in effect during this step
    failed: bool = False


@dataclass(frozen=True)
class SyncTrace:
    reports: tuple[StepReport, ...]
    scenario_id: str
    seed: int


class NotConverged:
    """Marker returned by convergence_time when the threshold is never held."""

    def __repr__(self):
        return "NotConverged"

    def __eq__(self, other):
        return isinstance(other, NotConverged)

    def __hash__(self):
        return hash("NotConverged")


def correction_from_estimate(est: ClockEstimate, mode: str, step_s: float):
    """Correction tuple (offset_adj, freq_adj, drift_adj) from a fit.

    ``step_s`` is the time from the estimate's window start to the
    instant the correction is installed; the offset (and, in smooth
    mode, the frequency) are the model evaluated there, so a perfectly
    estimated quadratic residual is cancelled identically over the
    following window.
    """
    if mode not in MODES:
        raise ValueError(f"unknown correction mode {mode!r}")
    offset_adj = est.predict(step_s)
    if mode == "jump_and_freq":
        return offset_adj, est.beta_hat, 0.0
    return offset_adj, float(est.slope(step_s)), est.alpha_hat


def run_sync(scenario: "Scenario", schedule: SyncSchedule,
             rng: np.random.Generator) -> SyncTrace:
    """Run the closed synchronization loop; deterministic per rng state."""
    master = SimClock(scenario.master)
    slave = SimClock(scenario.slave)
    n = schedule.exchanges_per_step
    t = 0.0
    step_index = 0
    correction_installed = False
    reports = []
    for phase in schedule.phases:
        for _ in range(phase.n_steps):
            step = phase.step_s
            times = t + np.arange(n) * (step / n)
            t1, t2, t3, t4 = exchange_batch(
                master, slave, scenario.delay, times, scenario.turnaround_s, rng)
            upper = t2 - t1
            lower = t3 - t4
            tb = t1 + 0.5 * (upper - lower)
            order = np.argsort(tb, kind="stable")
            data = BandDataset(
                t=tb[order], upper=upper[order], lower=lower[order],
                window_start=float(tb[order][0]), window_end=float(tb[order][-1]))
            t_end = t + step
            in_effect = correction_installed
            freq_eff = -(slave.corr_freq + slave.corr_drift * (t_end - slave.corr_epoch))
            drift_eff = -slave.corr_drift
            offset_before = true_discrepancy(slave, master, t_end)
            est = None
            failed = False
            try:
                est = fit(data, scenario.fit)
            except ClockSyncError:
                failed = True
            if est is not None and step_index >= schedule.warmup_steps - 1:
                # evaluate the model at "now" on the band time axis
                horizon = master.read(t_end) - est.window_start
                off, fr, dr = correction_from_estimate(
                    est, schedule.correction_mode, horizon)
                slave = slave.apply_correction(off, fr, dr, t_end)
                correction_installed = True
            offset_after = true_discrepancy(slave, master, t_end)
            reports.append(StepReport(
                step_index=step_index,
                sim_time=t_end,
                step_s=step,
                offset_before=offset_before,
                offset_after=offset_after,
                freq_corr_applied=freq_eff,
                drift_corr_applied=drift_eff,
                estimate=est,
                correction_active=in_effect,
                failed=failed,
            ))
            t = t_end
            step_index += 1
    return SyncTrace(reports=tuple(reports), scenario_id=scenario.scenario_id,
                     seed=scenario.seed)


def convergence_time(trace: SyncTrace, threshold: float):
    """First sim_time from which |offset_after| stays <= threshold.

    Returns a NotConverged marker if the condition never holds through
    the end of the trace.
    """
    ok_from = None
    for rep in trace.reports:
        if abs(rep.offset_after) <= threshold:
            if ok_from is None:
                ok_from = rep.sim_time
        else:
            ok_from = None
    return NotConverged() if ok_from is None else ok_from


def offset_freq_correlation(trace: SyncTrace):
    """Pearson correlation of per-step offset_before fluctuation against
    the in-effect frequency steering times the step length.

    Returns None (explicit undefined marker) when either series has zero
    variance.
    """
    reps = [r for r in trace.reports if r.correction_active]
    if len(reps) < 3:
        raise InsufficientData("need >= 3 reports with corrections in effect")
    x = np.array([r.offset_before for r in reps])
    y = np.array([r.freq_corr_applied * r.step_s for r in reps])
    if np.ptp(x) == 0.0 or np.ptp(y) == 0.0 or np.std(x) == 0.0 or np.std(y) == 0.0:
        return None
    return float(np.corrcoef(x, y)[0, 1])
