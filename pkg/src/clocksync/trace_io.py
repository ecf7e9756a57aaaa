"""Trace CSV emission and ptp4l log ingestion.

The trace CSV schema is fixed; columns (in order):

    step_index, sim_time_s, step_s, offset_before_s, offset_after_s,
    freq_corr_ppm, drift_corr_per_s, alpha_hat, beta_hat, theta_hat_s,
    d_hat_s, n_used, n_filtered

Floats are written with repr (shortest round-trip decimal), so parsing
the emitted file recovers the values bit for bit.
"""

from __future__ import annotations

import csv
import math
import re
from dataclasses import dataclass
from typing import IO, Iterable

import numpy as np

from .controller import StepReport, SyncTrace
from .errors import InsufficientData
from .estimator import ClockEstimate

TRACE_COLUMNS = (
    "step_index", "sim_time_s", "step_s", "offset_before_s", "offset_after_s",
    "freq_corr_ppm", "drift_corr_per_s", "alpha_hat", "beta_hat",
    "theta_hat_s", "d_hat_s", "n_used", "n_filtered",
)

PPM = 1e-6


def _fmt(x: float) -> str:
    return repr(float(x))


def write_trace_csv(trace: SyncTrace, sink: IO[str]) -> int:
    """Emit one row per StepReport; returns the number of data rows."""
    writer = csv.writer(sink, lineterminator="\n")
    writer.writerow(TRACE_COLUMNS)
    count = 0
    for rep in trace.reports:
        est = rep.estimate
        writer.writerow([
            rep.step_index,
            _fmt(rep.sim_time),
            _fmt(rep.step_s),
            _fmt(rep.offset_before),
            _fmt(rep.offset_after),
            _fmt(rep.freq_corr_applied / PPM),
            _fmt(rep.drift_corr_applied),
            _fmt(est.alpha_hat if est else math.nan),
            _fmt(est.beta_hat if est else math.nan),
            _fmt(est.theta_hat if est else math.nan),
            _fmt(est.d_hat if est else math.nan),
            est.n_used if est else 0,
            est.n_filtered if est else 0,
        ])
        count += 1
    return count


def read_trace_csv(source: IO[str]) -> list[dict]:
    """Parse a trace CSV back into one dict per row (schema-checked)."""
    reader = csv.reader(source)
    header = tuple(next(reader, []))
    if header != TRACE_COLUMNS:
        raise ValueError(f"unexpected trace CSV header: {header}")
    rows = []
    for raw in reader:
        row = dict(zip(TRACE_COLUMNS, raw))
        for k in row:
            row[k] = int(row[k]) if k in ("step_index", "n_used", "n_filtered") \
                else float(row[k])
        rows.append(row)
    return rows


def trace_from_rows(rows: list[dict], scenario_id: str = "", seed: int = 0) -> SyncTrace:
    """Rebuild a SyncTrace (to the extent the CSV preserves it) for the
    report analyses.  Warmup rows are recognized by their zero in-effect
    frequency steering."""
    reports = []
    for row in rows:
        est = ClockEstimate(
            alpha_hat=row["alpha_hat"], beta_hat=row["beta_hat"],
            theta_hat=row["theta_hat_s"], d_hat=row["d_hat_s"],
            n_used=row["n_used"], n_filtered=row["n_filtered"],
            residual_rms=0.0,
        ) if not math.isnan(row["alpha_hat"]) else None
        reports.append(StepReport(
            step_index=row["step_index"],
            sim_time=row["sim_time_s"],
            step_s=row["step_s"],
            offset_before=row["offset_before_s"],
            offset_after=row["offset_after_s"],
            freq_corr_applied=row["freq_corr_ppm"] * PPM,
            drift_corr_applied=row["drift_corr_per_s"],
            estimate=est,
            correction_active=row["freq_corr_ppm"] != 0.0,
            failed=est is None,
        ))
    return SyncTrace(reports=tuple(reports), scenario_id=scenario_id, seed=seed)


@dataclass(frozen=True)
class PtpLogRecord:
    timestamp: float       # seconds
    master_offset: int     # nanoseconds
    servo_state: int
    freq_adj: int          # parts per billion
    path_delay: int        # nanoseconds


_PTP_LINE = re.compile(
    r"^ptp4l\[(\d+(?:\.\d+)?)\]:\s+master offset\s+(-?\d+)\s+s(\d)\s+"
    r"freq\s+([+-]?\d+)\s+path delay\s+(\d+)\s*$"
)


def parse_ptp4l_line(line: str) -> PtpLogRecord | None:
    """Parse one ptp4l measurement line; anything else returns None
    (not a measurement, never an error)."""
    try:
        m = _PTP_LINE.match(line)
    except TypeError:
        return None
    if m is None:
        return None
    return PtpLogRecord(
        timestamp=float(m.group(1)),
        master_offset=int(m.group(2)),
        servo_state=int(m.group(3)),
        freq_adj=int(m.group(4)),
        path_delay=int(m.group(5)),
    )


def parse_ptp4l_log(lines: Iterable[str]):
    """All measurement records in a log plus the count of skipped lines."""
    records, skipped = [], 0
    for line in lines:
        rec = parse_ptp4l_line(line)
        if rec is None:
            skipped += 1
        else:
            records.append(rec)
    return records, skipped


@dataclass(frozen=True)
class PtpSummary:
    n: int
    offset_std_ns: float
    freq_std_ppb: float
    correlation: float | None  # None when undefined (zero variance)


def analyze_ptp_log(records: list[PtpLogRecord]) -> PtpSummary:
    """Dispersion and offset-vs-frequency correlation of a measurement log.

    The constant frequency component is removed; each record's dt comes
    from consecutive timestamps, and the correlation pairs the offset
    with (freq - mean) * dt (ppb * s == ns, same unit as the offset).
    """
    if len(records) < 3:
        raise InsufficientData("need >= 3 ptp4l measurement records")
    ts = np.array([r.timestamp for r in records])
    offset = np.array([r.master_offset for r in records], dtype=float)
    freq = np.array([r.freq_adj for r in records], dtype=float)
    freq_fluct = freq - freq.mean()
    dt = np.diff(ts)
    x = offset[1:]
    y = freq_fluct[1:] * dt
    if np.std(x) == 0.0 or np.std(y) == 0.0:
        corr = None
    else:
        corr = float(np.corrcoef(x, y)[0, 1])
    return PtpSummary(
        n=len(records),
        offset_std_ns=float(np.std(offset)),
        freq_std_ppb=float(np.std(freq_fluct)),
        correlation=corr,
    )


PTP_CSV_COLUMNS = ("timestamp_s", "master_offset_ns", "servo_state",
                   "freq_adj_ppb", "path_delay_ns")


def write_ptp_csv(records: list[PtpLogRecord], sink: IO[str]) -> int:
    writer = csv.writer(sink, lineterminator="\n")
    writer.writerow(PTP_CSV_COLUMNS)
    for r in records:
        writer.writerow([_fmt(r.timestamp), r.master_offset, r.servo_state,
                         r.freq_adj, r.path_delay])
    return len(records)
