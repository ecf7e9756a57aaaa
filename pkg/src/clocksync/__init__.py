"""Two-clock synchronization simulator and band estimator."""

from .clock import (ClockParams, SimClock, TempModel, local_time,
                    local_time_integrated, skew_at, true_discrepancy)
from .channel import (BandPoint, DelayModel, ExchangeRecord, QueueModel,
                      band_point, exchange_batch, propagation_distance,
                      sample_delay, two_way_exchange)
from .estimator import (BandDataset, ClockEstimate, FitConfig, clean_band,
                        fit, fit_band_margin, fit_midpoint_ls)
from .controller import (NotConverged, Phase, StepReport, SyncSchedule,
                         SyncTrace, convergence_time, correction_from_estimate,
                         offset_freq_correlation, run_sync)
from .scenario import Scenario, parse_scenario, serialize_scenario
from .trace_io import (PtpLogRecord, PtpSummary, analyze_ptp_log,
                       parse_ptp4l_line, parse_ptp4l_log, read_trace_csv,
                       write_ptp_csv, write_trace_csv)
from . import errors

__all__ = [name for name in dir() if not name.startswith("_")]
