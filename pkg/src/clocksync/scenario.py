"""Scenario configuration: a versioned YAML document bundling the clock,
channel, estimator, and schedule parameters of one experiment.

Configs use ppm for skew quantities (1 ppm = 1e-6); conversions to the
dimensionless internal units happen here and only here.  Unknown keys are
rejected.  The default slave clock is a fast-drift preset (0.01 ppm/s
drift) chosen so the nonlinearity is visible within ~100 s windows at the
0.01 us jitter floor; these defaults are working values of this package,
not published ones.
"""

from __future__ import annotations

import io
from dataclasses import dataclass

import yaml

from .channel import DelayModel, QueueModel
from .clock import ClockParams, TempModel
from .controller import Phase, SyncSchedule
from .errors import ParseError, ValidationError
from .estimator import FitConfig

SPEC_VERSION = 1

PPM = 1e-6
SECONDS_PER_DAY = 86400.0


@dataclass(frozen=True)
class Scenario:
    scenario_id: str
    seed: int
    master: ClockParams = ClockParams()
    slave: ClockParams = ClockParams(theta=1e-4, beta=10 * PPM, alpha=0.01 * PPM)
    delay: DelayModel = DelayModel()
    fit: FitConfig = FitConfig()
    schedule: SyncSchedule = SyncSchedule(phases=(Phase(2.0, 13),))
    convergence_threshold: float = 1e-6
    turnaround_s: float = 1e-3

    def __post_init__(self):
        if not self.scenario_id:
            raise ValidationError("scenario_id must be nonempty")
        if self.convergence_threshold <= 0:
            raise ValidationError("convergence_threshold must be > 0")
        if self.turnaround_s < 0:
            raise ValidationError("turnaround_s must be >= 0")


def _section(doc, allowed, path):
    if doc is None:
        return {}
    if not isinstance(doc, dict):
        raise ParseError("expected a mapping", path)
    for k in doc:
        if k not in allowed:
            raise ParseError(f"unknown key {k!r}", f"{path}.{k}" if path else str(k))
    return doc


def _num(doc, key, default, path):
    v = doc.get(key, default)
    if v is None:
        return default
    if isinstance(v, bool) or not isinstance(v, (int, float)):
        raise ParseError("expected a number", f"{path}.{key}")
    return float(v)


_CLOCK_KEYS = {"t0_s", "theta_s", "beta_ppm", "alpha_ppm_per_s",
               "aging_ppm_per_day", "read_noise_rms_s", "temp"}
_TEMP_KEYS = {"f0_ppm", "T0_c", "parabolic_coeff_ppm_per_c2", "profile"}
_QUEUE_KEYS = {"mean_extra_s", "burst_amplitude_s", "burst_period_s"}
_DELAY_KEYS = {"d_fwd_s", "d_rev_s", "jitter_rms_s", "queue_fwd", "queue_rev"}
_FIT_KEYS = {"model_order", "margin_penalty", "clean_k_sigma",
             "max_clean_rounds", "solver_tol"}
_SCHEDULE_KEYS = {"phases", "exchanges_per_step", "warmup_steps", "correction_mode"}
_TOP_KEYS = {"spec_version", "scenario_id", "seed", "master", "slave", "delay",
             "fit", "schedule", "convergence_threshold_s", "turnaround_s"}


def _parse_temp(doc, path):
    if doc is None:
        return None
    doc = _section(doc, _TEMP_KEYS, path)
    profile = doc.get("profile", [])
    if not isinstance(profile, list):
        raise ParseError("expected a list of [t_s, celsius] pairs", f"{path}.profile")
    knots = []
    for i, pair in enumerate(profile):
        if not (isinstance(pair, list) and len(pair) == 2):
            raise ParseError("expected [t_s, celsius]", f"{path}.profile[{i}]")
        knots.append((float(pair[0]), float(pair[1])))
    return TempModel(
        f0_ppm_offset=_num(doc, "f0_ppm", 0.0, path) * PPM,
        T0=_num(doc, "T0_c", 25.0, path),
        parabolic_coeff=_num(doc, "parabolic_coeff_ppm_per_c2", -0.04, path),
        profile_knots=tuple(knots),
    )


def _parse_clock(doc, path, default: ClockParams):
    doc = _section(doc, _CLOCK_KEYS, path)
    try:
        return ClockParams(
            t0=_num(doc, "t0_s", default.t0, path),
            theta=_num(doc, "theta_s", default.theta, path),
            beta=_num(doc, "beta_ppm", default.beta / PPM, path) * PPM,
            alpha=_num(doc, "alpha_ppm_per_s", default.alpha / PPM, path) * PPM,
            aging_rate=_num(doc, "aging_ppm_per_day",
                            default.aging_rate / PPM * SECONDS_PER_DAY, path)
            * PPM / SECONDS_PER_DAY,
            temp=_parse_temp(doc.get("temp"), f"{path}.temp"),
            read_noise_rms=_num(doc, "read_noise_rms_s", default.read_noise_rms, path),
        )
    except ValueError as exc:
        raise ValidationError(f"{path}: {exc}") from exc


def _parse_queue(doc, path):
    if doc is None:
        return None
    doc = _section(doc, _QUEUE_KEYS, path)
    try:
        return QueueModel(
            mean_extra=_num(doc, "mean_extra_s", 0.0, path),
            burst_amplitude=_num(doc, "burst_amplitude_s", 0.0, path),
            burst_period=_num(doc, "burst_period_s", 0.0, path),
        )
    except ValueError as exc:
        raise ValidationError(f"{path}: {exc}") from exc


def _parse_delay(doc, path="delay"):
    doc = _section(doc, _DELAY_KEYS, path)
    try:
        return DelayModel(
            d_fwd=_num(doc, "d_fwd_s", 5e-6, path),
            d_rev=_num(doc, "d_rev_s", 5e-6, path),
            jitter_rms=_num(doc, "jitter_rms_s", 1e-8, path),
            queue_fwd=_parse_queue(doc.get("queue_fwd"), f"{path}.queue_fwd"),
            queue_rev=_parse_queue(doc.get("queue_rev"), f"{path}.queue_rev"),
        )
    except ValueError as exc:
        raise ValidationError(f"{path}: {exc}") from exc


def _parse_fit(doc, path="fit"):
    doc = _section(doc, _FIT_KEYS, path)
    d = FitConfig()
    try:
        return FitConfig(
            model_order=int(_num(doc, "model_order", d.model_order, path)),
            margin_penalty=_num(doc, "margin_penalty", d.margin_penalty, path),
            clean_k_sigma=_num(doc, "clean_k_sigma", d.clean_k_sigma, path),
            max_clean_rounds=int(_num(doc, "max_clean_rounds", d.max_clean_rounds, path)),
            solver_tol=_num(doc, "solver_tol", d.solver_tol, path),
        )
    except ValueError as exc:
        raise ValidationError(f"{path}: {exc}") from exc


def _parse_schedule(doc, path="schedule"):
    doc = _section(doc, _SCHEDULE_KEYS, path)
    raw_phases = doc.get("phases", [[2.0, 13]])
    if not isinstance(raw_phases, list):
        raise ParseError("expected a list of phases", f"{path}.phases")
    phases = []
    for i, ph in enumerate(raw_phases):
        if isinstance(ph, dict):
            ph = _section(ph, {"step_s", "n_steps"}, f"{path}.phases[{i}]")
            phases.append(Phase(float(ph.get("step_s", 0)), int(ph.get("n_steps", 0))))
        elif isinstance(ph, list) and len(ph) == 2:
            phases.append(Phase(float(ph[0]), int(ph[1])))
        else:
            raise ParseError("expected {step_s, n_steps} or [step_s, n_steps]",
                             f"{path}.phases[{i}]")
    mode = doc.get("correction_mode", "smooth")
    if not isinstance(mode, str):
        raise ParseError("expected a string", f"{path}.correction_mode")
    try:
        return SyncSchedule(
            phases=tuple(phases),
            exchanges_per_step=int(_num(doc, "exchanges_per_step", 2000, path)),
            warmup_steps=int(_num(doc, "warmup_steps", 3, path)),
            correction_mode=mode,
        )
    except ValueError as exc:
        raise ValidationError(f"{path}: {exc}") from exc


def parse_scenario(text: str) -> Scenario:
    """Parse and validate a scenario YAML document."""
    try:
        doc = yaml.safe_load(io.StringIO(text))
    except yaml.YAMLError as exc:
        raise ParseError(f"invalid YAML: {exc}") from exc
    if doc is None:
        doc = {}
    doc = _section(doc, _TOP_KEYS, "")
    version = doc.get("spec_version", SPEC_VERSION)
    if version != SPEC_VERSION:
        raise ValidationError(f"unsupported spec_version {version!r}")
    if "scenario_id" not in doc or not isinstance(doc["scenario_id"], str):
        raise ParseError("scenario_id (string) is required", "scenario_id")
    if "seed" not in doc or isinstance(doc["seed"], bool) or not isinstance(doc["seed"], int):
        raise ParseError("seed (integer) is required", "seed")
    defaults = Scenario(scenario_id=doc["scenario_id"], seed=doc["seed"])
    return Scenario(
        scenario_id=doc["scenario_id"],
        seed=doc["seed"],
        master=_parse_clock(doc.get("master"), "master", defaults.master),
        slave=_parse_clock(doc.get("slave"), "slave", defaults.slave),
        delay=_parse_delay(doc.get("delay")),
        fit=_parse_fit(doc.get("fit")),
        schedule=_parse_schedule(doc.get("schedule")),
        convergence_threshold=_num(doc, "convergence_threshold_s", 1e-6, ""),
        turnaround_s=_num(doc, "turnaround_s", 1e-3, ""),
    )


def _clock_dict(p: ClockParams):
    out = {
        "t0_s": p.t0,
        "theta_s": p.theta,
        "beta_ppm": p.beta / PPM,
        "alpha_ppm_per_s": p.alpha / PPM,
        "aging_ppm_per_day": p.aging_rate / PPM * SECONDS_PER_DAY,
        "read_noise_rms_s": p.read_noise_rms,
    }
    if p.temp is not None:
        out["temp"] = {
            "f0_ppm": p.temp.f0_ppm_offset / PPM,
            "T0_c": p.temp.T0,
            "parabolic_coeff_ppm_per_c2": p.temp.parabolic_coeff,
            "profile": [[t, T] for t, T in p.temp.profile_knots],
        }
    return out


def _queue_dict(q: QueueModel | None):
    if q is None:
        return None
    return {"mean_extra_s": q.mean_extra, "burst_amplitude_s": q.burst_amplitude,
            "burst_period_s": q.burst_period}


def serialize_scenario(s: Scenario) -> str:
    """Normalized YAML form; serialize(parse(doc)) is idempotent."""
    delay = {"d_fwd_s": s.delay.d_fwd, "d_rev_s": s.delay.d_rev,
             "jitter_rms_s": s.delay.jitter_rms}
    for key, q in (("queue_fwd", s.delay.queue_fwd), ("queue_rev", s.delay.queue_rev)):
        if q is not None:
            delay[key] = _queue_dict(q)
    doc = {
        "spec_version": SPEC_VERSION,
        "scenario_id": s.scenario_id,
        "seed": s.seed,
        "master": _clock_dict(s.master),
        "slave": _clock_dict(s.slave),
        "delay": delay,
        "fit": {
            "model_order": s.fit.model_order,
            "margin_penalty": s.fit.margin_penalty,
            "clean_k_sigma": s.fit.clean_k_sigma,
            "max_clean_rounds": s.fit.max_clean_rounds,
            "solver_tol": s.fit.solver_tol,
        },
        "schedule": {
            "phases": [[p.step_s, p.n_steps] for p in s.schedule.phases],
            "exchanges_per_step": s.schedule.exchanges_per_step,
            "warmup_steps": s.schedule.warmup_steps,
            "correction_mode": s.schedule.correction_mode,
        },
        "convergence_threshold_s": s.convergence_threshold,
        "turnaround_s": s.turnaround_s,
    }
    return yaml.safe_dump(doc, sort_keys=False)
