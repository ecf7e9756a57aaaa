"""Learning clock discrepancy models from two-way exchange bands.

Two fitting routes are provided and kept independent on purpose:

* ``fit_midpoint_ls`` — plain polynomial least squares on the band
  midpoints ``(upper+lower)/2``.  Exact on symmetric noise-free bands and
  used as the oracle for the margin fit.
* ``fit_band_margin`` — the max-margin separation of the upper and lower
  point sets by a polynomial of the configured order, hinge-penalized
  (soft margin).  Solved as a linear program; the optimal half band
  width doubles as the propagation-distance estimate.

``clean_band`` drops points that violate the physical bound that no
message can arrive faster than the propagation delay (upper points far
below the fitted upper envelope, lower points far above the lower one),
and ``fit`` runs the fit -> clean -> refit loop.
"""

from __future__ import annotations

from dataclasses import dataclass, replace

import numpy as np
import scipy.sparse as sp
from scipy.optimize import linprog

from .channel import BandPoint
from .errors import DegenerateDesign, EmptyResult, NonConvergence


@dataclass(frozen=True)
class BandDataset:
    """Band points over one observation window, sorted by time."""

    t: np.ndarray
    upper: np.ndarray
    lower: np.ndarray
    window_start: float
    window_end: float

    def __post_init__(self):
        for name in ("t", "upper", "lower"):
            object.__setattr__(self, name, np.asarray(getattr(self, name), dtype=float))
        if not (self.t.shape == self.upper.shape == self.lower.shape):
            raise ValueError("t, upper, lower must have equal length")
        if self.t.size and np.any(np.diff(self.t) < 0):
            raise ValueError("points must be sorted by t")
        if self.t.size and (self.t[0] < self.window_start or self.t[-1] > self.window_end):
            raise ValueError("points must lie inside [window_start, window_end]")

    @classmethod
    def from_points(cls, points: list[BandPoint],
                    window_start: float | None = None,
                    window_end: float | None = None) -> "BandDataset":
        pts = sorted(points, key=lambda p: p.t)
        t = np.array([p.t for p in pts])
        return cls(
            t=t,
            upper=np.array([p.upper for p in pts]),
            lower=np.array([p.lower for p in pts]),
            window_start=t[0] if window_start is None else window_start,
            window_end=t[-1] if window_end is None else window_end,
        )

    @property
    def n(self) -> int:
        return int(self.t.size)

    @property
    def midpoint(self) -> np.ndarray:
        return 0.5 * (self.upper + self.lower)

    @property
    def half_width(self) -> np.ndarray:
        """Per-point propagation distance, ((t2-t1)-(t3-t4))/2."""
        return 0.5 * (self.upper - self.lower)


@dataclass(frozen=True)
class ClockEstimate:
    """Fitted discrepancy model q(tau) = theta + beta*tau + 0.5*alpha*tau^2
    with tau measured from ``window_start``."""

    alpha_hat: float
    beta_hat: float
    theta_hat: float
    d_hat: float
    n_used: int
    n_filtered: int
    residual_rms: float
    window_start: float = 0.0

    def predict(self, tau):
        """Discrepancy at tau seconds past window_start."""
        tau = np.asarray(tau, dtype=float)
        out = self.theta_hat + self.beta_hat * tau + 0.5 * self.alpha_hat * tau * tau
        return out if out.ndim else float(out)

    def slope(self, tau):
        """d/dtau of the fitted discrepancy."""
        return self.beta_hat + self.alpha_hat * np.asarray(tau, dtype=float)


@dataclass(frozen=True)
class FitConfig:
    """``margin_penalty`` is the total hinge weight; the per-point weight
    is margin_penalty / n, so the boundary presses into the data until
    about n / (2 * margin_penalty) points per side sit inside the margin.
    The default is effectively a hard margin; outlier robustness comes
    from the cleaning pass in ``fit``, not from the hinge."""

    model_order: int = 2  # 1 = linear, 2 = quadratic
    margin_penalty: float = 1000.0
    clean_k_sigma: float = 3.0
    max_clean_rounds: int = 2
    solver_tol: float = 1e-10

    def __post_init__(self):
        if self.model_order not in (1, 2):
            raise ValueError("model_order must be 1 or 2")
        if self.margin_penalty <= 0 or self.clean_k_sigma <= 0:
            raise ValueError("margin_penalty and clean_k_sigma must be > 0")


def _scaling(data: BandDataset, order: int):
    """Abscissa mapping g = (tau - c)/h onto [-1, 1] plus value scaling."""
    tau = data.t - data.window_start
    if data.n < order + 1 or np.unique(tau).size < order + 1:
        raise DegenerateDesign(
            f"order-{order} fit needs at least {order + 1} distinct time points"
        )
    c = 0.5 * (tau.max() + tau.min())
    h = 0.5 * (tau.max() - tau.min())
    if h == 0.0:
        h = 1.0
    y_center = float(np.mean(data.midpoint))
    y_scale = float(max(np.max(np.abs(data.upper - y_center)),
                        np.max(np.abs(data.lower - y_center)), 1e-30))
    return tau, c, h, y_center, y_scale


def _unscale(w, c, h, y_center, y_scale):
    """Map scaled coefficients back to (theta, beta, alpha) in tau."""
    w0 = w[0]
    w1 = w[1] if len(w) > 1 else 0.0
    w2 = w[2] if len(w) > 2 else 0.0
    a, b = 1.0 / h, -c / h
    c0 = w0 + w1 * b + w2 * b * b
    c1 = w1 * a + 2.0 * w2 * a * b
    c2 = w2 * a * a
    return y_center + y_scale * c0, y_scale * c1, 2.0 * y_scale * c2


def fit_midpoint_ls(data: BandDataset, order: int) -> ClockEstimate:
    """Least-squares polynomial fit of the band midpoints (oracle route)."""
    tau, c, h, y_center, y_scale = _scaling(data, order)
    g = (tau - c) / h
    design = np.vander(g, order + 1, increasing=True)
    y = (data.midpoint - y_center) / y_scale
    w, *_ = np.linalg.lstsq(design, y, rcond=None)
    theta, beta, alpha = _unscale(w, c, h, y_center, y_scale)
    resid = data.midpoint - (theta + beta * tau + 0.5 * alpha * tau * tau)
    return ClockEstimate(
        alpha_hat=alpha,
        beta_hat=beta,
        theta_hat=theta,
        d_hat=float(np.mean(data.half_width)),
        n_used=data.n,
        n_filtered=0,
        residual_rms=float(np.sqrt(np.mean(resid**2))),
        window_start=data.window_start,
    )


def _margin_lp(design, u, l, penalty, tol, extra_ub=None, min_norm=False):
    """Assemble and solve one phase of the margin LP.

    Variables: [w (p), m, xi_u (n), xi_l (n)] (+ |w| helpers for the
    min-norm phase).  Constraints:
        w.phi_i + m - xi_u_i <= u_i
       -w.phi_i + m - xi_l_i <= -l_i
    Objective: -m + penalty * sum(xi), or sum|w| subject to the phase-1
    objective staying within tol of its optimum.
    """
    n, p = design.shape
    eye = sp.identity(n, format="csc")
    ones = np.ones((n, 1))
    zeros = sp.csc_matrix((n, n))
    a_up = sp.hstack([sp.csc_matrix(design), sp.csc_matrix(ones), -eye, zeros])
    a_lo = sp.hstack([sp.csc_matrix(-design), sp.csc_matrix(ones), zeros, -eye])
    blocks = [sp.vstack([a_up, a_lo], format="csc")]
    b_ub = np.concatenate([u, -l])
    n_var = p + 1 + 2 * n
    cost = np.concatenate([np.zeros(p), [-1.0], np.full(2 * n, penalty)])
    if min_norm:
        # aux_j >= |w_j|; minimize sum(aux) among near-optimal solutions
        aux = sp.vstack([
            sp.hstack([sp.identity(p), sp.csc_matrix((p, n_var - p))]),
            sp.hstack([-sp.identity(p), sp.csc_matrix((p, n_var - p))]),
        ])
        blocks = [sp.bmat([
            [blocks[0], None],
            [aux, sp.vstack([-sp.identity(p), -sp.identity(p)], format="csc")],
            [sp.csc_matrix(cost.reshape(1, -1)), None],
        ])]
        b_ub = np.concatenate([b_ub, np.zeros(2 * p), [extra_ub]])
        cost = np.concatenate([np.zeros(n_var), np.ones(p)])
        n_var += p
    bounds = [(None, None)] * p + [(0.0, None)] * (n_var - p)
    res = linprog(
        cost,
        A_ub=blocks[0].tocsc(),
        b_ub=b_ub,
        bounds=bounds,
        method="highs",
        options={
            "primal_feasibility_tolerance": max(tol, 1e-12),
            "dual_feasibility_tolerance": max(tol, 1e-12),
        },
    )
    return res


def fit_band_margin(data: BandDataset, cfg: FitConfig) -> ClockEstimate:
    """Max-margin polynomial separation of the upper and lower band sets.

    Maximizes the margin m subject to upper_i >= q(tau_i) + m and
    lower_i <= q(tau_i) - m with hinge penalties; on separable data the
    fitted q lies strictly inside the band and m is the half band width.
    Degenerate optima (fewer active points than coefficients) are broken
    by the minimum-norm solution in scaled coordinates.
    """
    order = cfg.model_order
    tau, c, h, y_center, y_scale = _scaling(data, order)
    g = (tau - c) / h
    design = np.vander(g, order + 1, increasing=True)
    u = (data.upper - y_center) / y_scale
    l = (data.lower - y_center) / y_scale

    per_point = cfg.margin_penalty / data.n
    res = _margin_lp(design, u, l, per_point, cfg.solver_tol)
    if res.status != 0:
        raise NonConvergence(f"margin LP failed: {res.message}")
    p = order + 1
    w, m = res.x[:p], res.x[p]

    # Unique optimum needs p+1 active constraints; otherwise tie-break.
    q_s = design @ w
    act = np.sum(np.abs(u - (q_s + m)) < 1e-8) + np.sum(np.abs(l - (q_s - m)) < 1e-8)
    if act < p + 1:
        res2 = _margin_lp(design, u, l, per_point, cfg.solver_tol,
                          extra_ub=res.fun + cfg.solver_tol, min_norm=True)
        if res2.status == 0:
            w, m = res2.x[:p], res2.x[p]
            q_s = design @ w

    theta, beta, alpha = _unscale(w, c, h, y_center, y_scale)
    r_u = (u - (q_s + m)) * y_scale
    r_l = ((q_s - m) - l) * y_scale
    resid = np.concatenate([r_u, r_l])
    return ClockEstimate(
        alpha_hat=alpha,
        beta_hat=beta,
        theta_hat=theta,
        d_hat=float(max(m, 0.0) * y_scale),
        n_used=data.n,
        n_filtered=0,
        residual_rms=float(np.sqrt(np.mean(resid**2))),
        window_start=data.window_start,
    )


def clean_band(data: BandDataset, estimate: ClockEstimate, cfg: FitConfig) -> BandDataset:
    """Drop physically impossible points relative to a fitted band.

    An upper point below the fitted upper envelope (or a lower point
    above the lower envelope) by more than clean_k_sigma * residual_rms
    marks its exchange as bad.  Idempotent on already-clean data.
    """
    tau = data.t - data.window_start
    q = estimate.predict(tau)
    atol = cfg.solver_tol * max(1.0, float(np.max(np.abs(data.upper)))) \
        + cfg.clean_k_sigma * estimate.residual_rms
    keep = (data.upper >= q + estimate.d_hat - atol) \
        & (data.lower <= q - estimate.d_hat + atol)
    if not np.any(keep):
        raise EmptyResult("cleaning removed every band point")
    if np.all(keep):
        return data
    return BandDataset(
        t=data.t[keep],
        upper=data.upper[keep],
        lower=data.lower[keep],
        window_start=data.window_start,
        window_end=data.window_end,
    )


def fit(data: BandDataset, cfg: FitConfig) -> ClockEstimate:
    """Margin fit with up to max_clean_rounds of physical cleaning.

    The first cleaning pass screens against the midpoint least-squares
    fit: the max-margin solution chases physically impossible points
    (an exchange can never beat the propagation delay), while the
    midpoint fit only shifts slightly, so it is the safer reference for
    spotting them.  On clean data both passes are no-ops and the result
    equals a single fit_band_margin call.
    """
    current = clean_band(data, fit_midpoint_ls(data, cfg.model_order), cfg)
    est = fit_band_margin(current, cfg)
    for _ in range(cfg.max_clean_rounds):
        cleaned = clean_band(current, est, cfg)
        if cleaned.n == current.n:
            break
        current = cleaned
        est = fit_band_margin(current, cfg)
    return replace(est, n_used=current.n, n_filtered=data.n - current.n)
