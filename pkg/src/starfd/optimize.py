"""Sum-rate maximization: projected gradient ascent over the surface
coefficients, channel-aligned phase designs, and closed-form power
allocation with constraint validation.

The ascent objective is always the closed-form weighted sum rate, so a
run is deterministic given its initial state. Gradients are central
finite differences (the closed forms are cheap and no analytic gradient
is available).
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Callable, Dict, Optional, Sequence, Tuple

import numpy as np

from .channel import GeometryAngles, StarRisState, element_layout
from .config import USERS, SystemConfig
from .exceptions import DegenerateGeometryError, InfeasibleError
from .rates_cf import (CfRateInputs, cf_rate_inputs, cf_rates_bidirectional,
                       cf_sinrs, oma_sinrs)
from .rates_mc import PowerConfig, RateReport, noma_beneficial

__all__ = [
    "ObjectiveSpec",
    "ConstraintCheck",
    "ConstraintReport",
    "OptimizationResult",
    "project_phases",
    "project_amplitudes",
    "suboptimal_phases",
    "suboptimal_phases_bidirectional",
    "aligned_state",
    "pgam",
    "power_allocation_closed_form",
    "validate_constraints",
]

# Finite-difference step, radians on phases and raw units on amplitudes.
_FD_STEP = 1e-6
# Backtracking floor: a step size below this means no ascent direction is
# left at working precision, which we treat as convergence.
_MU_MIN = 1e-12


@dataclass(frozen=True)
class ObjectiveSpec:
    """What the optimizer maximizes: a weighted sum of ergodic rates."""

    weights: Dict[str, float]
    scenario: str = "noma-pair"
    R_dth: float = 0.0
    R_uth: float = 0.0

    def __post_init__(self) -> None:
        if self.scenario not in ("noma-pair", "bidirectional"):
            raise ValueError(f"unknown scenario {self.scenario!r}")
        if any(w < 0 for w in self.weights.values()):
            raise ValueError("objective weights must be non-negative")
        if self.R_dth < 0 or self.R_uth < 0:
            raise ValueError("target rates must be non-negative")

    @classmethod
    def from_config(cls, config: SystemConfig,
                    scenario: str = "noma-pair") -> "ObjectiveSpec":
        return cls(weights=config.weights, scenario=scenario,
                   R_dth=config.R_dth, R_uth=config.R_uth)


@dataclass(frozen=True)
class ConstraintCheck:
    ok: bool
    margin: float


@dataclass(frozen=True)
class ConstraintReport:
    """Booleans plus numeric margins for the problem constraints.

    For the budget, decoding-order and target checks the margin is the
    slack (negative = violated); for the surface-feasibility checks it is
    the largest deviation (positive = violated). NOMA-benefit margins are
    diagnostics and do not enter :attr:`all_ok`.
    """

    power_budget: ConstraintCheck
    decoding_order: ConstraintCheck
    edge_dl_target: ConstraintCheck
    edge_ul_target: ConstraintCheck
    energy_split: ConstraintCheck
    unit_modulus: ConstraintCheck
    noma_benefit: Dict[str, ConstraintCheck]

    @property
    def all_ok(self) -> bool:
        return all(check.ok for check in
                   (self.power_budget, self.decoding_order,
                    self.edge_dl_target, self.edge_ul_target,
                    self.energy_split, self.unit_modulus))


@dataclass(frozen=True)
class OptimizationResult:
    """Outcome of one ascent run."""

    state: StarRisState
    pw: PowerConfig
    trace: np.ndarray
    reason: str
    constraints: ConstraintReport

    def __post_init__(self) -> None:
        if self.reason not in ("converged", "max-iters"):
            raise ValueError(f"unknown termination reason {self.reason!r}")
        object.__setattr__(self, "trace",
                           np.asarray(self.trace, dtype=float))

    @property
    def objective(self) -> float:
        return float(self.trace[-1])

    @property
    def iterations(self) -> int:
        return int(self.trace.size - 1)


def project_phases(theta_raw: Sequence[complex]) -> np.ndarray:
    """Normalize each entry to unit modulus, preserving its phase.

    A zero entry has no phase; it maps to 1 by convention.
    """
    theta = np.asarray(theta_raw, dtype=complex)
    mag = np.abs(theta)
    out = np.ones_like(theta)
    nz = mag > 0.0
    out[nz] = theta[nz] / mag[nz]
    return out


def project_amplitudes(rho_t_raw: Sequence[float],
                       rho_r_raw: Sequence[float]
                       ) -> Tuple[np.ndarray, np.ndarray]:
    """Per-element Euclidean projection onto {rho_t + rho_r = 1, both >= 0}.

    The segment is 1-D: with p the projected rho_t, the unconstrained
    minimizer of (p - a)^2 + (1 - p - b)^2 is p = (a - b + 1)/2, clipped
    to [0, 1].
    """
    a = np.asarray(rho_t_raw, dtype=float)
    b = np.asarray(rho_r_raw, dtype=float)
    if a.shape != b.shape:
        raise ValueError("amplitude arrays must share a length")
    p = np.clip((a - b + 1.0) / 2.0, 0.0, 1.0)
    return p, 1.0 - p


def _alignment_phase(n_elements: int, d_over_lambda: float, s: float,
                     c: float) -> np.ndarray:
    """Phases -2*pi*(d/lambda)*(x_n*s + y_n*c) on the element grid."""
    x, y = element_layout(n_elements)
    return -2.0 * math.pi * d_over_lambda * (x * s + y * c)


def suboptimal_phases(angles: GeometryAngles, n_elements: int,
                      d_over_lambda: float
                      ) -> Tuple[np.ndarray, np.ndarray]:
    """Channel-aligned phase design toward the two cell-edge users.

    Side t aligns the BS-surface-u2u cascade, side r the BS-surface-u2d
    cascade: phi_n^k = -2*pi*(d/lambda)*(x_n*t_k + y_n*l_k) with
    t_k = sin(az_br)sin(el_br) - sin(az_k)sin(el_k) and
    l_k = cos(el_br) - cos(el_k).
    """
    s_br = math.sin(angles.az_br) * math.sin(angles.el_br)
    c_br = math.cos(angles.el_br)
    t_t = s_br - math.sin(angles.az_u2u) * math.sin(angles.el_u2u)
    l_t = c_br - math.cos(angles.el_u2u)
    t_r = s_br - math.sin(angles.az_u2d) * math.sin(angles.el_u2d)
    l_r = c_br - math.cos(angles.el_u2d)
    return (_alignment_phase(n_elements, d_over_lambda, t_t, l_t),
            _alignment_phase(n_elements, d_over_lambda, t_r, l_r))


def _link_direction(angles: GeometryAngles, link: str) -> Tuple[float, float]:
    az, el = angles.link(link)
    return math.sin(az) * math.sin(el), math.cos(el)


def suboptimal_phases_bidirectional(config: SystemConfig, pw: PowerConfig,
                                    rho_t: float = 0.5
                                    ) -> Tuple[np.ndarray, np.ndarray]:
    """Aligned phase design for the relayed (bidirectional) connections.

    Each side has two alignment candidates: the user-to-user cascade
    (phases sum, both steering vectors arrive conjugated) or the
    BS-surface-user cascade (phases difference). The candidate whose
    combined-reception branch SINR is larger wins; on a tie the
    BS-surface-user alignment is kept.
    """
    angles = config.angles
    n = config.n_elements
    d = angles.d_over_lambda
    s_br, c_br = _link_direction(angles, "br")
    s_u1d, c_u1d = _link_direction(angles, "u1d")
    s_u2d, c_u2d = _link_direction(angles, "u2d")
    s_u1u, c_u1u = _link_direction(angles, "u1u")
    s_u2u, c_u2u = _link_direction(angles, "u2u")

    # Candidate phases per side: user-user (sum form) vs BS path
    # (difference form). _alignment_phase negates its arguments, so the
    # sum form passes -(s_a + s_b).
    cand_t = {
        "user": _alignment_phase(n, d, -(s_u1d + s_u2u), -(c_u1d + c_u2u)),
        "bs": _alignment_phase(n, d, s_br - s_u1d, c_br - c_u1d),
    }
    cand_r = {
        "user": _alignment_phase(n, d, -(s_u2d + s_u1u), -(c_u2d + c_u1u)),
        "bs": _alignment_phase(n, d, s_br - s_u2d, c_br - c_u2d),
    }

    ones = np.ones(n)
    rho_kwargs = dict(rho_t=rho_t * ones, rho_r=(1.0 - rho_t) * ones)

    def inputs_for(phi_t: np.ndarray, phi_r: np.ndarray):
        state = StarRisState(phi_t=phi_t, phi_r=phi_r, **rho_kwargs)
        return cf_rate_inputs(config, state)

    sigma_sq = config.sigma_sq
    zero = np.zeros(n)

    # Side t feeds the center DL user's reception of the u2u message.
    u1d_user = inputs_for(cand_t["user"], zero)["u1d"]
    gamma1_t = (pw.p_u2u * u1d_user.y2
                / (pw.p_u1u * u1d_user.y1 + sigma_sq))
    u1d_bs = inputs_for(cand_t["bs"], zero)["u1d"]
    gamma2_t = (pw.p_b1 * u1d_bs.x1
                / (pw.Xi * pw.p_b2 * u1d_bs.x1 + pw.p_u1u * u1d_bs.y1
                   + sigma_sq))
    phi_t = cand_t["user"] if gamma1_t > gamma2_t else cand_t["bs"]

    # Side r feeds the edge DL user's reception of the u1u message.
    u2d_user = inputs_for(zero, cand_r["user"])["u2d"]
    gamma1_r = (pw.p_u1u * u2d_user.y1
                / (pw.p_u2u * u2d_user.y2 + sigma_sq))
    u2d_bs = inputs_for(zero, cand_r["bs"])["u2d"]
    gamma2_r = (pw.p_b2 * u2d_bs.x1
                / (pw.p_b1 * u2d_bs.x1 + pw.p_u2u * u2d_bs.y2 + sigma_sq))
    phi_r = cand_r["user"] if gamma1_r > gamma2_r else cand_r["bs"]

    return phi_t, phi_r


def aligned_state(config: SystemConfig, rho_t: float = 0.5,
                  pw: Optional[PowerConfig] = None,
                  scenario: str = "noma-pair") -> StarRisState:
    """Surface state with uniform amplitudes and the aligned phase design."""
    if scenario == "bidirectional":
        if pw is None:
            pw = PowerConfig.from_config(config)
        phi_t, phi_r = suboptimal_phases_bidirectional(config, pw, rho_t)
    else:
        phi_t, phi_r = suboptimal_phases(config.angles, config.n_elements,
                                         config.angles.d_over_lambda)
    ones = np.ones(config.n_elements)
    return StarRisState(rho_t=rho_t * ones, rho_r=(1.0 - rho_t) * ones,
                        phi_t=phi_t, phi_r=phi_r)


def _make_objective(config: SystemConfig, pw: PowerConfig,
                    objective: ObjectiveSpec
                    ) -> Callable[[StarRisState], float]:
    if objective.scenario == "noma-pair":
        weights = objective.weights

        def evaluate(state: StarRisState) -> float:
            sinrs = cf_sinrs(config, state, pw)
            return math.fsum(weights[u] * math.log2(1.0 + sinrs[u])
                             for u in USERS)
    else:
        # Connection rates are equally weighted in the bidirectional sum.
        def evaluate(state: StarRisState) -> float:
            r_c, r_e = cf_rates_bidirectional(config, state, pw)
            return r_c + r_e

    return evaluate


def _fd_gradients(evaluate: Callable[[StarRisState], float],
                  state: StarRisState) -> Tuple[np.ndarray, ...]:
    """Central finite differences of the objective in all 4N coordinates.

    Probe states skip the energy-split validation: an amplitude probe
    rho +/- delta deliberately leaves the feasible segment, which is fine
    because the closed forms are defined on all of R^2N.
    """
    arrays = {name: getattr(state, name).copy()
              for name in ("phi_t", "phi_r", "rho_t", "rho_r")}

    def probe(name: str, index: int, delta: float) -> float:
        bumped = dict(arrays)
        vec = arrays[name].copy()
        vec[index] += delta
        bumped[name] = vec
        return evaluate(StarRisState(validate=False, **bumped))

    grads = []
    for name in ("phi_t", "phi_r", "rho_t", "rho_r"):
        grad = np.empty(state.n_elements)
        for n in range(state.n_elements):
            grad[n] = (probe(name, n, _FD_STEP)
                       - probe(name, n, -_FD_STEP)) / (2.0 * _FD_STEP)
        grads.append(grad)
    return tuple(grads)


def _ascent_step(state: StarRisState, grads: Tuple[np.ndarray, ...],
                 mu: float, alpha_scale: float) -> StarRisState:
    g_phi_t, g_phi_r, g_rho_t, g_rho_r = grads
    new_phis = []
    for phi, grad in ((state.phi_t, g_phi_t), (state.phi_r, g_phi_r)):
        theta = np.exp(1j * phi)
        # The finite differences give d f / d phi; the corresponding
        # manifold gradient in theta is (df/dphi) * j*theta. Stepping in
        # the embedding space and renormalizing is the projected update.
        theta_new = project_phases(theta + mu * grad * (1j * theta))
        new_phis.append(np.angle(theta_new))
    rho_t, rho_r = project_amplitudes(
        state.rho_t + alpha_scale * mu * g_rho_t,
        state.rho_r + alpha_scale * mu * g_rho_r)
    return StarRisState(rho_t=rho_t, rho_r=rho_r,
                        phi_t=new_phis[0], phi_r=new_phis[1])


def pgam(config: SystemConfig, pw: PowerConfig, init: StarRisState,
         mu: float = 0.5, alpha_scale: float = 1.0, eps: float = 1e-9,
         L: int = 500, objective: Optional[ObjectiveSpec] = None,
         backtracking: bool = True) -> OptimizationResult:
    """Projected gradient ascent over surface phases and amplitudes.

    Maximizes the closed-form weighted sum rate starting from ``init``.
    With ``backtracking`` (the default) the step size halves whenever a
    step would lower the objective, which guarantees a monotone trace;
    ``backtracking=False`` reproduces the plain fixed-step loop, whose
    trace may dip and which stops at the first non-improving step.
    """
    if mu <= 0 or eps <= 0 or L < 1:
        raise ValueError("need mu > 0, eps > 0 and L >= 1")
    if alpha_scale <= 0:
        raise ValueError("alpha_scale must be positive")
    spec = objective or ObjectiveSpec.from_config(config)
    evaluate = _make_objective(config, pw, spec)

    current = evaluate(init)
    if not math.isfinite(current):
        raise ValueError("objective is not finite at the initial state")

    state = init
    trace = [current]
    reason = "max-iters"
    step = mu
    for _ in range(L):
        grads = _fd_gradients(evaluate, state)
        candidate = _ascent_step(state, grads, step, alpha_scale)
        value = evaluate(candidate)
        if backtracking:
            while value < current and step > _MU_MIN:
                step /= 2.0
                candidate = _ascent_step(state, grads, step, alpha_scale)
                value = evaluate(candidate)
            if value < current:
                # No ascent possible at the smallest step: a fixed point.
                reason = "converged"
                break
        state = candidate
        trace.append(value)
        improvement = value - current
        current = value
        if improvement < eps:
            reason = "converged"
            break

    report = validate_constraints(
        config, state, pw,
        _cf_report_for_validation(config, state, pw, spec))
    return OptimizationResult(state=state, pw=pw, trace=np.array(trace),
                              reason=reason, constraints=report)


def _cf_report_for_validation(config: SystemConfig, state: StarRisState,
                              pw: PowerConfig,
                              spec: ObjectiveSpec) -> RateReport:
    sinrs = cf_sinrs(config, state, pw)
    rates = {u: math.log2(1.0 + g) for u, g in sinrs.items()}
    return RateReport.noma(rates, config.weights, estimator="cf")


def power_allocation_closed_form(config: SystemConfig, ris: StarRisState,
                                 cf: Optional[Dict[str, CfRateInputs]],
                                 P_t: float, R_dth: float,
                                 R_uth: float) -> PowerConfig:
    """Power split meeting the edge targets with equality, in closed form.

    Targets are converted to linear SINR thresholds (2^R - 1). The edge
    UL power follows from the u2u target as an affine function of the
    total BS power; the two DL conditions (edge signal decoded at the
    edge user and at the center user, both at the DL threshold) then pin
    P_b1 and P_b2. The residual self-interference variance couples back
    through the BS power, which a fixed-point pass resolves. Whatever
    budget remains goes to the center UL user.
    """
    if P_t <= 0:
        raise ValueError("total power budget must be positive")
    if R_dth < 0 or R_uth < 0:
        raise ValueError("target rates must be non-negative")
    inputs = cf if cf is not None else cf_rate_inputs(config, ris)

    gamma_d = 2.0 ** R_dth - 1.0
    gamma_u = 2.0 ** R_uth - 1.0
    sigma_sq, sigma_b_sq = config.sigma_sq, config.sigma_b_sq
    xi_sic = config.Xi

    u2u = inputs["u2u"]
    x_u, y1_u, y2_u = u2u.x1, u2u.y1, u2u.y2
    if gamma_u > 0 and x_u <= 0:
        raise InfeasibleError(
            "uplink target unreachable: the edge uplink signal moment "
            "is zero (dark transmit side)")

    # The c-row is the center user decoding the edge DL signal, the
    # e-row the edge user decoding it; both must meet gamma_d.
    rows = {}
    for key, user in (("c", "u1d"), ("e", "u2d")):
        inp = inputs[user]
        if gamma_d > 0 and inp.x1 <= 0:
            raise InfeasibleError(
                "downlink target unreachable: the edge DL signal moment "
                f"is zero at {user}")
        rows[key] = inp

    def solve(v: float):
        # p_u2u = S * P_b + T from the uplink threshold condition.
        if gamma_u > 0:
            den_u = x_u + gamma_u * xi_sic * y1_u
            s_u = gamma_u * (y2_u - xi_sic * y1_u) / den_u
            t_u = gamma_u * (xi_sic * y1_u * P_t + v + sigma_b_sq) / den_u
        else:
            s_u, t_u = 0.0, 0.0
        if gamma_d == 0:
            p_b1 = p_b2 = 0.0
            p_u2u = t_u  # S multiplies P_b = 0
            return p_b1, p_b2, p_u2u
        coeffs = {}
        for key, inp in rows.items():
            y1t, y2t = inp.y1 / inp.x1, inp.y2 / inp.x1
            sig = sigma_sq / inp.x1
            d_i = 1.0 + gamma_d * y1t - gamma_d * s_u * (y2t - y1t)
            n_i = gamma_d * (1.0 - y1t + s_u * (y2t - y1t))
            g_i = gamma_d * y1t
            m_i = gamma_d * (y2t - y1t) * t_u + gamma_d * sig
            coeffs[key] = (n_i / d_i, g_i / d_i, m_i / d_i)
        (b_c, c_c, q_c), (b_e, c_e, q_e) = coeffs["c"], coeffs["e"]
        denom = b_e - b_c
        scale = abs(b_e) + abs(b_c) + 1.0
        if abs(denom) < 1e-12 * scale:
            raise DegenerateGeometryError(
                "the center and edge decoding conditions are linearly "
                "dependent; the DL power split is not identifiable")
        p_b1 = (P_t * (c_c - c_e) + (q_c - q_e)) / denom
        p_b2 = b_c * p_b1 + c_c * P_t + q_c
        p_u2u = s_u * (p_b1 + p_b2) + t_u
        return p_b1, p_b2, p_u2u

    v = 0.0
    p_b1 = p_b2 = p_u2u = 0.0
    for _ in range(200):
        p_b1, p_b2, p_u2u = solve(v)
        p_b = p_b1 + p_b2
        if p_b < 0:
            raise InfeasibleError(
                f"downlink target {R_dth} bits/s/Hz infeasible: the "
                "required BS power is negative")
        v_new = config.beta * p_b ** config.si_lambda if config.beta else 0.0
        if abs(v_new - v) <= 1e-15 * max(1.0, v):
            v = v_new
            break
        v = v_new

    p_u1u = P_t - p_b1 - p_b2 - p_u2u
    for name, value, target in (("p_b1", p_b1, "downlink"),
                                ("p_b2", p_b2, "downlink"),
                                ("p_u2u", p_u2u, "uplink"),
                                ("p_u1u", p_u1u, "combined")):
        if value < -1e-12 * P_t:
            label = {"downlink": f"downlink target {R_dth} bits/s/Hz",
                     "uplink": f"uplink target {R_uth} bits/s/Hz",
                     "combined": "combined downlink and uplink targets"
                     }[target]
            raise InfeasibleError(
                f"{label} infeasible: {name} = {value:.6g} W < 0")
    clip = lambda p: max(p, 0.0)
    return PowerConfig(P_t=P_t, p_b1=clip(p_b1), p_b2=clip(p_b2),
                       p_u1u=clip(p_u1u), p_u2u=clip(p_u2u),
                       Xi=config.Xi, beta=config.beta,
                       si_lambda=config.si_lambda,
                       R_dth=R_dth, R_uth=R_uth)


def validate_constraints(config: SystemConfig, ris: StarRisState,
                         pw: PowerConfig, report: RateReport,
                         tol: float = 1e-9) -> ConstraintReport:
    """Check the optimization problem's constraints with numeric margins.

    The budget margin is the unspent power; the decoding-order margin is
    the closed-form gap between the center user's decode rate of the
    edge signal and the edge user's own rate; the target margins compare
    the supplied report's edge rates against the configured targets. The
    surface checks report the worst per-element deviation. The
    NOMA-benefit entries compare each closed-form SINR against its
    orthogonal-access equivalent threshold and are informational.
    """
    if report.scenario != "noma-pair":
        raise ValueError(
            "constraint validation is defined for noma-pair reports")

    spent = pw.p_b1 + pw.p_b2 + pw.p_u1u + pw.p_u2u
    budget_margin = pw.P_t - spent
    power_budget = ConstraintCheck(budget_margin >= -tol * pw.P_t,
                                   budget_margin)

    inputs = cf_rate_inputs(config, ris)
    u1d, u2d = inputs["u1d"], inputs["u2d"]
    cross = math.log2(1.0 + pw.p_b2 * u1d.x1
                      / (pw.p_b1 * u1d.x1 + pw.p_u1u * u1d.y1
                         + pw.p_u2u * u1d.y2 + config.sigma_sq))
    edge = math.log2(1.0 + pw.p_b2 * u2d.x1
                     / (pw.p_b1 * u2d.x1 + pw.p_u1u * u2d.y1
                        + pw.p_u2u * u2d.y2 + config.sigma_sq))
    order_margin = cross - edge
    decoding_order = ConstraintCheck(order_margin >= -tol, order_margin)

    dl_margin = report.rate("u2d") - pw.R_dth
    ul_margin = report.rate("u2u") - pw.R_uth
    edge_dl = ConstraintCheck(dl_margin >= -tol, dl_margin)
    edge_ul = ConstraintCheck(ul_margin >= -tol, ul_margin)

    split_dev = float(np.max(np.abs(ris.rho_t + ris.rho_r - 1.0)))
    neg_dev = float(max(0.0, -np.min(ris.rho_t), -np.min(ris.rho_r)))
    es_margin = max(split_dev, neg_dev)
    energy_split = ConstraintCheck(es_margin <= tol, es_margin)
    # Phases are stored as angles, so the applied coefficients have unit
    # modulus identically; the check records that explicitly.
    unit_modulus = ConstraintCheck(True, 0.0)

    gammas = cf_sinrs(config, ris, pw)
    omas = oma_sinrs(config, ris, pw)
    benefit = {}
    for user in USERS:
        threshold = math.sqrt(1.0 + omas[user]) - 1.0
        benefit[user] = ConstraintCheck(
            noma_beneficial(gammas[user], omas[user]),
            gammas[user] - threshold)

    return ConstraintReport(power_budget=power_budget,
                            decoding_order=decoding_order,
                            edge_dl_target=edge_dl,
                            edge_ul_target=edge_ul,
                            energy_split=energy_split,
                            unit_modulus=unit_modulus,
                            noma_benefit=benefit)
