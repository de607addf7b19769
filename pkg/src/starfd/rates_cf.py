"""Closed-form ergodic rates and their deterministic moment terms.

The closed forms move the expectation inside the logarithm (a Jensen-style
approximation), so every rate reduces to ratios of deterministic moments:
disk path-loss expectations from :mod:`starfd.geometry`, Rician mixing
coefficients from the per-link K-factors, and squared LoS cascade
magnitudes of the current surface state.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from functools import lru_cache
from typing import Dict, Optional, Tuple

import numpy as np

from .channel import StarRisState, _los_vectors, star_cascade
from .config import SystemConfig
from .geometry import (exp_pathloss_center_disk, exp_pathloss_edge_disk,
                       exp_pathloss_fixed_point_to_disk,
                       exp_pathloss_two_random_points, pathloss)
from .rates_mc import PowerConfig, RateReport

__all__ = [
    "CfSwitches",
    "MomentSet",
    "CfRateInputs",
    "compute_moments",
    "cf_rate_inputs",
    "cf_rate_dl_center",
    "cf_rate_dl_edge",
    "cf_rate_ul_center",
    "cf_rate_ul_edge",
    "cf_rate_strong_decodes_weak",
    "cf_rates",
    "cf_rates_simplified",
    "cf_rates_bidirectional",
    "cf_sinrs",
    "oma_sinrs",
]

# Which surface side and Rician-factor pair feeds each LoS cascade term.
# Entries are (side, out-link, in-link); the BS self-cascade (index 9) is
# handled separately.
_XI_TABLE = {
    1: ("t", "u1d", "br"),
    2: ("t", "u1d", "u1u"),
    3: ("t", "u1d", "u2u"),
    4: ("r", "u2d", "br"),
    5: ("r", "u2d", "u1u"),
    6: ("r", "u2d", "u2u"),
    7: ("t", "br", "u1u"),
    8: ("t", "br", "u2u"),
}


@dataclass(frozen=True)
class CfSwitches:
    """Term switches connecting the full rate expressions to the short forms.

    Each flag keeps (True) or drops (False) one term that the simplified
    expressions omit: the surface boost on the center user's desired DL
    signal, the surface path inside the center-pair uplink interference,
    the surface boost on the center uplink signal at the BS, and the BS
    loop-back self-cascade.
    """

    ris_path_to_center_signal: bool = True
    center_pair_ris_interference: bool = True
    ris_path_to_bs_signal: bool = True
    bs_loopback: bool = True


SIMPLIFIED = CfSwitches(False, False, False, False)


@dataclass(frozen=True)
class MomentSet:
    """Deterministic expectation terms shared by all closed-form rates."""

    upsilon: float
    rho_2pt: float
    q_center: float
    q_edge: float
    l_br: float
    varpi: Dict[int, float]
    varpi_hat: Dict[int, float]
    xi: Dict[int, float]
    zeta: complex
    sum_rho_sq: Dict[str, float]
    cross_phase: Dict[str, complex]


@dataclass(frozen=True)
class CfRateInputs:
    """The x1 (signal), y1/y2 (interference) moments of one user's rate."""

    x1: float
    y1: float
    y2: float

    def __post_init__(self) -> None:
        for name in ("x1", "y1", "y2"):
            if getattr(self, name) < 0:
                raise ValueError(f"{name} must be non-negative")


@lru_cache(maxsize=128)
def _geometry_expectations(R: float, R_r: float, d_br: float,
                           m: float) -> Tuple[float, float, float, float,
                                              float]:
    """(q_center, q_edge, upsilon, rho_2pt, l_br), cached per geometry."""
    return (exp_pathloss_center_disk(R, m),
            exp_pathloss_edge_disk(R_r, m),
            exp_pathloss_fixed_point_to_disk(d_br - R, R, m),
            exp_pathloss_two_random_points(R, m),
            pathloss(d_br, m))


def compute_moments(config: SystemConfig, ris: StarRisState) -> MomentSet:
    """Evaluate every deterministic moment for one (scenario, surface) pair.

    Geometry expectations are position averages and depend only on the
    cell layout; the xi terms are squared magnitudes of the LoS steering
    cascades under the current amplitudes and phases.
    """
    geom = config.geometry
    q_center, q_edge, upsilon, rho_2pt, l_br = _geometry_expectations(
        geom.R, geom.R_r, geom.d_br, geom.m)

    los = _los_vectors(config.n_elements, config.angles)
    sum_rho_sq = {"t": float(np.sum(ris.rho_t ** 2)),
                  "r": float(np.sum(ris.rho_r ** 2))}
    s_side = {"t": complex(np.sum(ris.side("t"))),
              "r": complex(np.sum(ris.side("r")))}
    cross_phase = {k: s_side[k] * s_side[k].conjugate() - sum_rho_sq[k]
                   for k in ("t", "r")}

    varpi, varpi_hat, xi = {}, {}, {}
    for i, (side, out, inp) in _XI_TABLE.items():
        k_in = config.kappa(inp)
        k_out = config.kappa(out)
        denom = (k_in + 1.0) * (k_out + 1.0)
        varpi[i] = k_in * k_out / denom
        varpi_hat[i] = sum_rho_sq[side] * (k_in + k_out + 1.0) / denom
        xi[i] = abs(star_cascade(los[out], ris, side, los[inp])) ** 2

    # BS loop-back: the return leg is the conjugate of the outgoing one,
    # so the LoS cascade collapses to the plain coefficient sum.
    zeta = complex(np.sum(ris.side("t") * los["br"] * np.conj(los["br"])))
    xi[9] = abs(zeta) ** 2

    return MomentSet(upsilon=upsilon, rho_2pt=rho_2pt, q_center=q_center,
                     q_edge=q_edge, l_br=l_br, varpi=varpi,
                     varpi_hat=varpi_hat, xi=xi, zeta=zeta,
                     sum_rho_sq=sum_rho_sq, cross_phase=cross_phase)


def _mix(moments: MomentSet, i: int) -> float:
    """The Rician second moment varpi_i * xi_i + varpi_hat_i."""
    return moments.varpi[i] * moments.xi[i] + moments.varpi_hat[i]


def _loopback_moment(config: SystemConfig, moments: MomentSet) -> float:
    """Second moment of the BS self-cascade (real by construction)."""
    kappa = config.kappa("br")
    a = kappa / (kappa + 1.0)
    b = 1.0 / (kappa + 1.0)
    s = moments.zeta  # LoS loop-back sum, equal to sum rho_t e^{j phi_t}
    assembled = (a * a * moments.xi[9]
                 + 2.0 * a * b * moments.sum_rho_sq["t"]
                 + b * b * (2.0 * moments.sum_rho_sq["t"]
                            + moments.cross_phase["t"])
                 + a * b * (moments.zeta * s.conjugate()
                            + moments.zeta.conjugate() * s))
    value = assembled.real
    if abs(assembled.imag) > 1e-9 * max(abs(value), 1e-300):
        raise ArithmeticError(
            "loop-back moment has a non-negligible imaginary residue "
            f"({assembled.imag:.3e}); the assembly must be real")
    return value


def cf_rate_inputs(config: SystemConfig, ris: StarRisState,
                   switches: Optional[CfSwitches] = None,
                   moments: Optional[MomentSet] = None
                   ) -> Dict[str, CfRateInputs]:
    """Assemble the x1/y1/y2 moment triples for all four users."""
    sw = switches or CfSwitches()
    mo = moments or compute_moments(config, ris)

    x1_u1d = mo.q_center
    if sw.ris_path_to_center_signal:
        x1_u1d += mo.l_br * mo.upsilon * _mix(mo, 1)
    y1_u1d = mo.rho_2pt
    if sw.center_pair_ris_interference:
        y1_u1d += mo.upsilon ** 2 * _mix(mo, 2)
    y2_u1d = mo.q_edge * mo.upsilon * _mix(mo, 3)

    x1_u2d = mo.l_br * mo.q_edge * _mix(mo, 4)
    y1_u2d = mo.q_edge * mo.upsilon * _mix(mo, 5)
    y2_u2d = mo.q_edge ** 2 * _mix(mo, 6)

    x1_u1u = mo.q_center
    if sw.ris_path_to_bs_signal:
        x1_u1u += mo.l_br * mo.upsilon * _mix(mo, 7)
    y1_u1u = mo.l_br * mo.q_edge * _mix(mo, 8)
    y2_u1u = (mo.l_br ** 2 * _loopback_moment(config, mo)
              if sw.bs_loopback else 0.0)

    return {
        "u1d": CfRateInputs(x1=x1_u1d, y1=y1_u1d, y2=y2_u1d),
        "u2d": CfRateInputs(x1=x1_u2d, y1=y1_u2d, y2=y2_u2d),
        "u1u": CfRateInputs(x1=x1_u1u, y1=y1_u1u, y2=y2_u1u),
        # The edge uplink reuses the center uplink's terms with the
        # signal/interference roles swapped; these are exact identities.
        "u2u": CfRateInputs(x1=y1_u1u, y1=x1_u1u, y2=y2_u1u),
    }


def _sinrs_from_inputs(inputs: Dict[str, CfRateInputs], pw: PowerConfig,
                       sigma_sq: float,
                       sigma_b_sq: float) -> Dict[str, float]:
    u1d, u2d = inputs["u1d"], inputs["u2d"]
    u1u, u2u = inputs["u1u"], inputs["u2u"]
    v = pw.V
    return {
        "u1d": pw.p_b1 * u1d.x1 / (pw.Xi * pw.p_b2 * u1d.x1
                                   + pw.p_u1u * u1d.y1
                                   + pw.p_u2u * u1d.y2 + sigma_sq),
        "u2d": pw.p_b2 * u2d.x1 / (pw.p_b1 * u2d.x1
                                   + pw.p_u1u * u2d.y1
                                   + pw.p_u2u * u2d.y2 + sigma_sq),
        "u1u": pw.p_u1u * u1u.x1 / (pw.p_u2u * u1u.y1 + pw.P_b * u1u.y2
                                    + v + sigma_b_sq),
        "u2u": pw.p_u2u * u2u.x1 / (pw.Xi * pw.p_u1u * u2u.y1
                                    + pw.P_b * u2u.y2 + v + sigma_b_sq),
    }


def cf_sinrs(config: SystemConfig, ris: StarRisState, pw: PowerConfig,
             switches: Optional[CfSwitches] = None) -> Dict[str, float]:
    """Closed-form (moment-ratio) SINRs of the four users."""
    inputs = cf_rate_inputs(config, ris, switches)
    return _sinrs_from_inputs(inputs, pw, config.sigma_sq,
                              config.sigma_b_sq)


def oma_sinrs(config: SystemConfig, ris: StarRisState,
              pw: PowerConfig) -> Dict[str, float]:
    """Orthogonal-access reference SINRs for the NOMA-benefit check.

    Convention: each user is served without its intra-pair partner — the
    DL user gets the whole BS power with no SIC residual, the UL user
    keeps its own power without the partner's interference. Cross-pair
    (full-duplex) interference and the SI variance are unchanged.
    """
    inputs = cf_rate_inputs(config, ris)
    u1d, u2d = inputs["u1d"], inputs["u2d"]
    u1u, u2u = inputs["u1u"], inputs["u2u"]
    v = pw.V
    return {
        "u1d": pw.P_b * u1d.x1 / (pw.p_u1u * u1d.y1 + pw.p_u2u * u1d.y2
                                  + config.sigma_sq),
        "u2d": pw.P_b * u2d.x1 / (pw.p_u1u * u2d.y1 + pw.p_u2u * u2d.y2
                                  + config.sigma_sq),
        "u1u": pw.p_u1u * u1u.x1 / (pw.P_b * u1u.y2 + v
                                    + config.sigma_b_sq),
        "u2u": pw.p_u2u * u2u.x1 / (pw.P_b * u2u.y2 + v
                                    + config.sigma_b_sq),
    }


def cf_rate_dl_center(config: SystemConfig, ris: StarRisState,
                      pw: PowerConfig,
                      switches: Optional[CfSwitches] = None) -> float:
    """Ergodic DL rate of the cell-center user."""
    return math.log2(1.0 + cf_sinrs(config, ris, pw, switches)["u1d"])


def cf_rate_dl_edge(config: SystemConfig, ris: StarRisState,
                    pw: PowerConfig,
                    switches: Optional[CfSwitches] = None) -> float:
    """Ergodic DL rate of the cell-edge user."""
    return math.log2(1.0 + cf_sinrs(config, ris, pw, switches)["u2d"])


def cf_rate_ul_center(config: SystemConfig, ris: StarRisState,
                      pw: PowerConfig,
                      switches: Optional[CfSwitches] = None) -> float:
    """Ergodic UL rate of the cell-center user at the FD BS."""
    return math.log2(1.0 + cf_sinrs(config, ris, pw, switches)["u1u"])


def cf_rate_ul_edge(config: SystemConfig, ris: StarRisState,
                    pw: PowerConfig,
                    switches: Optional[CfSwitches] = None) -> float:
    """Ergodic UL rate of the cell-edge user after imperfect SIC."""
    return math.log2(1.0 + cf_sinrs(config, ris, pw, switches)["u2u"])


def cf_rate_strong_decodes_weak(config: SystemConfig, ris: StarRisState,
                                pw: PowerConfig,
                                switches: Optional[CfSwitches] = None
                                ) -> float:
    """Ergodic rate at which the center user decodes the edge DL signal."""
    u1d = cf_rate_inputs(config, ris, switches)["u1d"]
    sinr = (pw.p_b2 * u1d.x1
            / (pw.p_b1 * u1d.x1 + pw.p_u1u * u1d.y1 + pw.p_u2u * u1d.y2
               + config.sigma_sq))
    return math.log2(1.0 + sinr)


def cf_rates(config: SystemConfig, ris: StarRisState, pw: PowerConfig,
             switches: Optional[CfSwitches] = None) -> RateReport:
    """All four closed-form rates plus the weighted sum."""
    sinrs = cf_sinrs(config, ris, pw, switches)
    rates = {u: math.log2(1.0 + g) for u, g in sinrs.items()}
    return RateReport.noma(rates, config.weights, estimator="cf")


def cf_rates_simplified(config: SystemConfig, ris: StarRisState,
                        pw: PowerConfig) -> RateReport:
    """The short-form rates: perfect SIC and SI cancellation, no surface
    boost on center-user signals, no BS loop-back.

    Assembled directly from the short expressions (not by switching
    terms off in the full ones), so the equivalence between the two
    routes is a checkable identity.
    """
    mo = compute_moments(config, ris)
    sigma_sq, sigma_b_sq = config.sigma_sq, config.sigma_b_sq

    sinr_u1d = (pw.p_b1 * mo.q_center
                / (pw.p_u1u * mo.rho_2pt
                   + pw.p_u2u * mo.q_edge * mo.upsilon * _mix(mo, 3)
                   + sigma_sq))
    x1_u2d = mo.l_br * mo.q_edge * _mix(mo, 4)
    sinr_u2d = (pw.p_b2 * x1_u2d
                / (pw.p_b1 * x1_u2d
                   + pw.p_u1u * mo.q_edge * mo.upsilon * _mix(mo, 5)
                   + pw.p_u2u * mo.q_edge ** 2 * _mix(mo, 6) + sigma_sq))
    edge_ul = mo.l_br * mo.q_edge * _mix(mo, 8)
    sinr_u1u = pw.p_u1u * mo.q_center / (pw.p_u2u * edge_ul + sigma_b_sq)
    sinr_u2u = pw.p_u2u * edge_ul / sigma_b_sq

    rates = {u: math.log2(1.0 + g)
             for u, g in (("u1d", sinr_u1d), ("u2d", sinr_u2d),
                          ("u1u", sinr_u1u), ("u2u", sinr_u2u))}
    return RateReport.noma(rates, config.weights, estimator="cf")


def cf_rates_bidirectional(config: SystemConfig, ris: StarRisState,
                           pw: PowerConfig) -> Tuple[float, float]:
    """Closed-form end-to-end rates (R_c, R_e) of the relayed connections.

    Each connection rate is min(BS decode leg, ratio-combined reception
    leg), with both legs evaluated as ergodic closed forms.
    """
    inputs = cf_rate_inputs(config, ris)
    sinrs = _sinrs_from_inputs(inputs, pw, config.sigma_sq,
                               config.sigma_b_sq)
    u1d, u2d = inputs["u1d"], inputs["u2d"]
    sigma_sq = config.sigma_sq

    r_uc = math.log2(
        1.0
        + pw.p_u2u * u1d.y2 / (pw.p_u1u * u1d.y1 + sigma_sq)
        + pw.p_b1 * u1d.x1 / (pw.Xi * pw.p_b2 * u1d.x1
                              + pw.p_u1u * u1d.y1 + sigma_sq))
    r_ue = math.log2(
        1.0
        + pw.p_u1u * u2d.y1 / (pw.p_u2u * u2d.y2 + sigma_sq)
        + pw.p_b2 * u2d.x1 / (pw.p_b1 * u2d.x1 + pw.p_u2u * u2d.y2
                              + sigma_sq))
    r_u1u = math.log2(1.0 + sinrs["u1u"])
    r_u2u = math.log2(1.0 + sinrs["u2u"])
    return min(r_u2u, r_uc), min(r_u1u, r_ue)


def cf_report_bidirectional(config: SystemConfig, ris: StarRisState,
                            pw: PowerConfig) -> RateReport:
    r_c, r_e = cf_rates_bidirectional(config, ris, pw)
    return RateReport.bidirectional(r_c, r_e, estimator="cf")
