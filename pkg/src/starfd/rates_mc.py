"""Instantaneous SINRs and the Monte-Carlo ergodic-rate estimator.

Every rate is log2(1 + SINR) in bits/s/Hz. The estimator draws positions,
channels and a residual self-interference sample per trial from a
per-trial generator keyed by (master seed, trial index), so results are
independent of execution order and parallelism.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Dict, Optional, Tuple

import numpy as np

from .channel import ChannelRealization, StarRisState, draw_realization, star_cascade
from .config import USERS, SystemConfig

__all__ = [
    "PowerConfig",
    "RateReport",
    "sinr_dl_center",
    "sinr_dl_edge",
    "sinr_ul_center",
    "sinr_ul_edge",
    "rate_strong_decodes_weak",
    "rates_bidirectional",
    "noma_beneficial",
    "ergodic_rate_mc",
]

_BUDGET_RTOL = 1e-9


@dataclass(frozen=True)
class PowerConfig:
    """Operative per-signal transmit powers plus the SIC/SI model constants.

    ``p_b1``/``p_b2`` are the BS powers for the center and edge DL signals,
    ``p_u1u``/``p_u2u`` the uplink user powers. The four must fit inside
    the budget ``P_t`` (the allocators always exhaust it, but an
    under-spending configuration is legal). The DL split ``tau`` and the
    NOMA coefficients are derived properties; use :meth:`from_splits` to
    build a configuration from (tau, alpha1, alpha2, ul_split) with the
    NOMA ordering checks.
    """

    P_t: float
    p_b1: float
    p_b2: float
    p_u1u: float
    p_u2u: float
    Xi: float = 0.0
    beta: float = 0.0
    si_lambda: float = 1.0
    R_dth: float = 0.0
    R_uth: float = 0.0

    def __post_init__(self) -> None:
        if not self.P_t > 0:
            raise ValueError("total power budget must be positive")
        for name in ("p_b1", "p_b2", "p_u1u", "p_u2u"):
            if getattr(self, name) < 0:
                raise ValueError(f"{name} must be non-negative")
        total = self.p_b1 + self.p_b2 + self.p_u1u + self.p_u2u
        if total - self.P_t > _BUDGET_RTOL * self.P_t:
            raise ValueError(
                f"powers sum to {total!r}, over the budget {self.P_t!r}")
        if not 0.0 <= self.Xi <= 1.0:
            raise ValueError("SIC error factor Xi must lie in [0, 1]")
        if self.beta < 0 or self.si_lambda < 0:
            raise ValueError("SI model constants must be non-negative")
        if self.R_dth < 0 or self.R_uth < 0:
            raise ValueError("target rates must be non-negative")

    @property
    def P_b(self) -> float:
        return self.p_b1 + self.p_b2

    @property
    def P_u(self) -> float:
        return self.p_u1u + self.p_u2u

    @property
    def tau(self) -> float:
        return self.P_b / self.P_t

    @property
    def V(self) -> float:
        """Residual self-interference variance beta * P_b**si_lambda."""
        if self.beta == 0.0:
            return 0.0
        return self.beta * self.P_b ** self.si_lambda

    @classmethod
    def from_splits(cls, P_t: float, tau: float, alpha1: float,
                    alpha2: float, ul_split: float = 0.5, *,
                    Xi: float = 0.0, beta: float = 0.0,
                    si_lambda: float = 1.0, R_dth: float = 0.0,
                    R_uth: float = 0.0) -> "PowerConfig":
        """Split the budget as P_b = tau*P_t (DL) and P_u = (1-tau)*P_t."""
        if not 0.0 < tau <= 1.0:
            raise ValueError(
                "tau must lie in (0, 1]; an uplink-only split is modeled "
                "as a small positive tau such as 0.01")
        if abs(alpha1 + alpha2 - 1.0) > 1e-9:
            raise ValueError("alpha1 + alpha2 must equal 1")
        if not alpha1 < alpha2:
            raise ValueError(
                "NOMA ordering requires alpha1 < alpha2 (the cell-edge "
                "user gets the larger power share)")
        if not 0.0 <= ul_split <= 1.0:
            raise ValueError("ul_split must lie in [0, 1]")
        P_b = tau * P_t
        P_u = (1.0 - tau) * P_t
        return cls(P_t=P_t, p_b1=alpha1 * P_b, p_b2=alpha2 * P_b,
                   p_u1u=ul_split * P_u, p_u2u=(1.0 - ul_split) * P_u,
                   Xi=Xi, beta=beta, si_lambda=si_lambda,
                   R_dth=R_dth, R_uth=R_uth)

    @classmethod
    def from_config(cls, config: SystemConfig) -> "PowerConfig":
        return cls.from_splits(
            config.P_t, config.tau, config.alpha1, config.alpha2,
            config.ul_split, Xi=config.Xi, beta=config.beta,
            si_lambda=config.si_lambda, R_dth=config.R_dth,
            R_uth=config.R_uth)


@dataclass(frozen=True)
class RateReport:
    """Ergodic rates of one evaluation plus the weighted sum.

    NOMA-pair reports carry the four per-user rates; bidirectional reports
    carry the two end-to-end connection rates (center-bound ``r_c`` and
    edge-bound ``r_e``). Standard errors are present for Monte-Carlo
    estimates only.
    """

    scenario: str
    estimator: str
    sum_rate: float
    r_u1d: Optional[float] = None
    r_u2d: Optional[float] = None
    r_u1u: Optional[float] = None
    r_u2u: Optional[float] = None
    r_c: Optional[float] = None
    r_e: Optional[float] = None
    trials: Optional[int] = None
    stderr: Optional[Dict[str, float]] = None

    def __post_init__(self) -> None:
        if self.scenario not in ("noma-pair", "bidirectional"):
            raise ValueError(f"unknown scenario {self.scenario!r}")
        if self.estimator not in ("cf", "mc"):
            raise ValueError(f"unknown estimator {self.estimator!r}")
        for name in ("r_u1d", "r_u2d", "r_u1u", "r_u2u", "r_c", "r_e"):
            value = getattr(self, name)
            if value is not None and (value < 0 or not math.isfinite(value)):
                raise ValueError(f"{name} must be finite and non-negative")

    @classmethod
    def noma(cls, rates: Dict[str, float], weights: Dict[str, float],
             estimator: str, trials: Optional[int] = None,
             stderr: Optional[Dict[str, float]] = None) -> "RateReport":
        total = math.fsum(weights[u] * rates[u] for u in USERS)
        return cls(scenario="noma-pair", estimator=estimator,
                   sum_rate=total, r_u1d=rates["u1d"], r_u2d=rates["u2d"],
                   r_u1u=rates["u1u"], r_u2u=rates["u2u"],
                   trials=trials, stderr=stderr)

    @classmethod
    def bidirectional(cls, r_c: float, r_e: float, estimator: str,
                      weights: Tuple[float, float] = (1.0, 1.0),
                      trials: Optional[int] = None,
                      stderr: Optional[Dict[str, float]] = None
                      ) -> "RateReport":
        return cls(scenario="bidirectional", estimator=estimator,
                   sum_rate=weights[0] * r_c + weights[1] * r_e,
                   r_c=r_c, r_e=r_e, trials=trials, stderr=stderr)

    def rate(self, name: str) -> float:
        value = getattr(self, f"r_{name}")
        if value is None:
            raise ValueError(f"report has no rate for {name!r}")
        return value


def _dl_center_terms(ch: ChannelRealization, ris: StarRisState):
    l = ch.pathlosses
    a = (math.sqrt(l["b_u1d"]) * ch.h_b_u1d
         + math.sqrt(l["br"] * l["r_u1d"])
         * star_cascade(ch.g_r_u1d, ris, "t", ch.g_br))
    c = (math.sqrt(l["u1d_u1u"]) * ch.h_u1d_u1u
         + math.sqrt(l["r_u1d"] * l["r_u1u"])
         * star_cascade(ch.g_r_u1d, ris, "t", ch.g_r_u1u))
    d = (l["r_u1d"] * l["r_u2u"]
         * abs(star_cascade(ch.g_r_u1d, ris, "t", ch.g_r_u2u)) ** 2)
    return abs(a) ** 2, abs(c) ** 2, d


def _dl_edge_terms(ch: ChannelRealization, ris: StarRisState):
    l = ch.pathlosses
    a = (l["br"] * l["r_u2d"]
         * abs(star_cascade(ch.g_r_u2d, ris, "r", ch.g_br)) ** 2)
    c = (l["r_u2d"] * l["r_u1u"]
         * abs(star_cascade(ch.g_r_u2d, ris, "r", ch.g_r_u1u)) ** 2)
    d = (l["r_u2d"] * l["r_u2u"]
         * abs(star_cascade(ch.g_r_u2d, ris, "r", ch.g_r_u2u)) ** 2)
    return a, c, d


def _ul_terms(ch: ChannelRealization, ris: StarRisState):
    l = ch.pathlosses
    a = (math.sqrt(l["b_u1u"]) * ch.h_b_u1u
         + math.sqrt(l["br"] * l["r_u1u"])
         * star_cascade(ch.g_br, ris, "t", ch.g_r_u1u))
    b = (l["br"] * l["r_u2u"]
         * abs(star_cascade(ch.g_br, ris, "t", ch.g_r_u2u)) ** 2)
    # BS loop-back through the surface: the return leg is the conjugate of
    # the outgoing one, so the cascade reduces to sum_n w_n |g_br[n]|^2.
    loop = np.sum(ris.side("t") * np.abs(ch.g_br) ** 2)
    c = l["br"] ** 2 * abs(loop) ** 2
    return abs(a) ** 2, b, c


def sinr_dl_center(ch: ChannelRealization, ris: StarRisState,
                   pw: PowerConfig, sigma_sq: float = 1.0) -> float:
    """DL SINR of the cell-center user (imperfect SIC residual included)."""
    a, c, d = _dl_center_terms(ch, ris)
    return (pw.p_b1 * a
            / (pw.Xi * pw.p_b2 * a + pw.p_u1u * c + pw.p_u2u * d
               + sigma_sq))


def sinr_dl_edge(ch: ChannelRealization, ris: StarRisState,
                 pw: PowerConfig, sigma_sq: float = 1.0) -> float:
    """DL SINR of the cell-edge user (decodes its signal under the
    center user's full interference)."""
    a, c, d = _dl_edge_terms(ch, ris)
    return (pw.p_b2 * a
            / (pw.p_b1 * a + pw.p_u1u * c + pw.p_u2u * d + sigma_sq))


def sinr_ul_center(ch: ChannelRealization, ris: StarRisState,
                   pw: PowerConfig, si_draw: float,
                   sigma_b_sq: float = 1.0) -> float:
    """UL SINR of the center user at the FD BS; ``si_draw`` is |s~|^2."""
    if si_draw < 0:
        raise ValueError("si_draw is a squared magnitude, must be >= 0")
    a, b, c = _ul_terms(ch, ris)
    return (pw.p_u1u * a
            / (pw.p_u2u * b + pw.P_b * c + si_draw + sigma_b_sq))


def sinr_ul_edge(ch: ChannelRealization, ris: StarRisState,
                 pw: PowerConfig, si_draw: float,
                 sigma_b_sq: float = 1.0) -> float:
    """UL SINR of the edge user after (imperfect) SIC of the center user."""
    if si_draw < 0:
        raise ValueError("si_draw is a squared magnitude, must be >= 0")
    a, b, c = _ul_terms(ch, ris)
    return (pw.p_u2u * b
            / (pw.Xi * pw.p_u1u * a + pw.P_b * c + si_draw + sigma_b_sq))


def rate_strong_decodes_weak(ch: ChannelRealization, ris: StarRisState,
                             pw: PowerConfig,
                             sigma_sq: float = 1.0) -> float:
    """Rate at which the center user decodes the edge user's DL signal."""
    a, c, d = _dl_center_terms(ch, ris)
    sinr = (pw.p_b2 * a
            / (pw.p_b1 * a + pw.p_u1u * c + pw.p_u2u * d + sigma_sq))
    return math.log2(1.0 + sinr)


def _bidirectional_legs(ch: ChannelRealization, ris: StarRisState,
                        pw: PowerConfig, si_draw: float,
                        sigma_sq: float, sigma_b_sq: float):
    """Instantaneous rates of the four relaying legs.

    Returns (r_uc, r_u2u, r_ue, r_u1u): the combined-reception rate at each
    DL user and the BS decode rate of the corresponding UL message.
    """
    a1, c1, d1 = _dl_center_terms(ch, ris)
    a2, c2, d2 = _dl_edge_terms(ch, ris)
    r_uc = math.log2(
        1.0
        + pw.p_u2u * d1 / (pw.p_u1u * c1 + sigma_sq)
        + pw.p_b1 * a1 / (pw.Xi * pw.p_b2 * a1 + pw.p_u1u * c1 + sigma_sq))
    r_ue = math.log2(
        1.0
        + pw.p_u1u * c2 / (pw.p_u2u * d2 + sigma_sq)
        + pw.p_b2 * a2 / (pw.p_b1 * a2 + pw.p_u2u * d2 + sigma_sq))
    r_u1u = math.log2(1.0 + sinr_ul_center(ch, ris, pw, si_draw,
                                           sigma_b_sq))
    r_u2u = math.log2(1.0 + sinr_ul_edge(ch, ris, pw, si_draw,
                                         sigma_b_sq))
    return r_uc, r_u2u, r_ue, r_u1u


def rates_bidirectional(ch: ChannelRealization, ris: StarRisState,
                        pw: PowerConfig, si_draw: float = 0.0,
                        sigma_sq: float = 1.0,
                        sigma_b_sq: float = 1.0) -> Tuple[float, float]:
    """Instantaneous end-to-end rates of the two relayed connections.

    Each connection is the min of its BS decode leg and the combined
    (direct surface path + BS relay, ratio-combined) reception leg.
    """
    r_uc, r_u2u, r_ue, r_u1u = _bidirectional_legs(
        ch, ris, pw, si_draw, sigma_sq, sigma_b_sq)
    return min(r_u2u, r_uc), min(r_u1u, r_ue)


def noma_beneficial(gamma_noma: float, gamma_oma: float) -> bool:
    """True when the NOMA SINR strictly beats the OMA-equivalent threshold
    sqrt(1 + gamma_oma) - 1."""
    return gamma_noma > math.sqrt(1.0 + gamma_oma) - 1.0


def _trial_rng(seed: int, trial: int) -> np.random.Generator:
    return np.random.default_rng(
        np.random.SeedSequence(entropy=seed, spawn_key=(trial,)))


def _draw_si(pw: PowerConfig, rng: np.random.Generator) -> float:
    # s~ is CN(0, V); the SINRs consume |s~|^2. Drawn for every trial so
    # the realization stream layout does not depend on beta.
    z = rng.standard_normal(2)
    return 0.5 * pw.V * float(z[0] ** 2 + z[1] ** 2)


def _mean_and_stderr(values: np.ndarray) -> Tuple[float, float]:
    n = values.size
    mean = math.fsum(values) / n
    if n < 2:
        return mean, 0.0
    var = math.fsum((v - mean) ** 2 for v in values) / (n - 1)
    return mean, math.sqrt(var / n)


def ergodic_rate_mc(config: SystemConfig, ris: StarRisState,
                    pw: PowerConfig, trials: int, seed: int,
                    scenario: str = "noma-pair") -> RateReport:
    """Monte-Carlo ergodic rates over positions, channels and SI draws.

    Per-trial generators are spawned from the master seed by trial index
    and reductions use compensated summation, so the estimate is exactly
    reproducible and independent of any execution-order choices.

    For the bidirectional scenario the ergodic connection rate is the min
    of the two ergodic leg rates (matching the closed forms); the reported
    standard error is the binding leg's.
    """
    if trials < 1:
        raise ValueError("need at least one trial")
    if scenario not in ("noma-pair", "bidirectional"):
        raise ValueError(f"unknown scenario {scenario!r}")

    samples = np.empty((trials, 4))
    for t in range(trials):
        rng = _trial_rng(seed, t)
        ch = draw_realization(config, ris, rng)
        si = _draw_si(pw, rng)
        if scenario == "noma-pair":
            samples[t, 0] = math.log2(
                1.0 + sinr_dl_center(ch, ris, pw, config.sigma_sq))
            samples[t, 1] = math.log2(
                1.0 + sinr_dl_edge(ch, ris, pw, config.sigma_sq))
            samples[t, 2] = math.log2(
                1.0 + sinr_ul_center(ch, ris, pw, si, config.sigma_b_sq))
            samples[t, 3] = math.log2(
                1.0 + sinr_ul_edge(ch, ris, pw, si, config.sigma_b_sq))
        else:
            samples[t] = _bidirectional_legs(
                ch, ris, pw, si, config.sigma_sq, config.sigma_b_sq)

    if scenario == "noma-pair":
        rates, stderr = {}, {}
        for i, user in enumerate(USERS):
            rates[user], stderr[user] = _mean_and_stderr(samples[:, i])
        return RateReport.noma(rates, config.weights, estimator="mc",
                               trials=trials, stderr=stderr)

    legs = [_mean_and_stderr(samples[:, i]) for i in range(4)]
    (m_uc, se_uc), (m_u2u, se_u2u), (m_ue, se_ue), (m_u1u, se_u1u) = legs
    if m_u2u <= m_uc:
        r_c, se_c = m_u2u, se_u2u
    else:
        r_c, se_c = m_uc, se_uc
    if m_u1u <= m_ue:
        r_e, se_e = m_u1u, se_u1u
    else:
        r_e, se_e = m_ue, se_ue
    return RateReport.bidirectional(r_c, r_e, estimator="mc",
                                    trials=trials,
                                    stderr={"c": se_c, "e": se_e})
