"""Full scenario description shared by the simulator and the closed forms."""

from __future__ import annotations

import math
from dataclasses import dataclass

from .channel import GeometryAngles
from .geometry import CellGeometry

__all__ = ["SystemConfig", "USERS"]

USERS = ("u1d", "u2d", "u1u", "u2u")


@dataclass(frozen=True)
class SystemConfig:
    """Scenario parameters: geometry, fading, noise, weights, power defaults.

    The power-related fields (``P_t``, ``tau``, ``alpha1``/``alpha2``,
    ``ul_split``, SIC and self-interference constants, target rates) are the
    scenario defaults from which an operative power configuration is built;
    rate functions read powers from the power object they are handed, not
    from here.

    Conventions: ``tau`` is the downlink share of the budget (P_b = tau*P_t,
    P_u = (1-tau)*P_t), ``ul_split`` the share of P_u given to the center
    uplink user, and ``si_lambda`` the exponent of the residual
    self-interference variance V = beta * P_b**si_lambda.
    """

    geometry: CellGeometry
    n_elements: int
    angles: GeometryAngles
    kappa_br: float = 3.0
    kappa_u1d: float = 3.0
    kappa_u2d: float = 3.0
    kappa_u1u: float = 3.0
    kappa_u2u: float = 3.0
    sigma_sq: float = 1.0
    sigma_b_sq: float = 1.0
    weight_u1d: float = 0.8
    weight_u2d: float = 0.8
    weight_u1u: float = 0.8
    weight_u2u: float = 0.8
    P_t: float = 1000.0
    tau: float = 0.8
    alpha1: float = 0.2
    alpha2: float = 0.8
    ul_split: float = 0.5
    Xi: float = 0.0
    beta: float = 0.0
    si_lambda: float = 1.0
    R_dth: float = 0.0
    R_uth: float = 0.0

    def __post_init__(self) -> None:
        if not (isinstance(self.n_elements, int) and self.n_elements >= 1):
            raise ValueError("n_elements must be a positive integer")
        for link in ("br",) + USERS:
            if getattr(self, f"kappa_{link}") < 0:
                raise ValueError(f"kappa_{link} must be non-negative")
        if not self.sigma_sq > 0 or not self.sigma_b_sq > 0:
            raise ValueError("noise powers must be positive")
        for user in USERS:
            if getattr(self, f"weight_{user}") < 0:
                raise ValueError(f"weight_{user} must be non-negative")
        if not self.P_t > 0:
            raise ValueError("total power budget must be positive")
        if not 0.0 < self.tau <= 1.0:
            raise ValueError(
                "tau must lie in (0, 1]; an uplink-only split is modeled "
                "as a small positive tau such as 0.01")
        if abs(self.alpha1 + self.alpha2 - 1.0) > 1e-9:
            raise ValueError("alpha1 + alpha2 must equal 1")
        if not self.alpha1 < self.alpha2:
            raise ValueError(
                "NOMA ordering requires alpha1 < alpha2 (the cell-edge "
                "user gets the larger power share)")
        if not 0.0 <= self.ul_split <= 1.0:
            raise ValueError("ul_split must lie in [0, 1]")
        if not 0.0 <= self.Xi <= 1.0:
            raise ValueError("SIC error factor Xi must lie in [0, 1]")
        if self.beta < 0:
            raise ValueError("beta must be non-negative")
        if self.si_lambda < 0:
            raise ValueError("si_lambda must be non-negative")
        if self.R_dth < 0 or self.R_uth < 0:
            raise ValueError("target rates must be non-negative")

    def kappa(self, link: str) -> float:
        """Rician factor of one surface link (br, u1d, u2d, u1u, u2u)."""
        try:
            return getattr(self, f"kappa_{link}")
        except AttributeError:
            raise ValueError(f"unknown link {link!r}") from None

    @property
    def weights(self) -> dict:
        return {user: getattr(self, f"weight_{user}") for user in USERS}

    @property
    def snr_db(self) -> float:
        """Transmit SNR P_t / sigma_sq in dB."""
        return 10.0 * math.log10(self.P_t / self.sigma_sq)
