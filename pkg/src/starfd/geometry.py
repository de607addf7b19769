"""Cell geometry: user-position distributions on the two coverage disks and
the deterministic path-loss expectations used by the closed-form rates.

Layout. The base station (BS) sits at the center of the cell-center disk
of radius ``R``; cell-center users are uniform on that disk. The surface
(RIS) sits at distance ``d_br`` from the BS, outside the center disk, and
the cell-edge disk of radius ``R_r`` is centered on the surface; cell-edge
users are uniform on it. ``r1 = d_br - R`` is the clearance between the
surface and the rim of the center disk.

Path loss is the bounded model ``l(d) = (1 + d)^(-m)`` with distances in
meters, which avoids the d -> 0 singularity and keeps every expectation in
(0, 1].

Four position-averaged expectations of ``l`` appear in the closed forms:

- over the center disk (distance BS -> uniform center user), closed form;
- over the edge disk (surface -> uniform edge user), same closed form;
- from a fixed external point to a uniform point in a disk (surface ->
  center user), via Gauss-Legendre quadrature of the arccos distance
  density on [r1, r1 + 2R];
- between two independent uniform points in the same disk (center user ->
  center user), via a five-term hypergeometric expression with an
  automatic quadrature fallback where the series diverges.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Literal

import numpy as np

from .exceptions import NumericError
from .specfun import gauss_legendre, hyper_pFq, integrate_adaptive

__all__ = [
    "CellGeometry",
    "UserPosition",
    "sample_user_position",
    "pathloss",
    "exp_pathloss_center_disk",
    "exp_pathloss_edge_disk",
    "exp_pathloss_fixed_point_to_disk",
    "exp_pathloss_two_random_points",
]

Region = Literal["center", "edge"]


@dataclass(frozen=True)
class CellGeometry:
    """Disk radii, BS-surface separation and path-loss exponent.

    ``d_br > R`` so the surface lies outside the center disk, and ``m > 2``
    because the disk expectations divide by (m - 1)(m - 2).
    """

    R: float
    R_r: float
    d_br: float
    m: float

    def __post_init__(self) -> None:
        if not self.R > 0:
            raise ValueError("center disk radius R must be positive")
        if not self.R_r > 0:
            raise ValueError("edge disk radius R_r must be positive")
        if not self.d_br > self.R:
            raise ValueError(
                "the surface must lie outside the center disk (d_br > R)")
        if not self.m > 2:
            raise ValueError("path-loss exponent must exceed 2")

    @property
    def r1(self) -> float:
        """Clearance between the surface and the center-disk rim."""
        return self.d_br - self.R


@dataclass(frozen=True)
class UserPosition:
    """Polar position inside one coverage disk.

    ``radius`` is measured from the disk's own center (the BS for the
    center region, the surface for the edge region).
    """

    radius: float
    angle: float
    region: Region

    def __post_init__(self) -> None:
        if self.radius < 0:
            raise ValueError("radius must be non-negative")
        if self.region not in ("center", "edge"):
            raise ValueError(f"unknown region {self.region!r}")


def sample_user_position(geometry: CellGeometry, region: Region,
                         rng: np.random.Generator) -> UserPosition:
    """Draw a uniform position on the requested disk.

    The radius has density 2r/R^2 on [0, R_region] (uniform area), the
    angle is uniform on [0, 2*pi).
    """
    radius_max = geometry.R if region == "center" else geometry.R_r
    radius = radius_max * math.sqrt(rng.uniform())
    angle = rng.uniform(0.0, 2.0 * math.pi)
    return UserPosition(radius=radius, angle=angle, region=region)


def pathloss(distance, m: float):
    """Bounded path loss ``(1 + d)^(-m)``; accepts scalars or arrays."""
    d = np.asarray(distance, dtype=float)
    if np.any(d < 0):
        raise ValueError("distance must be non-negative")
    out = (1.0 + d) ** (-m)
    return float(out) if out.ndim == 0 else out


def _disk_expectation_closed_form(R: float, m: float) -> float:
    # E{(1+r)^(-m)} under the density 2r/R^2, integrated in closed form.
    # The mR(1+R) term enters with a minus sign; this is checked against
    # the adaptive oracle in the tests (and gives the correct R -> 0
    # limit of 1).
    num = -1.0 + R * R - m * R * (1.0 + R) + (1.0 + R) ** m
    return 2.0 * (1.0 + R) ** (-m) * num / ((m - 1.0) * (m - 2.0) * R * R)


def exp_pathloss_center_disk(R: float, m: float) -> float:
    """E{(1+r)^(-m)} for r distributed 2r/R^2 on the center disk."""
    if not R > 0:
        raise ValueError("disk radius must be positive")
    if not m > 2:
        raise ValueError(
            "path-loss exponent must exceed 2 (closed form has a pole)")
    return _disk_expectation_closed_form(R, m)


def exp_pathloss_edge_disk(R_r: float, m: float) -> float:
    """Same expectation over the edge disk (identical formula in R_r)."""
    if not R_r > 0:
        raise ValueError("disk radius must be positive")
    if not m > 2:
        raise ValueError(
            "path-loss exponent must exceed 2 (closed form has a pole)")
    return _disk_expectation_closed_form(R_r, m)


def _external_point_density(r, r1: float, R: float):
    """Distance density from a point at d = r1 + R to a uniform disk point.

    Supported on [r1, r1 + 2R]. The arccos argument is the law-of-cosines
    ratio (r^2 + d^2 - R^2) / (2 r d); it is clamped to [-1, 1] to guard
    the endpoints against floating-point overshoot.
    """
    d = r1 + R
    arg = (r * r + d * d - R * R) / (2.0 * r * d)
    arg = np.clip(arg, -1.0, 1.0)
    return 2.0 * r / (math.pi * R * R) * np.arccos(arg)


def exp_pathloss_fixed_point_to_disk(r1: float, R: float, m: float,
                                     n_nodes: int = 64) -> float:
    """E{(1+r)^(-m)} between a fixed external point and a uniform disk point.

    The fixed point sits at distance r1 + R from the center of a disk of
    radius R (so r1 > 0 is the clearance to the rim). Evaluated by
    Gauss-Legendre quadrature of the arccos density on [r1, r1 + 2R];
    converges to the adaptive oracle as ``n_nodes`` grows. ``m = 0``
    integrates the bare density and returns 1 (used as a sanity check).
    """
    if not r1 > 0:
        raise ValueError("clearance r1 must be positive")
    if not R > 0:
        raise ValueError("disk radius must be positive")
    if m < 0:
        raise ValueError("path-loss exponent must be non-negative")
    if n_nodes < 8:
        raise ValueError("need at least 8 quadrature nodes")
    rule = gauss_legendre(n_nodes)
    # The density vanishes like sqrt(r - r1) and sqrt(r1 + 2R - r) at the
    # interval ends, which would drag Gauss-Legendre down to algebraic
    # convergence under the plain affine map. The substitution
    # r = r1 + R (1 - cos psi), psi in [0, pi], absorbs both square roots
    # (arccos(arg) ~ sin(psi) there) and restores spectral convergence,
    # so 64 nodes are far more than enough.
    psi = 0.5 * math.pi * (1.0 + rule.nodes)
    r = r1 + R * (1.0 - np.cos(psi))
    jac = 0.5 * math.pi * R * np.sin(psi)
    vals = (1.0 + r) ** (-m) * _external_point_density(r, r1, R) * jac
    return float(np.sum(rule.weights * vals))


def _two_point_density(r, R: float):
    """Distance density between two independent uniform points in a disk.

    Supported on [0, 2R]:
    f(r) = (4r / (pi R^2)) (arccos(r/2R) - (r/2R) sqrt(1 - r^2/4R^2)).
    """
    u = np.clip(r / (2.0 * R), 0.0, 1.0)
    return (4.0 * r / (math.pi * R * R)
            * (np.arccos(u) - u * np.sqrt(1.0 - u * u)))


def _two_point_series(R: float, m: float) -> float:
    # Five-term hypergeometric expression, argument 4R^2. Divergent for
    # 4R^2 >= 1; hyper_pFq raises and the caller falls back to quadrature.
    z = 4.0 * R * R
    pole = (m * m - 3.0 * m + 2.0) * R * R
    f1 = hyper_pFq([0.5, m / 2 - 1.0, m / 2 - 0.5], [-0.5, 1.0], z)
    f2 = hyper_pFq([1.5, m / 2 + 0.5, m / 2], [0.5, 3.0], z)
    f3 = hyper_pFq([2.0, m / 2 + 0.5, m / 2 + 1.0], [1.5, 3.5], z)
    f4 = hyper_pFq([2.0, m / 2 + 0.5, m / 2 + 1.0], [2.5, 2.5], z)
    return (2.0 / pole
            - 2.0 * f1 / pole
            - f2
            + 64.0 * m * R * f3 / (15.0 * math.pi)
            - 64.0 * m * R * f4 / (9.0 * math.pi))


def exp_pathloss_two_random_points(R: float, m: float) -> float:
    """E{(1+r)^(-m)} between two independent uniform points in one disk.

    Tries the hypergeometric closed form first; when the series fails to
    converge (it diverges whenever 2R >= 1, i.e. for every realistic disk
    measured in meters) the exact distance density is integrated with the
    adaptive oracle instead.
    """
    if not R > 0:
        raise ValueError("disk radius must be positive")
    if not m > 2:
        raise ValueError("path-loss exponent must exceed 2")
    try:
        value = _two_point_series(R, m)
    except NumericError:
        value = integrate_adaptive(
            lambda r: (1.0 + r) ** (-m) * float(_two_point_density(r, R)),
            0.0, 2.0 * R, tol=1e-12)
    return value
