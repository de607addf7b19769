"""Shared scenario builders for the test suite."""

from starfd.channel import GeometryAngles
from starfd.config import SystemConfig
from starfd.geometry import CellGeometry

BASELINE_ANGLES = GeometryAngles(
    az_br=0.8, el_br=1.1,
    az_u1d=2.0, el_u1d=1.3,
    az_u2d=2.9, el_u2d=0.7,
    az_u1u=4.1, el_u1u=1.0,
    az_u2u=5.3, el_u2u=1.5,
    d_over_lambda=0.5,
)


def make_config(**overrides) -> SystemConfig:
    """Baseline scenario (50 m / 30 m disks, N=20, kappa=3, 30 dBW budget)."""
    kwargs = dict(
        geometry=CellGeometry(R=50.0, R_r=30.0, d_br=60.0, m=2.7),
        n_elements=20,
        angles=BASELINE_ANGLES,
        P_t=1000.0,
    )
    kwargs.update(overrides)
    return SystemConfig(**kwargs)
