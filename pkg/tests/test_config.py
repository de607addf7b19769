import math

import pytest

from conftest import make_config


class TestSystemConfig:
    def test_baseline_passes(self):
        config = make_config()
        assert config.n_elements == 20
        assert config.kappa("br") == 3.0
        assert config.weights == {"u1d": 0.8, "u2d": 0.8,
                                  "u1u": 0.8, "u2u": 0.8}
        assert math.isclose(config.snr_db, 30.0)

    def test_tau_zero_rejected_with_limit_hint(self):
        with pytest.raises(ValueError, match="small positive tau"):
            make_config(tau=0.0)

    def test_tau_one_allowed(self):
        assert make_config(tau=1.0).tau == 1.0

    def test_noma_ordering_enforced(self):
        with pytest.raises(ValueError, match="alpha1 < alpha2"):
            make_config(alpha1=0.8, alpha2=0.2)
        with pytest.raises(ValueError, match="equal 1"):
            make_config(alpha1=0.3, alpha2=0.8)

    def test_field_ranges(self):
        with pytest.raises(ValueError):
            make_config(Xi=1.5)
        with pytest.raises(ValueError):
            make_config(beta=-1.0)
        with pytest.raises(ValueError):
            make_config(sigma_sq=0.0)
        with pytest.raises(ValueError):
            make_config(kappa_u2d=-0.1)
        with pytest.raises(ValueError):
            make_config(weight_u1u=-0.5)
        with pytest.raises(ValueError):
            make_config(n_elements=0)
        with pytest.raises(ValueError):
            make_config(R_dth=-1.0)

    def test_unknown_link_rejected(self):
        with pytest.raises(ValueError, match="unknown link"):
            make_config().kappa("u3d")
