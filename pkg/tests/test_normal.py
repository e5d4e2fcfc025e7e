import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from epfbench.normal import normal_cdf, normal_ppf

from .oracles import NCDF_POINTS


def test_cdf_at_zero_is_half():
    assert normal_cdf(0.0) == 0.5


@pytest.mark.parametrize("z,expected", sorted(NCDF_POINTS.items()))
def test_cdf_matches_high_precision_oracle(z, expected):
    assert normal_cdf(z) == pytest.approx(expected, abs=1e-9, rel=1e-9)


def test_cdf_975_quantile():
    assert abs(normal_cdf(1.959964) - 0.975) < 1e-6


@settings(max_examples=200, deadline=None)
@given(st.floats(min_value=-8.5, max_value=8.5))
def test_cdf_symmetry(z):
    assert abs(normal_cdf(z) + normal_cdf(-z) - 1.0) < 2e-7


@settings(max_examples=200, deadline=None)
@given(st.floats(min_value=1e-12, max_value=1.0 - 1e-12))
def test_ppf_inverts_cdf(p):
    assert normal_cdf(normal_ppf(p)) == pytest.approx(p, rel=1e-9, abs=1e-12)


def test_ppf_at_clip_eps_matches_oracle():
    from .oracles import PHI_INV_CLIP_1E7

    assert normal_ppf(1e-7) == pytest.approx(PHI_INV_CLIP_1E7, abs=1e-10)


def test_ppf_rejects_out_of_range():
    with pytest.raises(ValueError):
        normal_ppf(1.5)
    assert normal_ppf(0.0) == -np.inf
    assert normal_ppf(1.0) == np.inf
