"""Smoke tests for the evalkit package."""

import numpy as np

from evalkit.autocorr import autocorrelation


def test_zero_lag_is_one():
    """Any non-constant image has autocorrelation exactly 1 at zero lag."""
    rng = np.random.default_rng(0)
    acmap = autocorrelation(rng.random((64, 64, 3)), max_lag=8)
    assert acmap.at(0, 0) == 1.0
