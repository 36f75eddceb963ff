"""Shared test helpers: small independent oracles the suites check against."""

import numpy as np
import pytest
from scipy import special as sp


def mc_kernel_expectation(kind, rho, n, k, l, m, d_min=1.0, w=1.0,
                          nsamp=1_000_000, seed=0):
    """Brute-force Monte Carlo oracle for the three bound kernels.

    ``kind``: "min" (packing radius over the worst gain), "max"
    (volume-matched radius over the best gain), "geo" (equal-volume radius
    over the geometric mean).  Returns (mean, stderr).
    """
    rng = np.random.default_rng(seed)
    gamma = rng.gamma(m, 1.0 / m, size=(nsamp, n))
    if kind == "min":
        r2 = d_min * d_min / 4.0 * gamma.min(axis=1)
    elif kind == "max":
        c = sp.gamma(k / 2.0 + 1.0) ** (2.0 / k) / np.pi
        r2 = c * w * w * gamma.max(axis=1)
    elif kind == "geo":
        c = sp.gamma(n / 2.0 + 1.0) ** (2.0 / n) / np.pi
        r2 = c * np.exp(np.log(gamma).mean(axis=1))
    else:
        raise ValueError(kind)
    vals = (1.0 - sp.gammaincc(k / 2.0, r2 * rho / 2.0)) ** l
    return float(vals.mean()), float(vals.std(ddof=1) / np.sqrt(nsamp))


def assert_close_mc(value, mc_mean, mc_err, sigmas=3.0, floor=1e-12):
    assert abs(value - mc_mean) <= sigmas * max(mc_err, floor), (
        f"value {value} vs MC {mc_mean} +- {mc_err} exceeds {sigmas} sigma"
    )


@pytest.fixture
def rng():
    return np.random.default_rng(20260810)
