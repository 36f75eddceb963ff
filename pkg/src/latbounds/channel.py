"""Nakagami-m block-fading channel with additive white Gaussian noise.

One fading realization holds per frame: the diagonal gain matrix multiplies
every one of the L transmitted vectors of that frame, and an independent
realization is drawn for the next frame.  Power gains gamma_i = h_i^2 are
Gamma distributed with shape m and rate m, so E[gamma_i] = 1.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from scipy import special as sp

from .errors import DimensionMismatch, DomainError, InvalidShape

MIN_SHAPE = 0.5


@dataclass(frozen=True)
class ChannelParams:
    """Channel description: shape m, linear SNR rho = 1/sigma^2, blocks per
    frame n (= lattice dimension), and frame length l in symbols."""

    m: float
    rho: float
    n: int
    l: int = 1

    def __post_init__(self):
        if self.m < MIN_SHAPE:
            raise InvalidShape(f"Nakagami shape must be >= {MIN_SHAPE}, got {self.m}")
        if not self.rho > 0:
            raise DomainError(f"rho must be positive, got {self.rho}")
        if self.n < 1 or self.l < 1:
            raise DimensionMismatch(f"need n >= 1 and l >= 1, got n={self.n}, l={self.l}")

    @property
    def sigma(self) -> float:
        return self.rho**-0.5


@dataclass(frozen=True)
class FadingRealization:
    """Per-block amplitude gains h and power gains gamma = h^2."""

    h: np.ndarray
    gamma: np.ndarray

    def __post_init__(self):
        h = np.asarray(self.h, dtype=float)
        g = np.asarray(self.gamma, dtype=float)
        if h.shape != g.shape or h.ndim != 1:
            raise DimensionMismatch("h and gamma must be 1-d arrays of equal length")
        if not (np.all(np.isfinite(h)) and np.all(np.isfinite(g))):
            raise DomainError("fading gains must be finite")
        if np.any(h < 0) or np.any(g < 0):
            raise DomainError("fading gains must be non-negative")
        if np.max(np.abs(g - h * h)) > 1e-12:
            raise DomainError("gamma must equal h squared")
        for name, arr in (("h", h), ("gamma", g)):
            frozen = arr.copy()
            frozen.setflags(write=False)
            object.__setattr__(self, name, frozen)

    @classmethod
    def from_h(cls, h) -> "FadingRealization":
        h = np.asarray(h, dtype=float)
        return cls(h=h, gamma=h * h)

    @classmethod
    def from_gamma(cls, gamma) -> "FadingRealization":
        g = np.asarray(gamma, dtype=float)
        return cls(h=np.sqrt(g), gamma=g)

    @property
    def n(self) -> int:
        return self.h.shape[0]


class RandomStream:
    """Seedable, splittable randomness source.

    Substream ``i`` is a counter-based Philox generator keyed by
    (seed, i), so the draws of frame i (or Monte Carlo batch i) do not
    depend on how work is partitioned across workers.
    """

    def __init__(self, seed: int):
        self.seed = int(seed) & (2**64 - 1)

    def substream(self, index: int) -> np.random.Generator:
        return np.random.Generator(np.random.Philox(key=[self.seed, int(index)]))

    def __repr__(self):
        return f"RandomStream(seed={self.seed})"


def sample_fading(params: ChannelParams, rng: np.random.Generator) -> FadingRealization:
    """Draw one realization: gamma_i ~ Gamma(shape m, rate m), h_i = sqrt(gamma_i)."""
    if params.m < MIN_SHAPE:
        raise InvalidShape(f"Nakagami shape must be >= {MIN_SHAPE}, got {params.m}")
    gamma = rng.gamma(params.m, 1.0 / params.m, size=params.n)
    return FadingRealization.from_gamma(gamma)


def gamma_power_pdf(x, m: float):
    """Density of the power gain: m^m x^(m-1) exp(-m x) / Gamma(m)."""
    _check_power_args(x, m)
    x = np.asarray(x, dtype=float)
    with np.errstate(divide="ignore"):
        out = np.exp(m * np.log(m) + np.where(x > 0, (m - 1) * np.log(x), 0.0)
                     - m * x - sp.gammaln(m))
        out = np.where(x > 0, out, _pdf_at_zero(m))
    return out if out.ndim else float(out)


def gamma_power_cdf(x, m: float):
    """Distribution function 1 - Gamma(m, m x)/Gamma(m)."""
    _check_power_args(x, m)
    x = np.asarray(x, dtype=float)
    out = sp.gammainc(m, m * x)
    return out if out.ndim else float(out)


def _pdf_at_zero(m: float) -> float:
    if m < 1.0:
        return np.inf
    if m == 1.0:
        return 1.0
    return 0.0


def _check_power_args(x, m: float) -> None:
    if m < MIN_SHAPE:
        raise InvalidShape(f"Nakagami shape must be >= {MIN_SHAPE}, got {m}")
    if np.any(np.asarray(x) < 0):
        raise DomainError("power gain argument must be non-negative")


def apply_channel(x, h: FadingRealization, sigma: float, rng: np.random.Generator):
    """One channel use: y_i = h_i x_i + z_i with z_i ~ N(0, sigma^2)."""
    if sigma < 0:
        raise DomainError(f"noise std must be non-negative, got {sigma}")
    xv = np.asarray(x, dtype=float)
    if xv.shape != h.h.shape:
        raise DimensionMismatch(f"signal shape {xv.shape} != fading shape {h.h.shape}")
    return h.h * xv + sigma * rng.standard_normal(xv.shape)


def order_statistics(h: FadingRealization) -> tuple[float, float, float]:
    """(min, max, geometric mean) of the power gains."""
    g = h.gamma
    gmin = float(g.min())
    gmax = float(g.max())
    geo = 0.0 if gmin == 0.0 else float(np.exp(np.mean(np.log(g))))
    return gmin, gmax, geo
