"""Analytical frame-error-probability bounds: SLB, SUB, MSLB, MSUB.

Every bound is an expectation, over the block-fading distribution, of powers
of sphere integrals.  Three kernels cover all four bounds:

* ``func_a``: expectation of the packing-sphere integral (radius set by
  d_min/2 times the worst amplitude gain) raised to the frame length.
* ``func_b``: expectation of the k-dimensional volume-matched sphere
  integral whose radius scales with the best power gain.
* ``func_c``: expectation of the N-dimensional equal-volume sphere integral
  (radius set by the geometric mean of the gains) raised to the frame
  length.

Each kernel has up to three evaluation routes: a closed form (finite
multinomial sums over incomplete-gamma expansions, valid for even sphere
dimension and integer shape m), a deterministic one-dimensional quadrature
against the exact order-statistic density (any m >= 0.5), and a Monte Carlo
expectation.  Closed forms with frame length L > 1 are alternating binomial
sums whose terms grow like C(L, L/2) while the result stays in [0, 1]; those
sums are evaluated in adaptive-precision arithmetic (mpmath), since double
precision loses every significant digit already for moderate L at low SNR.

Two transcription traps in the source formulas are corrected here and locked
in by the dual-path tests: the min-gain expectation carries a Gamma(N)
multinomial factor (invisible for N = 2 where Gamma(2) = 1), and the
binomial expansion of the max-gain distribution alternates in sign.
"""

from __future__ import annotations

import math
import warnings
from dataclasses import dataclass
from math import comb, exp, lgamma, log, pi

import numpy as np
from scipy import integrate
from scipy import special as sp

from .channel import FadingRealization, RandomStream
from .errors import DomainError, ParameterUnsupported, TooLarge
from .sfuncs import (
    DEFAULT_CONFIG,
    SpecialFnConfig,
    compositions,
    compositions_count,
    g_integral,
    meijer_g_nn,
)

DEFAULT_MC_SAMPLES = 10**6
MC_BATCH = 1024
SUMMAND_CAP = 10**8
_CLAMP_SLACK = 1e-9


@dataclass(frozen=True)
class BoundParams:
    """Everything a bound evaluation needs: dimension n, frame length l,
    Nakagami shape m, linear SNR rho, the lattice's d_min and mean basis
    norm w, and the carving size k_per_dim for the finite-set bounds."""

    n: int
    l: int
    m: float
    rho: float
    d_min: float
    w: float
    k_per_dim: int | None = None

    def __post_init__(self):
        if self.n < 1 or self.l < 1:
            raise DomainError(f"need n >= 1 and l >= 1, got n={self.n}, l={self.l}")
        if self.m < 0.5:
            raise DomainError(f"Nakagami shape must be >= 0.5, got {self.m}")
        if not (self.rho > 0 and self.d_min > 0 and self.w > 0):
            raise DomainError("rho, d_min and w must all be positive")
        if self.k_per_dim is not None and self.k_per_dim < 1:
            raise DomainError(f"k_per_dim must be >= 1, got {self.k_per_dim}")

    @property
    def m_is_integer(self) -> bool:
        return abs(self.m - round(self.m)) < 1e-9 and round(self.m) >= 1


@dataclass(frozen=True)
class BoundValue:
    """A bound evaluation: probability, evaluation route, Monte Carlo
    standard error (zero for deterministic routes)."""

    value: float
    method: str
    stderr: float = 0.0

    def __post_init__(self):
        v = self.value
        if not (-_CLAMP_SLACK <= v <= 1.0 + _CLAMP_SLACK):
            raise DomainError(f"bound value {v} is outside [0, 1] by more than {_CLAMP_SLACK}")
        if not 0.0 <= v <= 1.0:
            warnings.warn(f"clamping bound value {v!r} into [0, 1]", stacklevel=2)
            object.__setattr__(self, "value", min(1.0, max(0.0, v)))


def _vol_radius_const(k: int) -> float:
    # squared radius of the unit-volume k-ball: Gamma(k/2+1)^(2/k) / pi
    return sp.gamma(k / 2.0 + 1.0) ** (2.0 / k) / pi


def _geo_mean(gamma: np.ndarray) -> np.ndarray:
    with np.errstate(divide="ignore"):
        return np.exp(np.mean(np.log(gamma), axis=-1))


def volume_radius_sq(k: int, gamma: np.ndarray, n: int, w: float) -> np.ndarray:
    """Squared radius of the k-sphere matched to the faded cell volume:
    best power gain scaled by W^2 for k < n, geometric mean for k = n."""
    gamma = np.asarray(gamma, dtype=float)
    if k == n:
        return _vol_radius_const(n) * _geo_mean(gamma)
    return _vol_radius_const(k) * w * w * np.max(gamma, axis=-1)


def packing_radius_sq(gamma: np.ndarray, d_min: float) -> np.ndarray:
    """Squared faded packing radius: (d_min/2)^2 times the worst power gain."""
    return d_min * d_min / 4.0 * np.min(np.asarray(gamma, dtype=float), axis=-1)


@dataclass(frozen=True)
class SphereRadii:
    """Radius rules derived from one parameter set."""

    params: BoundParams

    def r_k_sq(self, k: int, h: FadingRealization) -> float:
        if not 1 <= k <= self.params.n:
            raise DomainError(f"k must be in 1..{self.params.n}, got {k}")
        return float(volume_radius_sq(k, h.gamma, self.params.n, self.params.w))

    def r_cal_sq(self, h: FadingRealization) -> float:
        return float(packing_radius_sq(h.gamma, self.params.d_min))


def sphere_integral_i(k: int, h: FadingRealization, params: BoundParams) -> float:
    """Gaussian mass of the volume-matched k-sphere (1 for k = 0)."""
    if not 0 <= k <= params.n:
        raise DomainError(f"k must be in 0..{params.n}, got {k}")
    if k == 0:
        return 1.0
    r2 = volume_radius_sq(k, h.gamma, params.n, params.w)
    return float(1.0 - sp.gammaincc(k / 2.0, r2 * params.rho / 2.0))


def sphere_integral_i_cal(k: int, h: FadingRealization, params: BoundParams) -> float:
    """Gaussian mass of the faded packing sphere (1 for k = 0)."""
    if not 0 <= k <= params.n:
        raise DomainError(f"k must be in 0..{params.n}, got {k}")
    if k == 0:
        return 1.0
    r2 = packing_radius_sq(h.gamma, params.d_min)
    return float(1.0 - sp.gammaincc(k / 2.0, r2 * params.rho / 2.0))


# ---------------------------------------------------------------------------
# closed forms
# ---------------------------------------------------------------------------

def _check_summand_cap(count: int) -> None:
    if count > SUMMAND_CAP:
        raise TooLarge(f"closed form needs {count} summands, above the cap {SUMMAND_CAP}")


def _a_summand_count(l: int, k: int, mi: int, n: int) -> int:
    per_t = compositions_count(n - 1, mi)
    return sum(compositions_count(q, k // 2) for q in range(1, l + 1)) * per_t


def _a_qsum_f64(rho, n, k, l, mi, d_min):
    """Sum over q >= 1 of the min-gain closed form; the kernel value is 1 + sum.

    Log-space summands; includes the Gamma(n) multinomial normalization of
    the min-gain density expansion.
    """
    d2 = d_min * d_min
    base = log(n) + lgamma(n) + mi * log(mi) - lgamma(mi)
    total = 0.0
    for q in range(1, l + 1):
        lcoeff = lgamma(l + 1) - lgamma(l - q + 1)
        s_q = 0.0
        for ncomp in compositions(q, k // 2):
            zz = sum(i * c for i, c in enumerate(ncomp))
            lpsi = sum(c * lgamma(i + 1) + lgamma(c + 1) for i, c in enumerate(ncomp))
            tsum = 0.0
            for tcomp in compositions(n - 1, mi):
                yy = sum(j * c for j, c in enumerate(tcomp))
                lxi = sum(c * lgamma(j + 1) + lgamma(c + 1) for j, c in enumerate(tcomp))
                ln_term = (base + yy * log(mi) + zz * log(d2 * rho / 8.0)
                           + lgamma(yy + mi + zz) - lxi
                           - (yy + mi + zz) * log(mi * n + q * rho * d2 / 8.0))
                tsum += exp(ln_term)
            s_q += exp(lcoeff - lpsi) * tsum
        total += (-1.0) ** q * s_q
    return total


def _a_qsum_mp(rho, n, k, l, mi, d_min):
    import mpmath as mp

    d2 = mp.mpf(d_min) ** 2
    rho = mp.mpf(rho)

    def magnitude(q):
        front = mp.gamma(l + 1) / mp.gamma(l - q + 1) * n * mp.gamma(n) \
            * mp.mpf(mi) ** mi / mp.gamma(mi)
        s_q = mp.mpf(0)
        for ncomp in compositions(q, k // 2):
            zz = sum(i * c for i, c in enumerate(ncomp))
            psi = mp.mpf(1)
            for i, c in enumerate(ncomp):
                psi *= mp.gamma(i + 1) ** c * mp.gamma(c + 1)
            tsum = mp.mpf(0)
            for tcomp in compositions(n - 1, mi):
                yy = sum(j * c for j, c in enumerate(tcomp))
                xi = mp.mpf(1)
                for j, c in enumerate(tcomp):
                    xi *= mp.gamma(j + 1) ** c * mp.gamma(c + 1)
                tsum += (mp.mpf(mi) ** yy * (d2 * rho / 8) ** zz
                         * mp.gamma(yy + mi + zz)
                         / (xi * (mi * n + q * rho * d2 / 8) ** (yy + mi + zz)))
            s_q += tsum / psi
        return front * s_q

    return _mp_alternating_sum(l, magnitude)


def _b_complement_f64(rho, n, k, mi, w):
    """1 - B: expectation of the upper-gamma tail over the max power gain.

    Alternating binomial sum over q = 1..n (the sign is required for the
    expansion of the max-gain distribution to be a distribution at all),
    with the all-index-zero terms excluded from the first inner sum where
    the integral would diverge.
    """
    beta = rho * sp.gamma(k / 2.0 + 1.0) ** (2.0 / k) * w * w / (2.0 * pi)
    acc = 0.0
    for q in range(1, n + 1):
        outer = (-1.0) ** q * comb(n, q) * math.factorial(q) / sp.gamma(k / 2.0)
        s1 = 0.0
        s2 = 0.0
        for ncomp in compositions(q, mi):
            xx = sum(i * c for i, c in enumerate(ncomp))
            ups = 1.0
            for i, c in enumerate(ncomp):
                ups *= (mi**i / math.factorial(i)) ** c / math.factorial(c)
            if xx != 0:
                s1 += xx * ups * g_integral(float(xx), beta, q * mi, k / 2.0)
            s2 += q * mi * ups * g_integral(xx + 1.0, beta, q * mi, k / 2.0)
        acc += outer * (s1 - s2)
    return acc


def _c_qsum_hyp_f64(rho, l, m):
    """n = 2 route of the geometric-mean kernel via 2F1; returns the q-sum."""
    total = 0.0
    for q in range(1, l + 1):
        r = 4.0 * pi * m / (q * rho)
        lncoeff = (lgamma(l + 1) - lgamma(l - q + 1) - lgamma(q + 1)
                   + 2.0 * sp.gammaln(0.5 + m) + 2.0 * m * log(r)
                   - 0.5 * log(pi) - sp.gammaln(0.5 + 2.0 * m))
        f = sp.hyp2f1(0.5 + m, m, 0.5 + 2.0 * m, 1.0 - r * r)
        total += (-1.0) ** q * exp(lncoeff) * f
    return total


def _c_qsum_hyp_mp(rho, l, m):
    import mpmath as mp

    rho = mp.mpf(rho)

    def magnitude(q):
        r = 4 * mp.pi * m / (q * rho)
        coeff = (mp.gamma(l + 1) / mp.gamma(l - q + 1) / mp.gamma(q + 1)
                 * mp.gamma(mp.mpf(1) / 2 + m) ** 2 * r ** (2 * m)
                 / mp.sqrt(mp.pi) / mp.gamma(mp.mpf(1) / 2 + 2 * m))
        return coeff * mp.hyp2f1(mp.mpf(1) / 2 + m, m, mp.mpf(1) / 2 + 2 * m, 1 - r**2)

    return _mp_alternating_sum(l, magnitude)


def _c_qsum_meijer_f64(rho, n, l, m, config: SpecialFnConfig):
    """General even-n route of the geometric-mean kernel via Meijer G."""
    total = 0.0
    for q in range(1, l + 1):
        lcoeff = lgamma(l + 1) - lgamma(l - q + 1)
        s_q = 0.0
        for ncomp in compositions(q, n // 2):
            qq = sum(i * c for i, c in enumerate(ncomp))
            lphi = sum(c * lgamma(i + 1) + lgamma(c + 1) for i, c in enumerate(ncomp))
            x = (2.0 * pi * m * n / (q * rho)) ** n / sp.gamma(n / 2.0 + 1.0) ** 2
            gval = meijer_g_nn(n, m, float(qq), x, config)
            ln_front = (lcoeff - lphi + 0.5 * log(n) + qq * log(n / q)
                        - n * lgamma(m) - (n - 1) / 2.0 * log(2.0 * pi))
            s_q += exp(ln_front) * gval
        total += (-1.0) ** q * s_q
    return total


def _c_qsum_meijer_mp(rho, n, l, m):
    import mpmath as mp

    rho = mp.mpf(rho)

    def magnitude(q):
        s_q = mp.mpf(0)
        for ncomp in compositions(q, n // 2):
            qq = sum(i * c for i, c in enumerate(ncomp))
            phi = mp.mpf(1)
            for i, c in enumerate(ncomp):
                phi *= mp.gamma(i + 1) ** c * mp.gamma(c + 1)
            x = (2 * mp.pi * m * n / (q * rho)) ** n / mp.gamma(mp.mpf(n) / 2 + 1) ** 2
            a_params = [(mp.mpf(j) - qq) / n for j in range(1, n + 1)]
            gval = mp.meijerg([a_params, []], [[mp.mpf(m)] * n, []], x)
            front = (mp.gamma(l + 1) / mp.gamma(l - q + 1) / phi
                     * mp.sqrt(mp.mpf(n)) * (mp.mpf(n) / q) ** qq
                     / mp.gamma(m) ** n / (2 * mp.pi) ** (mp.mpf(n - 1) / 2))
            s_q += front * mp.re(gval)
        return s_q

    return _mp_alternating_sum(l, magnitude)


def _mp_alternating_sum(l, magnitude, dps_start=30, dps_cap=400):
    """Evaluate sum_{q=1}^{l} (-1)^q T_q, T_q >= 0, raising the working
    precision until the cancelled result keeps ~12 significant digits."""
    import mpmath as mp

    dps = dps_start
    while True:
        with mp.workdps(dps):
            total = mp.mpf(0)
            maxmag = mp.mpf(0)
            for q in range(1, l + 1):
                t_q = magnitude(q)
                maxmag = max(maxmag, abs(t_q))
                total += (-1) ** q * t_q
            if maxmag == 0:
                return 0.0
            if abs(total) > maxmag * mp.mpf(10) ** (-(dps - 12)) or dps >= dps_cap:
                return float(total)
            if total != 0:
                deficit = int(mp.log10(maxmag / abs(total)))
            else:
                deficit = dps
            dps = min(dps_cap, max(dps + 20, deficit + 25))


# ---------------------------------------------------------------------------
# deterministic quadrature routes (any real m >= 0.5)
# ---------------------------------------------------------------------------

def _min_gain_r2_pdf(x, n, m, d_min):
    # density of d_min^2/4 * min(gamma): rate c = 4m/d^2 per block
    c = 4.0 * m / (d_min * d_min)
    with np.errstate(divide="ignore"):
        logpdf = (log(n) + m * log(c) + (m - 1.0) * np.log(x) - c * x
                  - sp.gammaln(m))
    return np.exp(logpdf) * sp.gammaincc(m, c * x) ** (n - 1)


def _max_gain_pdf(x, n, m):
    with np.errstate(divide="ignore"):
        logpdf = (log(n) + m * log(m) + (m - 1.0) * np.log(x) - m * x
                  - sp.gammaln(m))
    return np.exp(logpdf) * sp.gammainc(m, m * x) ** (n - 1)


_QUAD_OPTS = dict(epsabs=1e-13, epsrel=1e-11, limit=400)


def _a_quadrature(rho, n, k, l, m, d_min):
    def f(x):
        return _min_gain_r2_pdf(x, n, m, d_min) * (1.0 - sp.gammaincc(k / 2.0, x * rho / 2.0)) ** l

    val, _ = integrate.quad(f, 0.0, np.inf, **_QUAD_OPTS)
    return val


def _a_quadrature_complement(rho, n, k, m, d_min):
    # 1 - A for l = 1, integrated on the tail side so high-SNR values keep
    # relative accuracy
    def f(x):
        return _min_gain_r2_pdf(x, n, m, d_min) * sp.gammaincc(k / 2.0, x * rho / 2.0)

    val, _ = integrate.quad(f, 0.0, np.inf, **_QUAD_OPTS)
    return val


def _b_quadrature(rho, n, k, m, w):
    beta = rho * sp.gamma(k / 2.0 + 1.0) ** (2.0 / k) * w * w / (2.0 * pi)

    def f(x):
        return _max_gain_pdf(x, n, m) * (1.0 - sp.gammaincc(k / 2.0, beta * x))

    val, _ = integrate.quad(f, 0.0, np.inf, **_QUAD_OPTS)
    return val


def _b_quadrature_complement(rho, n, k, m, w):
    beta = rho * sp.gamma(k / 2.0 + 1.0) ** (2.0 / k) * w * w / (2.0 * pi)

    def f(x):
        return _max_gain_pdf(x, n, m) * sp.gammaincc(k / 2.0, beta * x)

    val, _ = integrate.quad(f, 0.0, np.inf, **_QUAD_OPTS)
    return val


# ---------------------------------------------------------------------------
# Monte Carlo expectation
# ---------------------------------------------------------------------------

def numeric_expectation(inner, l, m, n, samples, stream: RandomStream,
                        batch_size: int = MC_BATCH):
    """Monte Carlo estimate of E[inner(H)^l] with its standard error.

    ``inner`` maps a (batch, n) array of power gains to per-sample values in
    [0, 1].  Gains for batch i come from the stream's substream i, so the
    estimate is independent of any parallel partitioning into batches and is
    bit-reproducible for a fixed seed.
    """
    if samples < 1000:
        raise DomainError(f"need at least 1e3 samples, got {samples}")
    remaining = int(samples)
    total = 0.0
    total_sq = 0.0
    index = 0
    while remaining > 0:
        size = min(batch_size, remaining)
        rng = stream.substream(index)
        gamma = rng.gamma(m, 1.0 / m, size=(size, n))
        vals = np.asarray(inner(gamma), dtype=float) ** l
        total += float(vals.sum())
        total_sq += float((vals * vals).sum())
        remaining -= size
        index += 1
    mean = total / samples
    var = max(0.0, (total_sq - samples * mean * mean) / max(1, samples - 1))
    return mean, math.sqrt(var / samples)


def _mc_error_probability(complement, l, m, n, samples, stream: RandomStream,
                          batch_size: int = MC_BATCH):
    """Estimate E[1 - (1 - c(H))^l] where ``complement`` returns c(H) in
    [0, 1]; evaluated through log1p/expm1 so tiny error probabilities are
    not lost to cancellation."""
    if samples < 1000:
        raise DomainError(f"need at least 1e3 samples, got {samples}")
    remaining = int(samples)
    total = 0.0
    total_sq = 0.0
    index = 0
    while remaining > 0:
        size = min(batch_size, remaining)
        rng = stream.substream(index)
        gamma = rng.gamma(m, 1.0 / m, size=(size, n))
        c = np.clip(np.asarray(complement(gamma), dtype=float), 0.0, 1.0)
        with np.errstate(divide="ignore", invalid="ignore"):
            vals = -np.expm1(l * np.log1p(-c))
        vals = np.where(c >= 1.0, 1.0, vals)
        total += float(vals.sum())
        total_sq += float((vals * vals).sum())
        remaining -= size
        index += 1
    mean = total / samples
    var = max(0.0, (total_sq - samples * mean * mean) / max(1, samples - 1))
    return mean, math.sqrt(var / samples)


# ---------------------------------------------------------------------------
# kernels
# ---------------------------------------------------------------------------

def _require(cond: bool, msg: str) -> None:
    if not cond:
        raise ParameterUnsupported(msg)


def func_a(params: BoundParams, k: int, method: str = "auto",
           samples: int = DEFAULT_MC_SAMPLES, seed: int = 0) -> float:
    """E[(packing-sphere integral in k dimensions)^L] over the fading law.

    ``method``: "closed" (k even, integer m), "quadrature" (any parameters,
    deterministic), "mc", or "auto" = closed when eligible else quadrature.
    """
    if not 1 <= k <= params.n:
        raise DomainError(f"k must be in 1..{params.n}, got {k}")
    eligible = k % 2 == 0 and params.m_is_integer
    if method == "auto":
        method = "closed" if eligible else "quadrature"
    if method == "closed":
        _require(eligible, f"closed form needs even k and integer m (k={k}, m={params.m})")
        mi = int(round(params.m))
        _check_summand_cap(_a_summand_count(params.l, k, mi, params.n))
        if params.l == 1:
            return 1.0 + _a_qsum_f64(params.rho, params.n, k, 1, mi, params.d_min)
        return 1.0 + _a_qsum_mp(params.rho, params.n, k, params.l, mi, params.d_min)
    if method == "quadrature":
        return _a_quadrature(params.rho, params.n, k, params.l, params.m, params.d_min)
    if method == "mc":
        mean, _ = numeric_expectation(
            lambda g: 1.0 - sp.gammaincc(k / 2.0, packing_radius_sq(g, params.d_min)
                                         * params.rho / 2.0),
            params.l, params.m, params.n, samples, RandomStream(seed))
        return mean
    raise DomainError(f"unknown method {method!r}")


def func_b(params: BoundParams, k: int, method: str = "auto",
           samples: int = DEFAULT_MC_SAMPLES, seed: int = 0) -> float:
    """E[volume-matched k-sphere integral] over the max-gain law (L plays no
    role here; the kernel is linear in the integral)."""
    if not 1 <= k <= params.n - 1:
        raise DomainError(f"k must be in 1..{params.n - 1}, got {k}")
    eligible = k % 2 == 0 and params.m_is_integer
    if method == "auto":
        method = "closed" if eligible else "quadrature"
    if method == "closed":
        _require(eligible, f"closed form needs even k and integer m (k={k}, m={params.m})")
        mi = int(round(params.m))
        _check_summand_cap(2 * sum(compositions_count(q, mi) for q in range(1, params.n + 1)))
        return 1.0 - _b_complement_f64(params.rho, params.n, k, mi, params.w)
    if method == "quadrature":
        return _b_quadrature(params.rho, params.n, k, params.m, params.w)
    if method == "mc":
        mean, _ = numeric_expectation(
            lambda g: 1.0 - sp.gammaincc(k / 2.0, volume_radius_sq(k, g, params.n, params.w)
                                         * params.rho / 2.0),
            1, params.m, params.n, samples, RandomStream(seed))
        return mean
    raise DomainError(f"unknown method {method!r}")


def _c_qsum(params: BoundParams, route: str, config: SpecialFnConfig) -> float:
    _require(params.n % 2 == 0 and params.m_is_integer,
             f"closed form needs even n and integer m (n={params.n}, m={params.m})")
    mi = int(round(params.m))
    _check_summand_cap(sum(compositions_count(q, params.n // 2) for q in range(1, params.l + 1)))
    if route == "auto":
        route = "hyp2f1" if params.n == 2 else "meijer"
    if route == "hyp2f1":
        _require(params.n == 2, "the 2F1 route exists only for n = 2")
        if params.l == 1:
            return _c_qsum_hyp_f64(params.rho, 1, mi)
        return _c_qsum_hyp_mp(params.rho, params.l, mi)
    if route == "meijer":
        if params.l == 1:
            return _c_qsum_meijer_f64(params.rho, params.n, 1, mi, config)
        return _c_qsum_meijer_mp(params.rho, params.n, params.l, mi)
    raise DomainError(f"unknown route {route!r}")


def func_c(params: BoundParams, method: str = "auto", route: str = "auto",
           samples: int = DEFAULT_MC_SAMPLES, seed: int = 0,
           config: SpecialFnConfig = DEFAULT_CONFIG) -> float:
    """E[(equal-volume sphere integral)^L] over the geometric-mean law.

    ``route`` picks the closed-form flavor: "hyp2f1" (n = 2 only) or
    "meijer" (any even n); "auto" prefers 2F1 when n = 2.
    """
    eligible = params.n % 2 == 0 and params.m_is_integer
    if method == "auto":
        method = "closed" if eligible else "mc"
    if method == "closed":
        return 1.0 + _c_qsum(params, route, config)
    if method == "mc":
        mean, _ = numeric_expectation(
            lambda g: 1.0 - sp.gammaincc(params.n / 2.0,
                                         volume_radius_sq(params.n, g, params.n, params.w)
                                         * params.rho / 2.0),
            params.l, params.m, params.n, samples, RandomStream(seed))
        return mean
    raise DomainError(f"unknown method {method!r}")


# ---------------------------------------------------------------------------
# bounds
# ---------------------------------------------------------------------------

def closed_form_eligible(params: BoundParams, bound: str) -> bool:
    """Dispatch rule: even n and integer m, plus unit frame length for the
    finite-constellation bounds."""
    base = params.n % 2 == 0 and params.m_is_integer
    if bound in ("slb", "sub"):
        return base
    if bound in ("mslb", "msub"):
        return base and params.l == 1
    raise DomainError(f"unknown bound {bound!r}")


def _resolve_method(params, bound, method):
    if method == "auto":
        return "closed" if closed_form_eligible(params, bound) else "numeric"
    if method == "closed":
        _require(closed_form_eligible(params, bound),
                 f"{bound} closed form not available for n={params.n}, m={params.m}, l={params.l}")
    return method


def slb(params: BoundParams, method: str = "auto", route: str = "auto",
        samples: int = DEFAULT_MC_SAMPLES, seed: int = 0,
        config: SpecialFnConfig = DEFAULT_CONFIG) -> BoundValue:
    """Sphere lower bound on the frame error probability of an infinite
    lattice: one minus the geometric-mean kernel."""
    method = _resolve_method(params, "slb", method)
    if method == "closed":
        return BoundValue(-_c_qsum(params, route, config), "closed-form")
    mean, err = _mc_error_probability(
        lambda g: sp.gammaincc(params.n / 2.0,
                               volume_radius_sq(params.n, g, params.n, params.w)
                               * params.rho / 2.0),
        params.l, params.m, params.n, samples, RandomStream(seed))
    return BoundValue(mean, "numeric", err)


def sub(params: BoundParams, method: str = "auto",
        samples: int = DEFAULT_MC_SAMPLES, seed: int = 0) -> BoundValue:
    """Sphere upper bound on the frame error probability of an infinite
    lattice: one minus the packing kernel at k = n."""
    method = _resolve_method(params, "sub", method)
    if method == "closed":
        mi = int(round(params.m))
        _check_summand_cap(_a_summand_count(params.l, params.n, mi, params.n))
        if params.l == 1:
            q = _a_qsum_f64(params.rho, params.n, params.n, 1, mi, params.d_min)
        else:
            q = _a_qsum_mp(params.rho, params.n, params.n, params.l, mi, params.d_min)
        return BoundValue(-q, "closed-form")
    mean, err = _mc_error_probability(
        lambda g: sp.gammaincc(params.n / 2.0, packing_radius_sq(g, params.d_min)
                               * params.rho / 2.0),
        params.l, params.m, params.n, samples, RandomStream(seed))
    return BoundValue(mean, "numeric", err)


def _finite_weights(n: int, kk: int) -> list[float]:
    # (K-1)^k * C(n, k) / K^n for k = 0..n
    kn = float(kk) ** n
    return [(kk - 1.0) ** k * comb(n, k) / kn for k in range(n + 1)]


def _require_finite_k(params: BoundParams, bound: str) -> int:
    if params.k_per_dim is None:
        raise ParameterUnsupported(f"{bound} needs a finite carving size k_per_dim")
    return params.k_per_dim


def mslb(params: BoundParams, method: str = "auto",
         samples: int = DEFAULT_MC_SAMPLES, seed: int = 0,
         config: SpecialFnConfig = DEFAULT_CONFIG) -> BoundValue:
    """Multiple-sphere lower bound for a K-PAM carving.

    Closed route (l = 1): weighted complements of the max-gain kernels for
    k < n (even k closed, odd k by quadrature) plus the geometric-mean
    kernel complement at k = n.
    """
    kk = _require_finite_k(params, "mslb")
    method = _resolve_method(params, "mslb", method)
    if kk == 1:
        return BoundValue(0.0, "closed-form" if method == "closed" else "numeric")
    if method == "closed":
        weights = _finite_weights(params.n, kk)
        mi = int(round(params.m))
        acc = 0.0
        for k in range(1, params.n):
            if k % 2 == 0:
                compl = _b_complement_f64(params.rho, params.n, k, mi, params.w)
            else:
                compl = _b_quadrature_complement(params.rho, params.n, k, params.m, params.w)
            acc += weights[k] * compl
        acc += weights[params.n] * (-_c_qsum(params, "auto", config))
        return BoundValue(acc, "closed-form")

    weights = np.array(_finite_weights(params.n, kk))

    def complement(gamma):
        c = np.zeros(gamma.shape[0])
        for k in range(1, params.n + 1):
            r2 = volume_radius_sq(k, gamma, params.n, params.w)
            c += weights[k] * sp.gammaincc(k / 2.0, r2 * params.rho / 2.0)
        return c

    mean, err = _mc_error_probability(complement, params.l, params.m, params.n,
                                      samples, RandomStream(seed))
    return BoundValue(mean, "numeric", err)


def msub(params: BoundParams, method: str = "auto",
         samples: int = DEFAULT_MC_SAMPLES, seed: int = 0) -> BoundValue:
    """Multiple-sphere upper bound for a K-PAM carving; mirror of the lower
    bound with every radius replaced by the faded packing radius."""
    kk = _require_finite_k(params, "msub")
    method = _resolve_method(params, "msub", method)
    if kk == 1:
        return BoundValue(0.0, "closed-form" if method == "closed" else "numeric")
    if method == "closed":
        weights = _finite_weights(params.n, kk)
        mi = int(round(params.m))
        acc = 0.0
        for k in range(1, params.n + 1):
            if k % 2 == 0:
                _check_summand_cap(_a_summand_count(1, k, mi, params.n))
                compl = -_a_qsum_f64(params.rho, params.n, k, 1, mi, params.d_min)
            else:
                compl = _a_quadrature_complement(params.rho, params.n, k, params.m,
                                                 params.d_min)
            acc += weights[k] * compl
        return BoundValue(acc, "closed-form")

    weights = np.array(_finite_weights(params.n, kk))

    def complement(gamma):
        r2 = packing_radius_sq(gamma, params.d_min)
        c = np.zeros(gamma.shape[0])
        for k in range(1, params.n + 1):
            c += weights[k] * sp.gammaincc(k / 2.0, r2 * params.rho / 2.0)
        return c

    mean, err = _mc_error_probability(complement, params.l, params.m, params.n,
                                      samples, RandomStream(seed))
    return BoundValue(mean, "numeric", err)
