"""Special-function layer used by the closed-form bounds.

Scalar double-precision routines: regularized upper incomplete gamma, real
Gauss hypergeometric 2F1, the g-integral that closes the max-gain
expectation, a Meijer G evaluator for the repeated-parameter pattern
G^{N,N}_{N,N}[x | (1-Q)/N..(N-Q)/N ; m..m], and weak-composition enumeration
for the multinomial sums.

The incomplete gamma and 2F1 are delegated to scipy.special, whose
implementations are the standard series/continued-fraction and
series-plus-transformation algorithms; this module adds the domain contracts.
Meijer G has no scipy equivalent and is evaluated here by numerical
Mellin-Barnes integration on a vertical line.  A vertical contour never
touches the order-N coincident poles that the repeated b-parameters create,
which is what makes it preferable to residue summation for this pattern.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Iterator

import numpy as np
from scipy import special as sp

from .errors import ContourFailure, DomainError


@dataclass(frozen=True)
class SpecialFnConfig:
    """Tolerances and contour parameters for the special-function layer."""

    series_tol: float = 1e-12
    max_terms: int = 100_000
    contour_height: float = 60.0
    contour_step: float = 0.05

    def __post_init__(self):
        if min(self.series_tol, self.max_terms, self.contour_height, self.contour_step) <= 0:
            raise DomainError("all SpecialFnConfig fields must be positive")
        if self.series_tol >= 1e-6:
            raise DomainError("series_tol must be below 1e-6")


DEFAULT_CONFIG = SpecialFnConfig()


def upper_gamma_reg(a: float, x: float) -> float:
    """Regularized upper incomplete gamma Gamma(a, x)/Gamma(a) in [0, 1]."""
    if a <= 0:
        raise DomainError(f"shape must be positive, got a={a}")
    if x < 0:
        raise DomainError(f"argument must be non-negative, got x={x}")
    return float(sp.gammaincc(a, x))


def gauss_2f1(a: float, b: float, c: float, z: float) -> float:
    """Real Gauss hypergeometric 2F1(a, b; c; z) for z < 1."""
    if z >= 1.0:
        raise DomainError(f"2F1 is evaluated on the real axis z < 1 only, got z={z}")
    if c <= 0 and c == int(c):
        raise DomainError(f"c={c} is a pole of 2F1")
    val = float(sp.hyp2f1(a, b, c, z))
    if not math.isfinite(val):
        raise DomainError(f"2F1({a}, {b}; {c}; {z}) did not evaluate to a finite value")
    return val


def g_integral(alpha: float, beta: float, p: float, nu: float) -> float:
    """Closed form of int_0^inf x^(alpha-1) Gamma(nu, beta x) exp(-p x) dx.

    Equals Gamma(nu) Gamma(alpha) / p^alpha minus the hypergeometric
    correction beta^nu Gamma(alpha+nu) / (nu p^(alpha+nu)) *
    2F1(nu, alpha+nu; nu+1; -beta/p).
    """
    if min(alpha, beta, p, nu) <= 0:
        raise DomainError("g_integral parameters must all be positive")
    f = gauss_2f1(nu, alpha + nu, nu + 1.0, -beta / p)
    log_t1 = nu * math.log(beta) + sp.gammaln(alpha + nu) - math.log(nu) \
        - (alpha + nu) * math.log(p)
    log_t2 = sp.gammaln(nu) + sp.gammaln(alpha) - alpha * math.log(p)
    # factor out the larger magnitude so huge Gamma values cannot overflow
    ref = max(log_t1, log_t2)
    return float(math.exp(ref) * (math.exp(log_t2 - ref) - math.exp(log_t1 - ref) * f))


def meijer_g_nn(n: int, m: int, q_coef: float, x: float,
                config: SpecialFnConfig = DEFAULT_CONFIG) -> float:
    """Meijer G^{n,n}_{n,n}[x | a_j=(j-Q)/n, j=1..n ; b_j=m, j=1..n].

    Evaluated as the Mellin-Barnes integral over the vertical line
    Re(s) = c with -Q/n < c < m (right of all poles of the Gamma(1-a_j+s)
    factors, left of the poles of Gamma(m-s)), by trapezoid quadrature
    truncated at |Im(s)| <= contour_height.  The integrand decays like
    exp(-pi n |t|), so the truncation check is conservative.
    """
    if n < 1 or m < 1 or int(m) != m:
        raise DomainError(f"need integer order n >= 1 and integer shape m >= 1, got n={n}, m={m}")
    if x <= 0:
        raise DomainError(f"argument must be positive, got x={x}")
    if q_coef < 0:
        raise DomainError(f"Q must be non-negative, got {q_coef}")
    a = (np.arange(1, n + 1) - q_coef) / n
    left_edge = -q_coef / n
    c = 0.5 * (left_edge + m)
    t = np.arange(0.0, config.contour_height + 0.5 * config.contour_step,
                  config.contour_step)
    s = c + 1j * t
    log_f = n * sp.loggamma(m - s) + s * math.log(x)
    for aj in a:
        log_f = log_f + sp.loggamma(1.0 - aj + s)
    f = np.exp(log_f)
    mags = np.abs(f)
    scale = float(mags.max())
    if scale > 0 and float(mags[-1]) > 1e-10 * scale:
        raise ContourFailure(
            f"contour tail magnitude {mags[-1]:.3e} exceeds 1e-10 of peak {scale:.3e}; "
            "increase contour_height"
        )
    return float(config.contour_step / math.pi * (0.5 * f[0].real + f[1:].real.sum()))


def compositions(q: int, t: int) -> Iterator[tuple[int, ...]]:
    """All weak compositions of q into t ordered parts, lexicographically."""
    if t < 1 or q < 0:
        raise DomainError(f"need t >= 1 and q >= 0, got q={q}, t={t}")
    yield from _compositions(q, t)


def _compositions(q: int, t: int) -> Iterator[tuple[int, ...]]:
    if t == 1:
        yield (q,)
        return
    for first in range(q + 1):
        for rest in _compositions(q - first, t - 1):
            yield (first,) + rest


def compositions_count(q: int, t: int) -> int:
    """Stars-and-bars count C(q + t - 1, t - 1)."""
    return math.comb(q + t - 1, t - 1)
