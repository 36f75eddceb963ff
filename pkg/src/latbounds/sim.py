"""Monte Carlo frame-error-probability estimation with ML decoding.

This is the ground-truth oracle the analytical bounds are checked against.
A frame draws one fading realization, sends L symbols through it, and errs
if any symbol is decoded wrongly.  Decoding is exact nearest-neighbor search
over the faded candidate set: the full carving for finite constellations,
and a windowed neighborhood of the origin for infinite lattices (transmitting
the origin only is enough there, because an infinite lattice looks the same
from every point, so the error probability does not depend on the sent
point).

Randomness contract: frame i draws from a Philox substream keyed by
(seed, i), in the fixed order gains, data, noise, so results are bit-identical
for a fixed seed regardless of chunking or worker count.
"""

from __future__ import annotations

import itertools
import warnings
from dataclasses import dataclass
from math import sqrt

import numpy as np
from scipy import special as sp

from .channel import ChannelParams
from .errors import DomainError, EmptyCandidates, TooLarge, WindowSuspect
from .lattice import ENUMERATION_CAP, Constellation, enumerate_points

_SCORE_BUDGET = 20_000_000  # max elements in one decode-score block


@dataclass(frozen=True)
class SimConfig:
    """Simulation knobs: frame count, base seed, decode window radius for
    infinite lattices, and the confidence level for reported intervals."""

    frames: int = 10_000
    seed: int = 0
    decode_window: int = 4
    ci_level: float = 0.95

    def __post_init__(self):
        if self.frames < 1:
            raise DomainError(f"frames must be >= 1, got {self.frames}")
        if self.decode_window < 1:
            raise DomainError(f"decode_window must be >= 1, got {self.decode_window}")
        if not 0.0 < self.ci_level < 1.0:
            raise DomainError(f"ci_level must be in (0, 1), got {self.ci_level}")


@dataclass(frozen=True)
class FepEstimate:
    """Estimated frame error probability with its binomial standard error.

    ``boundary_fraction`` is the window-sufficiency diagnostic for infinite
    lattices: the fraction of erroneous frames whose winning candidate sits
    on the decode-window boundary (always 0 for finite constellations).
    """

    fep: float
    stderr: float
    frames: int
    errors: int
    boundary_fraction: float = 0.0

    def wilson_interval(self, level: float = 0.95) -> tuple[float, float]:
        z = float(sp.ndtri(0.5 + level / 2.0))
        n = self.frames
        p = self.fep
        denom = 1.0 + z * z / n
        center = (p + z * z / (2.0 * n)) / denom
        half = z * sqrt(p * (1.0 - p) / n + z * z / (4.0 * n * n)) / denom
        return max(0.0, center - half), min(1.0, center + half)


def ml_decode(y, candidates) -> int:
    """Index of the candidate nearest to y; ties go to the lowest index."""
    cand = np.asarray(candidates, dtype=float)
    if cand.ndim != 2 or cand.shape[0] == 0:
        raise EmptyCandidates("need a non-empty 2-d candidate array")
    yv = np.asarray(y, dtype=float)
    if yv.shape != (cand.shape[1],):
        raise DomainError(f"received vector shape {yv.shape} does not match candidates")
    d2 = np.einsum("ij,ij->i", cand - yv, cand - yv)
    return int(np.argmin(d2))


def _estimate(errors: int, frames: int, boundary_frames: int = 0) -> FepEstimate:
    fep = errors / frames
    stderr = sqrt(fep * (1.0 - fep) / frames)
    bf = boundary_frames / errors if errors else 0.0
    return FepEstimate(fep=fep, stderr=stderr, frames=frames, errors=errors,
                       boundary_fraction=bf)


class _SequentialSubstreams:
    """Per-frame substreams for the tight simulation loops.

    Draws are bit-identical to RandomStream.substream(i) (same Philox keying)
    but a single bit generator is re-keyed in place, which avoids the
    per-construction entropy fetch.  Only valid for strictly sequential use.
    """

    def __init__(self, seed: int):
        self._seed = int(seed) & (2**64 - 1)
        self._bg = np.random.Philox(key=[0, 0])
        self._gen = np.random.Generator(self._bg)
        self._proto = self._bg.state
        self._proto["state"]["counter"] = np.zeros(4, dtype=np.uint64)
        self._proto["buffer"] = np.zeros(4, dtype=np.uint64)
        self._proto["buffer_pos"] = 4
        self._proto["has_uint32"] = 0
        self._proto["uinteger"] = 0

    def frame(self, index: int) -> np.random.Generator:
        self._proto["state"]["key"] = np.array([self._seed, index], dtype=np.uint64)
        self._bg.state = self._proto
        return self._gen


def _chunk_frames(total_frames: int, n_candidates: int, l: int) -> int:
    return max(1, min(total_frames, _SCORE_BUDGET // max(1, n_candidates * l)))


def simulate_fep_finite(c: Constellation, ch: ChannelParams, cfg: SimConfig) -> FepEstimate:
    """FEP of a K-PAM carving: uniform random points, exhaustive ML decoding
    over all K^N faded candidates."""
    if not c.is_finite:
        raise TooLarge("use simulate_fep_infinite for infinite lattices")
    if ch.n != c.n:
        raise DomainError(f"channel has {ch.n} blocks but lattice dimension is {c.n}")
    points = enumerate_points(c)  # raises TooLarge above the cap
    n_points = points.shape[0]
    # score of candidate p is ||y - h*p||^2 - ||y||^2 = (h^2).p^2 - 2 (y*h).p,
    # computed for all candidates as one GEMM against [p | p^2]
    cand_aug = np.concatenate([points, points * points], axis=1).T  # (2n, points)
    sigma = ch.sigma
    streams = _SequentialSubstreams(cfg.seed)
    chunk = _chunk_frames(cfg.frames, n_points, ch.l)

    errors = 0
    for start in range(0, cfg.frames, chunk):
        size = min(chunk, cfg.frames - start)
        gains = np.empty((size, c.n))
        idx_true = np.empty((size, ch.l), dtype=np.int64)
        noise = np.empty((size, ch.l, c.n))
        for i in range(size):
            rng = streams.frame(start + i)
            gains[i] = np.sqrt(rng.gamma(ch.m, 1.0 / ch.m, size=c.n))
            idx_true[i] = rng.integers(0, n_points, size=ch.l)
            noise[i] = rng.standard_normal((ch.l, c.n))
        y = gains[:, None, :] * points[idx_true] + sigma * noise
        v = np.empty((size, ch.l, 2 * c.n))
        v[:, :, : c.n] = -2.0 * y * gains[:, None, :]
        v[:, :, c.n:] = (gains * gains)[:, None, :]
        scores = v.reshape(size * ch.l, 2 * c.n) @ cand_aug
        decoded = scores.argmin(axis=1).reshape(size, ch.l)
        errors += int(np.count_nonzero(np.any(decoded != idx_true, axis=1)))
    return _estimate(errors, cfg.frames)


def _window_vectors(n: int, window: int) -> np.ndarray:
    count = (2 * window + 1) ** n
    if count > ENUMERATION_CAP:
        raise TooLarge(f"(2*window+1)^n = {count} exceeds the cap {ENUMERATION_CAP}")
    z = np.array(list(itertools.product(range(-window, window + 1), repeat=n)),
                 dtype=float)
    return z


def simulate_fep_infinite(c: Constellation, ch: ChannelParams, cfg: SimConfig) -> FepEstimate:
    """FEP of an infinite lattice: the origin is transmitted and a frame errs
    when any symbol decodes to a nonzero lattice point inside the window.

    Emits a WindowSuspect warning when more than 1% of erroneous frames were
    decided by a candidate on the window boundary, which signals that the
    window may be clipping genuine error events.
    """
    if ch.n != c.n:
        raise DomainError(f"channel has {ch.n} blocks but lattice dimension is {c.n}")
    z = _window_vectors(c.n, cfg.decode_window)
    boundary_mask = np.max(np.abs(z), axis=1) == cfg.decode_window
    cand = z @ c.generator.matrix.T                 # unfaded candidates
    cand_aug = np.concatenate([cand, cand * cand], axis=1).T
    origin = int(np.flatnonzero(~np.any(z != 0, axis=1))[0])
    sigma = ch.sigma
    streams = _SequentialSubstreams(cfg.seed)
    chunk = _chunk_frames(cfg.frames, cand.shape[0], ch.l)

    errors = 0
    boundary_frames = 0
    for start in range(0, cfg.frames, chunk):
        size = min(chunk, cfg.frames - start)
        gains = np.empty((size, c.n))
        noise = np.empty((size, ch.l, c.n))
        for i in range(size):
            rng = streams.frame(start + i)
            gains[i] = np.sqrt(rng.gamma(ch.m, 1.0 / ch.m, size=c.n))
            noise[i] = rng.standard_normal((ch.l, c.n))
        v = np.empty((size, ch.l, 2 * c.n))
        v[:, :, : c.n] = (-2.0 * sigma) * noise * gains[:, None, :]  # sent point is 0
        v[:, :, c.n:] = (gains * gains)[:, None, :]
        scores = v.reshape(size * ch.l, 2 * c.n) @ cand_aug
        decoded = scores.argmin(axis=1).reshape(size, ch.l)
        frame_err = np.any(decoded != origin, axis=1)
        errors += int(np.count_nonzero(frame_err))
        wrong = (decoded != origin) & boundary_mask[decoded]
        boundary_frames += int(np.count_nonzero(np.any(wrong, axis=1) & frame_err))
    est = _estimate(errors, cfg.frames, boundary_frames)
    if est.errors and est.boundary_fraction > 0.01:
        warnings.warn(
            f"{est.boundary_fraction:.1%} of error frames were decided at the "
            f"decode-window boundary (window={cfg.decode_window}); the FEP "
            "estimate may be biased low",
            WindowSuspect,
            stacklevel=2,
        )
    return est
