"""Lattice constellations: generators, carvings, and geometric parameters.

A lattice is described by a square generator matrix whose *columns* are the
basis vectors; the package convention normalizes every generator to unit
absolute determinant, so the fundamental cell always has volume one.  Finite
constellations are K-PAM carvings: the K^N points M u with integer
coordinates u_i in {0, ..., K-1}.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass
from functools import cached_property
from pathlib import Path

import numpy as np

from .errors import (
    DegenerateConstellation,
    DimensionMismatch,
    NotOrthogonal,
    SingularMatrix,
    TooLarge,
    UnsupportedDimension,
)

DET_TOL = 1e-12
ORTHOGONALITY_TOL = 1e-9
ENUMERATION_CAP = 2**24
DEFAULT_SEARCH_WINDOW = 3


def _freeze(a: np.ndarray) -> np.ndarray:
    out = np.array(a, dtype=float, copy=True)
    out.setflags(write=False)
    return out


@dataclass(frozen=True)
class GeneratorMatrix:
    """Unit-determinant lattice generator; columns are the basis vectors."""

    matrix: np.ndarray

    def __post_init__(self):
        m = np.asarray(self.matrix, dtype=float)
        if m.ndim != 2 or m.shape[0] != m.shape[1]:
            raise DimensionMismatch(f"generator must be square, got shape {m.shape}")
        if not np.all(np.isfinite(m)):
            raise SingularMatrix("generator has non-finite entries")
        det = abs(float(np.linalg.det(m)))
        if det <= DET_TOL:
            raise SingularMatrix(f"generator is singular (|det| = {det:.3e})")
        if abs(det - 1.0) > 1e-10:
            raise SingularMatrix(
                f"generator must have |det| = 1 (got {det!r}); "
                "run normalize_generator first"
            )
        object.__setattr__(self, "matrix", _freeze(m))

    @property
    def n(self) -> int:
        return self.matrix.shape[0]

    def column_norms(self) -> np.ndarray:
        return np.linalg.norm(self.matrix, axis=0)


@dataclass(frozen=True)
class Constellation:
    """A lattice together with its carving size.

    ``k_per_dim`` is the number of points per basis direction; ``None`` means
    the infinite lattice.  ``d_min`` and ``w`` are cached on first access.
    """

    generator: GeneratorMatrix
    k_per_dim: int | None = None

    def __post_init__(self):
        k = self.k_per_dim
        if k is not None and (not isinstance(k, (int, np.integer)) or k < 1):
            raise DimensionMismatch(f"k_per_dim must be a positive integer or None, got {k!r}")

    @property
    def n(self) -> int:
        return self.generator.n

    @property
    def is_finite(self) -> bool:
        return self.k_per_dim is not None

    @cached_property
    def d_min(self) -> float:
        return min_distance(self)

    @cached_property
    def w(self) -> float:
        return mean_basis_norm(self)


@dataclass(frozen=True)
class FadedConstellation:
    """A constellation as seen through one block-fading realization."""

    base: Constellation
    h: np.ndarray
    faded_generator: np.ndarray

    @classmethod
    def from_fading(cls, base: Constellation, h) -> "FadedConstellation":
        hv = np.asarray(getattr(h, "h", h), dtype=float)
        if hv.shape != (base.n,):
            raise DimensionMismatch(
                f"fading vector has shape {hv.shape}, lattice dimension is {base.n}"
            )
        faded = hv[:, None] * base.generator.matrix
        return cls(base=base, h=_freeze(hv), faded_generator=_freeze(faded))

    def __post_init__(self):
        expected = np.asarray(self.h)[:, None] * self.base.generator.matrix
        if np.max(np.abs(expected - self.faded_generator)) > 1e-12:
            raise DimensionMismatch("faded_generator is not diag(h) @ generator")


def normalize_generator(raw) -> GeneratorMatrix:
    """Scale a raw basis matrix to unit absolute determinant."""
    m = np.asarray(raw, dtype=float)
    if m.ndim != 2 or m.shape[0] != m.shape[1]:
        raise DimensionMismatch(f"generator must be square, got shape {m.shape}")
    det = abs(float(np.linalg.det(m)))
    if det <= DET_TOL:
        raise SingularMatrix(f"cannot normalize a singular matrix (|det| = {det:.3e})")
    return GeneratorMatrix(m / det ** (1.0 / m.shape[0]))


def zn_generator(n: int) -> GeneratorMatrix:
    """Identity generator of the integer lattice (d_min = 1, W = 1)."""
    if n < 1:
        raise UnsupportedDimension(f"dimension must be >= 1, got {n}")
    return GeneratorMatrix(np.eye(n))


def _cyclotomic_rotation(n: int) -> np.ndarray:
    """Full-diversity orthogonal rotation of the integer lattice.

    n = 2 and n = 8 use the classical prime construction with p = 2n + 1:
    R[i, j] = 2/sqrt(p) * sin(2 pi i j / p).  For n = 2 this attains the
    largest possible minimum product distance, 1/sqrt(5).

    n = 4 comes from the degree-4 totally real field generated by
    2 cos(pi/8): embed the power basis, twist by 2 - theta, and apply a fixed
    unimodular change of basis that makes the Gram matrix the identity (see
    scripts/derive_rotations.py).  Its minimum product distance is
    sqrt(2)/64, nonzero by the field-norm argument, so diversity is full.
    """
    if n in (2, 8):
        p = 2 * n + 1
        j = np.arange(1, n + 1)
        return 2.0 / np.sqrt(p) * np.sin(2.0 * np.pi * np.outer(j, j) / p)
    if n == 4:
        k = np.arange(1, 5)
        theta = 2.0 * np.cos((2.0 * k - 1.0) * np.pi / 8.0)
        basis = np.stack([theta**j for j in range(4)], axis=1)
        embedded = np.sqrt((2.0 - theta) / 8.0)[:, None] * basis
        change = np.array(
            [[-1, -1, -1, -1], [-2, -1, 0, 1], [1, 0, 0, 1], [1, 0, 0, 0]]
        )
        return embedded @ change
    raise UnsupportedDimension(f"no built-in rotation for dimension {n}")


def rotated_zn_generator(n: int, rotation="cyclotomic") -> GeneratorMatrix:
    """Orthogonal rotation of the integer lattice.

    ``rotation`` is either the name of the built-in ("cyclotomic") or an
    explicit orthogonal matrix.  d_min and W are both 1 either way.
    """
    if n not in (2, 4, 8):
        raise UnsupportedDimension(f"supported dimensions are 2, 4, 8; got {n}")
    if isinstance(rotation, str):
        if rotation != "cyclotomic":
            raise UnsupportedDimension(f"unknown built-in rotation {rotation!r}")
        q = _cyclotomic_rotation(n)
    else:
        q = np.asarray(rotation, dtype=float)
        if q.shape != (n, n):
            raise DimensionMismatch(f"rotation must be {n}x{n}, got {q.shape}")
        err = float(np.max(np.abs(q.T @ q - np.eye(n))))
        if err > ORTHOGONALITY_TOL:
            raise NotOrthogonal(f"max |Q^T Q - I| = {err:.3e} exceeds {ORTHOGONALITY_TOL}")
    return GeneratorMatrix(q)


def a2_generator() -> GeneratorMatrix:
    """Hexagonal lattice generator, already scaled to unit determinant."""
    s3 = np.sqrt(3.0)
    m = np.array(
        [
            [np.sqrt(2.0 / s3), np.sqrt(1.0 / (2.0 * s3))],
            [0.0, np.sqrt(3.0 / (2.0 * s3))],
        ]
    )
    return GeneratorMatrix(m)


def _difference_vectors(n: int, window: int, chunk_rows: int = 1_000_000):
    """Yield chunks of nonzero integer vectors with max-norm <= window."""
    side = 2 * window + 1
    per_row = side ** (n - 1)
    row_batch = max(1, chunk_rows // per_row)
    rest = [np.arange(-window, window + 1)] * (n - 1)
    for start in range(-window, window + 1, row_batch):
        firsts = np.arange(start, min(start + row_batch, window + 1))
        grids = np.meshgrid(firsts, *rest, indexing="ij")
        z = np.stack([g.ravel() for g in grids], axis=1)
        z = z[np.any(z != 0, axis=1)]
        if z.size:
            yield z


def min_distance(c: Constellation, window: int = DEFAULT_SEARCH_WINDOW) -> float:
    """Minimum Euclidean distance between distinct constellation points.

    Pairwise distances over the carving reduce exactly to norms of M z over
    nonzero integer difference vectors z with |z_i| <= K - 1, so the search
    runs over that box (capped at ``window`` per coordinate, which is where
    the shortest vector lies for every generator in scope; widen ``window``
    to verify convergence).
    """
    if c.is_finite:
        if c.k_per_dim < 2:
            raise DegenerateConstellation("minimum distance needs at least two points")
        span = min(c.k_per_dim - 1, window)
    else:
        if window < 1:
            raise DegenerateConstellation("search window must be >= 1")
        span = window
    m = c.generator.matrix
    best = np.inf
    for z in _difference_vectors(c.n, span):
        d2 = np.einsum("ij,ij->i", z @ m.T, z @ m.T)
        best = min(best, float(d2.min()))
    return float(np.sqrt(best))


def mean_basis_norm(c: Constellation) -> float:
    """Arithmetic mean of the basis-vector norms."""
    return float(c.generator.column_norms().mean())


def enumerate_points(c: Constellation, cap: int = ENUMERATION_CAP) -> np.ndarray:
    """All K^N carving points M u, one per row, in lexicographic u order."""
    if not c.is_finite:
        raise TooLarge("cannot enumerate an infinite lattice")
    count = c.k_per_dim**c.n
    if count > cap:
        raise TooLarge(f"K^N = {count} exceeds the enumeration cap {cap}")
    u = np.array(list(itertools.product(range(c.k_per_dim), repeat=c.n)), dtype=float)
    if u.size == 0:
        u = u.reshape(0, c.n)
    return u @ c.generator.matrix.T


def save_generator(g: GeneratorMatrix, path) -> None:
    """Write the plain-text format: dimension line, then row-major entries."""
    lines = [str(g.n)]
    for row in g.matrix:
        lines.append(" ".join(f"{v:.17g}" for v in row))
    Path(path).write_text("\n".join(lines) + "\n")


def load_generator(path) -> GeneratorMatrix:
    """Read the plain-text format and normalize to unit determinant."""
    tokens = Path(path).read_text().split()
    if not tokens:
        raise SingularMatrix(f"empty generator file {path}")
    n = int(tokens[0])
    vals = [float(t) for t in tokens[1:]]
    if len(vals) != n * n:
        raise DimensionMismatch(
            f"expected {n * n} entries for a {n}x{n} generator, got {len(vals)}"
        )
    return normalize_generator(np.array(vals).reshape(n, n))
