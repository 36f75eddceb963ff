import itertools
import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from latbounds.errors import (
    DegenerateConstellation,
    DimensionMismatch,
    NotOrthogonal,
    SingularMatrix,
    TooLarge,
    UnsupportedDimension,
)
from latbounds.lattice import (
    Constellation,
    FadedConstellation,
    GeneratorMatrix,
    a2_generator,
    enumerate_points,
    load_generator,
    mean_basis_norm,
    min_distance,
    normalize_generator,
    rotated_zn_generator,
    save_generator,
    zn_generator,
)


def pairwise_min_distance(points: np.ndarray) -> float:
    """Independent oracle: exhaustive distances over all point pairs."""
    best = np.inf
    for i in range(len(points)):
        for j in range(i + 1, len(points)):
            best = min(best, float(np.linalg.norm(points[i] - points[j])))
    return best


class TestNormalize:
    def test_identity_unchanged(self):
        g = normalize_generator(np.eye(2))
        assert np.allclose(g.matrix, np.eye(2), atol=1e-15)

    def test_scaled_identity(self):
        g = normalize_generator(2.0 * np.eye(2))
        assert np.allclose(g.matrix, np.eye(2), atol=1e-15)

    def test_a2_already_unit(self):
        raw = a2_generator().matrix
        assert abs(abs(np.linalg.det(raw)) - 1.0) < 1e-12
        assert np.allclose(normalize_generator(raw).matrix, raw, atol=1e-12)

    def test_singular_raises(self):
        with pytest.raises(SingularMatrix):
            normalize_generator(np.ones((3, 3)))

    def test_non_square_raises(self):
        with pytest.raises(DimensionMismatch):
            normalize_generator(np.ones((2, 3)))

    @settings(max_examples=40, deadline=None)
    @given(st.integers(0, 10_000))
    def test_idempotent(self, seed):
        rng = np.random.default_rng(seed)
        raw = rng.normal(size=(3, 3))
        if abs(np.linalg.det(raw)) < 1e-6:
            return
        once = normalize_generator(raw).matrix
        twice = normalize_generator(once).matrix
        assert np.max(np.abs(once - twice)) < 1e-12


class TestGenerators:
    def test_zn_examples(self):
        g = zn_generator(2)
        c = Constellation(g)
        assert np.array_equal(g.matrix, np.eye(2))
        assert c.d_min == pytest.approx(1.0, abs=1e-12)
        assert c.w == pytest.approx(1.0, abs=1e-15)
        assert np.array_equal(zn_generator(1).matrix, np.eye(1))
        assert np.array_equal(zn_generator(8).matrix, np.eye(8))

    @pytest.mark.parametrize("n", [2, 4, 8])
    def test_builtin_rotation_orthogonal(self, n):
        g = rotated_zn_generator(n)
        assert np.max(np.abs(g.matrix.T @ g.matrix - np.eye(n))) < 1e-12
        c = Constellation(g)
        assert c.d_min == pytest.approx(1.0, abs=1e-9)
        assert c.w == pytest.approx(1.0, abs=1e-12)

    def test_builtin_rotation_n2_maximizes_product_distance(self):
        # oracle: scan rotation angles for the best worst-case coordinate
        # product over a window of integer vectors
        def min_prod(rot, window=4):
            z = np.array([v for v in itertools.product(range(-window, window + 1), repeat=2)
                          if v != (0, 0)])
            return np.abs(np.prod(z @ rot.T, axis=1)).min()

        best = max(min_prod(np.array([[np.cos(t), -np.sin(t)], [np.sin(t), np.cos(t)]]))
                   for t in np.linspace(0.01, np.pi / 4, 2000))
        built_in = min_prod(rotated_zn_generator(2).matrix, window=5)
        assert built_in == pytest.approx(1.0 / math.sqrt(5.0), abs=1e-12)
        assert built_in >= best - 1e-3

    @pytest.mark.parametrize("n", [4, 8])
    def test_builtin_rotation_full_diversity(self, n):
        rot = rotated_zn_generator(n).matrix
        window = 3 if n == 4 else 1
        z = np.array([v for v in itertools.product(range(-window, window + 1), repeat=n)
                      if any(v)])
        assert np.abs(np.prod(z @ rot.T, axis=1)).min() > 1e-7

    def test_user_identity_rotation_allowed(self):
        g = rotated_zn_generator(2, np.eye(2))
        assert np.array_equal(g.matrix, np.eye(2))

    def test_user_rotation_not_orthogonal(self):
        q = np.eye(2) + 0.1
        with pytest.raises(NotOrthogonal):
            rotated_zn_generator(2, q)

    def test_unsupported_dimension(self):
        with pytest.raises(UnsupportedDimension):
            rotated_zn_generator(3)

    def test_a2_matrix_exact(self):
        s3 = math.sqrt(3.0)
        expected = np.array(
            [[math.sqrt(2.0 / s3), math.sqrt(1.0 / (2.0 * s3))],
             [0.0, math.sqrt(3.0 / (2.0 * s3))]]
        )
        g = a2_generator()
        assert np.max(np.abs(g.matrix - expected)) == 0.0
        assert abs(abs(np.linalg.det(g.matrix)) - 1.0) < 1e-12


class TestMinDistance:
    @pytest.mark.parametrize("k", [2, 3, 8])
    def test_zn_carving(self, k):
        assert min_distance(Constellation(zn_generator(2), k)) == pytest.approx(1.0)

    def test_rotation_preserves_distance(self):
        base = Constellation(zn_generator(2), 4)
        rot = Constellation(rotated_zn_generator(2), 4)
        assert min_distance(rot) == pytest.approx(min_distance(base), abs=1e-9)

    def test_random_orthogonal_invariance(self, rng):
        q, _ = np.linalg.qr(rng.normal(size=(3, 3)))
        raw = rng.normal(size=(3, 3)) + 2 * np.eye(3)
        g = normalize_generator(raw)
        g_rot = GeneratorMatrix(q @ g.matrix)
        d1 = min_distance(Constellation(g, 3))
        d2 = min_distance(Constellation(g_rot, 3))
        assert d2 == pytest.approx(d1, abs=1e-9)

    def test_a2_carving_matches_pairwise_oracle(self):
        c = Constellation(a2_generator(), 4)
        oracle = pairwise_min_distance(enumerate_points(c))
        assert min_distance(c) == pytest.approx(oracle, abs=1e-12)

    def test_a2_infinite_window_search(self):
        c = Constellation(a2_generator())
        m = c.generator.matrix
        zs = [np.array(v) for v in itertools.product(range(-3, 4), repeat=2) if any(v)]
        oracle = min(np.linalg.norm(m @ z) for z in zs)
        assert min_distance(c, window=3) == pytest.approx(oracle, abs=1e-12)

    def test_single_point_rejected(self):
        with pytest.raises(DegenerateConstellation):
            min_distance(Constellation(zn_generator(2), 1))


class TestMeanBasisNorm:
    def test_zn(self):
        assert mean_basis_norm(Constellation(zn_generator(5))) == 1.0

    def test_norms_one_and_three(self):
        # unit determinant with column norms exactly 1 and 3
        g = GeneratorMatrix(np.array([[1.0, math.sqrt(8.0)], [0.0, 1.0]]))
        assert mean_basis_norm(Constellation(g)) == pytest.approx(2.0, abs=1e-12)

    def test_a2(self):
        g = a2_generator()
        expected = np.linalg.norm(g.matrix, axis=0).mean()
        assert mean_basis_norm(Constellation(g)) == pytest.approx(expected)

    def test_maclaurin_symmetric_mean_inequality(self, rng):
        for _ in range(20):
            raw = rng.normal(size=(4, 4)) + 1.5 * np.eye(4)
            if abs(np.linalg.det(raw)) < 1e-3:
                continue
            g = normalize_generator(raw)
            norms = g.column_norms()
            w = norms.mean()
            for k in range(1, 4):
                e_k = sum(np.prod(list(sub))
                          for sub in itertools.combinations(norms, k))
                assert e_k <= math.comb(4, k) * w**k + 1e-9


class TestEnumerate:
    def test_z1_k2(self):
        pts = enumerate_points(Constellation(zn_generator(1), 2))
        assert np.array_equal(pts, np.array([[0.0], [1.0]]))

    def test_z2_k2_lexicographic(self):
        pts = enumerate_points(Constellation(zn_generator(2), 2))
        assert np.array_equal(pts, np.array([[0, 0], [0, 1], [1, 0], [1, 1]], dtype=float))

    def test_a2_k4_matches_direct_products(self):
        c = Constellation(a2_generator(), 4)
        pts = enumerate_points(c)
        assert pts.shape == (16, 2)
        m = c.generator.matrix
        for row, u in zip(pts, itertools.product(range(4), repeat=2)):
            assert np.allclose(row, m @ np.array(u, dtype=float), atol=1e-14)

    @settings(max_examples=20, deadline=None)
    @given(st.integers(1, 4), st.integers(1, 3))
    def test_count_law(self, k, n):
        pts = enumerate_points(Constellation(zn_generator(n), k))
        assert pts.shape == (k**n, n)

    def test_cap(self):
        with pytest.raises(TooLarge):
            enumerate_points(Constellation(zn_generator(8), 32))


class TestFileFormat:
    def test_round_trip(self, tmp_path, rng):
        g = normalize_generator(rng.normal(size=(3, 3)) + 2 * np.eye(3))
        path = tmp_path / "gen.txt"
        save_generator(g, path)
        loaded = load_generator(path)
        assert np.max(np.abs(loaded.matrix - g.matrix)) < 1e-15
        first = path.read_text().splitlines()[0]
        assert first.strip() == "3"

    def test_loader_normalizes(self, tmp_path):
        path = tmp_path / "gen.txt"
        path.write_text("2\n2 0\n0 2\n")
        assert np.allclose(load_generator(path).matrix, np.eye(2))

    def test_bad_entry_count(self, tmp_path):
        path = tmp_path / "gen.txt"
        path.write_text("2\n1 0 0\n")
        with pytest.raises(DimensionMismatch):
            load_generator(path)


class TestFadedConstellation:
    def test_faded_generator_is_diag_h_times_m(self):
        c = Constellation(a2_generator(), 4)
        h = np.array([0.5, 2.0])
        fc = FadedConstellation.from_fading(c, h)
        assert np.max(np.abs(fc.faded_generator - h[:, None] * c.generator.matrix)) < 1e-15

    def test_inconsistent_raises(self):
        c = Constellation(zn_generator(2))
        with pytest.raises(DimensionMismatch):
            FadedConstellation(base=c, h=np.array([1.0, 1.0]),
                               faded_generator=2.0 * np.eye(2))

    def test_dimension_mismatch(self):
        c = Constellation(zn_generator(2))
        with pytest.raises(DimensionMismatch):
            FadedConstellation.from_fading(c, np.array([1.0, 1.0, 1.0]))


class TestGeneratorMatrixInvariants:
    def test_rejects_non_unit_determinant(self):
        with pytest.raises(SingularMatrix):
            GeneratorMatrix(2.0 * np.eye(2))

    def test_immutable(self):
        g = zn_generator(2)
        with pytest.raises(ValueError):
            g.matrix[0, 0] = 5.0
