import numpy as np
import pytest

from scdiff.fixtures import random_feature_map
from scdiff.modulation import (
    grid_to_tokens,
    modulate,
    read_feature_map,
    tokens_to_grid,
    write_feature_map,
)
from scdiff.windows import WindowSpec, build_window, radial_distance


def kb_window(h=16, w=16, radius=5.0, beta=7.0):
    return build_window(WindowSpec("kaiser_bessel", h, w, radius, beta=beta))


class TestModulate:
    def test_alpha_one_is_identity_bitexact(self):
        x = random_feature_map(2, 4, 16, 16, seed=1)
        out = modulate(x, kb_window(), 1.0)
        assert np.array_equal(out, x)

    def test_single_entry_formula(self):
        # x = 2, w = 0.5, alpha = 3: 2*0.5 + 3*2*0.5 = 4
        from scdiff.windows import Window

        x = np.full((1, 1, 1, 1), 2.0)
        spec = WindowSpec("circular", 1, 1, 1.0, center=(0.0, 0.0))
        w = Window(values=np.array([[0.5]]), spec=spec)
        out = modulate(x, w, 3.0)
        assert out[0, 0, 0, 0] == pytest.approx(4.0, rel=1e-15)

    def test_all_zero_window_is_identity(self):
        x = random_feature_map(1, 2, 8, 8, seed=2)
        w = build_window(WindowSpec("circular", 8, 8, 2.0, center=(100.0, 100.0)))
        assert np.count_nonzero(w.values) == 0
        assert np.array_equal(modulate(x, w, 9.0), x)

    def test_locality_bitexact_and_brute_force_oracle(self):
        x = random_feature_map(2, 4, 16, 16, seed=3)
        window = kb_window()
        alpha = 3.1
        out = modulate(x, window, alpha)
        # brute-force recomputation, pixel by pixel
        expected = np.empty_like(x)
        for b in range(2):
            for c in range(4):
                for i in range(16):
                    for j in range(16):
                        wv = window.values[i, j]
                        expected[b, c, i, j] = x[b, c, i, j] * (1 - wv) + alpha * x[
                            b, c, i, j
                        ] * wv
        assert np.allclose(out, expected, rtol=1e-12, atol=0)
        ii, jj = np.meshgrid(np.arange(16), np.arange(16), indexing="ij")
        outside = radial_distance(ii, jj, window.spec.resolved_center) > 5.0
        assert np.max(np.abs(out[:, :, outside] - x[:, :, outside])) == 0.0

    def test_locality_for_many_alphas(self):
        x = random_feature_map(1, 3, 32, 32, seed=4)
        window = kb_window(32, 32, 9.0)
        ii, jj = np.meshgrid(np.arange(32), np.arange(32), indexing="ij")
        outside = radial_distance(ii, jj, window.spec.resolved_center) > 9.0
        for alpha in [0.0, 0.5, 1.0, 2.0, 17.3, -4.0]:
            out = modulate(x, window, alpha)
            assert np.array_equal(out[:, :, outside], x[:, :, outside])

    def test_linearity(self):
        rng = np.random.default_rng(5)
        x = rng.standard_normal((1, 2, 16, 16))
        y = rng.standard_normal((1, 2, 16, 16))
        window = kb_window()
        a, b = 1.7, -0.6
        lhs = modulate(a * x + b * y, window, 2.5)
        rhs = a * modulate(x, window, 2.5) + b * modulate(y, window, 2.5)
        assert np.allclose(lhs, rhs, rtol=1e-12, atol=1e-14)

    def test_affine_in_alpha(self):
        x = random_feature_map(1, 1, 16, 16, seed=6)
        window = kb_window()
        eps = 1e-4
        slope = (modulate(x, window, 2.0 + eps) - modulate(x, window, 2.0 - eps)) / (2 * eps)
        assert np.allclose(slope, x * window.values, atol=1e-9)

    def test_dim_mismatch_rejected(self):
        x = random_feature_map(1, 1, 16, 16, seed=7)
        with pytest.raises(ValueError, match="match"):
            modulate(x, kb_window(8, 8, 3.0), 2.0)

    def test_nonfinite_rejected(self):
        x = np.full((1, 1, 4, 4), np.nan)
        with pytest.raises(ValueError):
            modulate(x, kb_window(4, 4, 1.0), 2.0)
        x = np.zeros((1, 1, 16, 16))
        with pytest.raises(ValueError):
            modulate(x, kb_window(), float("inf"))


class TestTokenReshape:
    def test_row_major_layout(self):
        tokens = np.array([[0.0], [1.0], [2.0], [3.0]])
        grid = tokens_to_grid(tokens, 2, 2)
        assert grid.shape == (1, 1, 2, 2)
        assert np.array_equal(grid[0, 0], [[0.0, 1.0], [2.0, 3.0]])

    def test_round_trip(self):
        rng = np.random.default_rng(8)
        tokens = rng.standard_normal((12, 5))
        grid = tokens_to_grid(tokens, 3, 4)
        assert grid.shape == (1, 5, 3, 4)
        assert np.array_equal(grid_to_tokens(grid), tokens)

    def test_reverse_round_trip(self):
        rng = np.random.default_rng(9)
        x = rng.standard_normal((1, 3, 2, 2))
        tokens = grid_to_tokens(x)
        assert tokens.shape == (4, 3)
        assert np.array_equal(tokens_to_grid(tokens, 2, 2), x)

    def test_length_mismatch_rejected(self):
        with pytest.raises(ValueError):
            tokens_to_grid(np.zeros((5, 2)), 2, 2)

    def test_batch_must_be_one(self):
        with pytest.raises(ValueError):
            grid_to_tokens(np.zeros((2, 3, 2, 2)))


class TestBinaryFormat:
    def test_round_trip(self, tmp_path):
        x = random_feature_map(2, 3, 5, 7, seed=10).astype(np.float32)
        path = tmp_path / "map.fmap"
        write_feature_map(path, x)
        back = read_feature_map(path)
        assert back.shape == (2, 3, 5, 7)
        assert np.array_equal(back, x)

    def test_header_layout(self, tmp_path):
        x = np.zeros((1, 2, 3, 4), dtype=np.float32)
        path = tmp_path / "map.fmap"
        write_feature_map(path, x)
        raw = path.read_bytes()
        assert len(raw) == 16 + 4 * 24
        assert raw[:16] == (1).to_bytes(4, "little") + (2).to_bytes(4, "little") + (
            3
        ).to_bytes(4, "little") + (4).to_bytes(4, "little")

    def test_truncated_file_rejected(self, tmp_path):
        path = tmp_path / "bad.fmap"
        path.write_bytes(b"\x01\x00\x00\x00")
        with pytest.raises(ValueError, match="truncated"):
            read_feature_map(path)

    def test_length_mismatch_rejected(self, tmp_path):
        x = np.zeros((1, 1, 2, 2), dtype=np.float32)
        path = tmp_path / "map.fmap"
        write_feature_map(path, x)
        path.write_bytes(path.read_bytes() + b"\x00\x00\x00\x00")
        with pytest.raises(ValueError, match="expected"):
            read_feature_map(path)
