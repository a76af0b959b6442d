# Feature-map modulation and its locality guarantee
#
# The blending operator amplifies features inside a window's support and
# provably leaves everything outside bit-identical:
#
#     out = x * (1 - w) + alpha * x * w
#
# Also shown: the sequence <-> grid reshape used to apply the same
# operator to transformer token streams.

import numpy as np

from scdiff import WindowSpec, build_window, grid_to_tokens, modulate, tokens_to_grid
from scdiff.windows import radial_distance

rng = np.random.default_rng(0)
x = rng.standard_normal((2, 4, 32, 32))

window = build_window(WindowSpec("kaiser_bessel", 32, 32, radius=9.0, beta=7.0))

# ## Amplify the center region 3.1x

out = modulate(x, window, alpha=3.1)

ii, jj = np.meshgrid(np.arange(32), np.arange(32), indexing="ij")
r = radial_distance(ii, jj, window.spec.resolved_center)
outside = r > 9.0

print("max |out - x| outside the window:", np.max(np.abs(out - x)[:, :, outside]))
print("max |out - x| inside the window: ", np.max(np.abs(out - x)[:, :, ~outside]))

# alpha = 1 is the exact identity
assert np.array_equal(modulate(x, window, 1.0), x)
print("alpha = 1 returns the input bit-for-bit")

# ## Energy amplification is confined to the disk

energy_in = float((out[:, :, ~outside] ** 2).sum() / (x[:, :, ~outside] ** 2).sum())
energy_out = float((out[:, :, outside] ** 2).sum() / (x[:, :, outside] ** 2).sum())
print(f"energy ratio inside {energy_in:.2f}, outside {energy_out:.10f}")

# ## Token-sequence round trip (DiT-style backbones)

tokens = rng.standard_normal((16 * 16, 8))  # L = 256 positions, 8 channels
grid = tokens_to_grid(tokens, 16, 16)
print("tokens", tokens.shape, "-> grid", grid.shape)

small_window = build_window(WindowSpec("kaiser_bessel", 16, 16, radius=5.0, beta=7.0))
edited = modulate(grid, small_window, alpha=2.0)
back = grid_to_tokens(edited)
print("edited tokens differ:", int(np.sum(np.any(back != tokens, axis=1))), "of", len(tokens))
assert np.array_equal(grid_to_tokens(grid), tokens)
print("round trip without editing is exact")
