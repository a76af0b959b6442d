# Spatial window profiles
#
# Three compactly supported tapers on a pixel grid: the binary disk, the
# truncated Gaussian, and the Kaiser-Bessel window. The interesting
# trade-off is what happens at the edge r = R versus how much energy
# stays concentrated near the center.

from pathlib import Path

import numpy as np

from scdiff import WindowSpec, build_window
from scdiff.special import bessel_i0

OUT = Path(__file__).parent / "output"
OUT.mkdir(exist_ok=True)

H = W = 64
R = 15.0

# ## Build one window of each kind

circular = build_window(WindowSpec("circular", H, W, R))
gauss_narrow = build_window(WindowSpec("gaussian", H, W, R, eta=0.5))
gauss_flat = build_window(WindowSpec("gaussian", H, W, R, eta=0.8))
kaiser = build_window(WindowSpec("kaiser_bessel", H, W, R, beta=7.0))

print(f"grid {H}x{W}, radius {R}")
for name, win in [
    ("circular", circular),
    ("gaussian eta=0.5", gauss_narrow),
    ("gaussian eta=0.8", gauss_flat),
    ("kaiser-bessel beta=7", kaiser),
]:
    edge = win.values[H // 2, W // 2 + int(R)]
    inside = win.values[win.values > 0]
    print(
        f"  {name:22s} edge value {edge:.6f}   mean weight inside {inside.mean():.4f}"
    )

# The Kaiser-Bessel edge value is exactly 1/I0(beta): a residual step of
# about 6e-3 at beta = 7, far smaller than the flat Gaussian's 0.46.
print("1/I0(7) =", 1.0 / bessel_i0(7.0))

# ## Radial profiles along the +x axis

radii = np.arange(0, int(R) + 1)
print("\nr      circular   g(0.5)     g(0.8)     kaiser(7)")
for r in radii:
    row = [win.values[H // 2, W // 2 + r] for win in (circular, gauss_narrow, gauss_flat, kaiser)]
    print(f"{r:2d}    " + "   ".join(f"{v:8.5f}" for v in row))

# ## Shape parameter sweep: beta sharpens the profile

print("\nkaiser w(r=14)/w(0) by beta:")
for beta in [0.0, 2.0, 5.0, 9.0, 12.0]:
    win = build_window(WindowSpec("kaiser_bessel", H, W, R, beta=beta))
    print(f"  beta {beta:5.1f}: {win.values[H // 2, W // 2 + 14]:.5f}")

# ## Export for inspection

np.savetxt(OUT / "kaiser_beta7.csv", kaiser.values, delimiter=",")
print(f"\nwrote {OUT / 'kaiser_beta7.csv'}")
print("same thing via the CLI: scdiff window --kind kaiser --size 64x64 "
      "--radius 15 --beta 7 --out kb.pgm --format pgm")
