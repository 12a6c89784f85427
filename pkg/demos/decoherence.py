"""
When the shift is no longer small
=================================

The phase argument assumes the source shift is much smaller than the source's
own wavepacket.  Shrink the packet and the two branch states stop overlapping:
the electron's fringes fade even though the phase is still there.
"""

from abfield import default_config
from abfield.analytic import electric_source_shift
from abfield.branches import gaussian_visibility_model

cfg = default_config("decoherence")
dx = abs(electric_source_shift(cfg.setup, cfg.constants)[1])
print("source shift", dx)

# Model only: displaced Gaussians of width sigma.
for ratio in (0.0, 0.5, 1.0, 2.0, 3.0):
    print(f"delta_x/sigma = {ratio:3.1f}   overlap = {gaussian_visibility_model(ratio, 0.0, 1.0):.4f}")

# A few simulated points (each takes a few seconds).
from abfield.scenarios import decoherence_sweep

for p in decoherence_sweep(cfg, [dx / 0.5, dx / 1.5, dx / 3.0]):
    print(f"delta_x/sigma = {p.shift_over_sigma:4.2f}   simulated {p.visibility_sim:.4f}"
          f"   model {p.visibility_model:.4f}")
