"""
A mirror that holds a particle still
====================================

The dwell time T is built into the mirror: a plateau of height V just below
the incoming energy slows the particle to a crawl before a steep inner wall
sends it back.  Compare the classical time on the plateau with a quantum
wavepacket bouncing off the same potential.
"""

import numpy as np

from abfield.mirror import MirrorSpec, classical_dwell_time, mirror_potential
from abfield.propagator import Grid
from abfield.scenarios import mirror_reflection

spec = MirrorSpec(V=1.0, d=100.0, w=5.0, wall_scale=10.0)
x = np.array([5.0, 20.0, 50.0, 95.0, 100.0, 105.0, 150.0])
print(np.c_[x, mirror_potential(x, spec)])

# The closer the energy sits to the plateau, the longer the stay.
for factor in (1.01, 1.2, 2.0, 5.0):
    print(f"E = {factor} V   dwell = {classical_dwell_time(spec, factor * spec.V, 100.0):8.1f}")

run = mirror_reflection(spec, mass=100.0, energy_factor=1.2, sigma=5.0,
                        grid=Grid(2048, -20.0, 220.0), x_start=160.0, dt=0.5, sample_dt=5.0)
print("momentum in/out", run.p_in, run.p_out)
print("quantum residence", run.residence_time, " classical", run.classical_time)
