"""
A configuration where nothing feels anything
============================================

Put the electron at a mirror and trigger two charges Q at distance r above and
below it.  With Q = 4e every particle sits where the net field vanishes: the
electron between two equal charges, each charge balanced between the electron
and its partner.  Local fields then predict no phase at all.
"""

from abfield import Constants
from abfield.scenarios import triggered_null_scenario

k = Constants.natural()

for Q in (4.0, 3.0, 0.0):
    out = triggered_null_scenario(1.0, Q, k)
    print(f"Q = {Q}e")
    for p in out["particles"]:
        print(f"   {p['label']:12s} field residual {p['residual']:.3g}")
    print("   ", out["status"])
