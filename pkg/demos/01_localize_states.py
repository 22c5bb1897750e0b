"""
Where does a two-qubit state sit?
=================================

The signs of det(rho) and det(rho^PT) split the state space into six
regions.  Regions I-III are full rank, IV-VI are on the boundary of the
state space.  A negative det(rho^PT) means entanglement.
"""

import numpy as np

from entdyn import det_pt, localize, make_named_state

# the six textbook examples, one per region
for name, params in [("mix", ()), ("boundary_mix", ()), ("werner", (0.5,)),
                     ("eq2", (0.3, 0.2, 0.2)), ("separable_pure", ()), ("singlet", ())]:
    st = make_named_state(name, *params)
    rep = localize(st.state)
    print(f"{name:15s} {str(params):18s} region {rep.region.value:3s} "
          f"d={rep.d:+.3e}  dG={rep.dG:+.3e}  {rep.entanglement.value}")

# Werner family p*I/4 + (1-p)*singlet: entangled below p = 2/3
ps = np.linspace(0, 1, 11)
print()
for p in ps:
    print(f"p={p:.1f}  det rho^PT = {det_pt(make_named_state('werner', p).state):+.5f}")
