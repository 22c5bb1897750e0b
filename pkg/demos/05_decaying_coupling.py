"""
Decaying coupling is a change of clock
======================================

With the dissipator switched off as exp(-kappa t), the state at time t is
the constant-coupling state at the integrated time g(t) = (1 - exp(-kappa t)) / kappa.
The long-time limit is therefore the constant-coupling state at 1/kappa.
"""

import numpy as np

from entdyn import MeasureSpec, localize, make_scenario, propagate, propagate_nonautonomous, reparam_g
from entdyn import rng_stream, sample

sc = make_scenario("case1b")
kappa = sc.spec.schedule.kappa
rho0 = sample(MeasureSpec(), rng_stream(1, 0))

for t in (1.0, 5.0, 10 / kappa):
    rk = propagate_nonautonomous(rho0, sc.spec, t)
    ex = propagate(rho0, sc.spec.constant(), reparam_g(kappa, t))
    print(f"t={t:5.1f}  g(t)={reparam_g(kappa, t):.6f}  max|diff| = {np.max(np.abs(rk - ex)):.2e}")

limit = propagate(rho0, sc.spec.constant(), 1 / kappa)
print("limit state region:", localize(limit).region.value, " (interior of the separable set)")
