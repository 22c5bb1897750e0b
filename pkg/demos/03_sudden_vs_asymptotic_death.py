"""
Sudden versus asymptotic death
==============================

Under pure dephasing the populations are frozen and only the coherences
decay.  For an X-state with middle coherence c the determinant of the
partial transpose is p2 p3 (p1 p4 - |c(t)|^2): entanglement dies at a
finite time when p1 p4 > 0, and only asymptotically when p1 = 0.
"""

import math

import numpy as np

from entdyn import classify_trajectory, make_scenario, predict_sign_case2a
from entdyn import qmat

phase = make_scenario("case2b_phase").spec


def x_state(p1, p2, p3, p4, c):
    rho = np.diag([p1, p2, p3, p4]).astype(complex)
    rho[1, 2], rho[2, 1] = c, np.conj(c)
    return rho


rec = classify_trajectory(x_state(0.1, 0.4, 0.4, 0.1, 0.3), phase)
print("p1 p4 > 0 :", sorted(e.value for e in rec.flags), "death at t =", rec.death_time)
print("   closed form ln(|c| / sqrt(p1 p4)) / 4 =", math.log(0.3 / 0.1) / 4)

rec = classify_trajectory(x_state(0.0, 0.45, 0.45, 0.1, 0.3), phase)
print("p1 = 0    :", sorted(e.value for e in rec.flags), "tail sign", rec.tail_sign)

# zero-temperature decay on both qubits: the sign of a 4x4 determinant
# built from the initial state decides the fate of the entanglement
decay = make_scenario("case2a").spec
for name, ket in [("Psi+", qmat.PSI_PLUS), ("tilted Phi", np.array([math.sqrt(0.3), 0, 0, math.sqrt(0.7)]))]:
    rho = qmat.pure(ket)
    rec = classify_trajectory(rho, decay)
    print(f"{name:10s} Det rho' = {predict_sign_case2a(rho):+.4f} ->", sorted(e.value for e in rec.flags))
