"""
How typical is each event?
==========================

Draw random initial states from the Hilbert-Schmidt measure, classify each
trajectory, and report frequencies with 95% Wilson intervals.  Sample i
always uses random stream i, so results do not depend on the thread count.
"""

from entdyn import MeasureSpec, estimate_probabilities, make_scenario

N = 300
for sid in ["case1a", "case2a", "case2b_phase", "collective_zero_t", "collective_inf_t"]:
    rep = estimate_probabilities(make_scenario(sid).spec, MeasureSpec(seed=2024), N, workers=4, scenario=sid)
    row = []
    for key in ("SDE", "ADE", "AE", "SBE"):
        e = rep.events[key]
        row.append(f"{key}={e.estimate:.3f} [{e.interval[0]:.3f},{e.interval[1]:.3f}]")
    print(f"{sid:18s}", "  ".join(row))
