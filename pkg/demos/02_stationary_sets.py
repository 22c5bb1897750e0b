"""
Stationary sets and the six dynamics classes
============================================

For each shipped reservoir we look at the kernel of the generator and at
where the asymptotic states of many random initial states end up.
Interior of the separable set gives class 1, touching its border gives
class 2, all entangled gives class 3.  A single limit point is "a", a
family is "b".
"""

from entdyn import ScenarioId, build_superoperator, classify_dynamics, kernel, make_scenario

print(f"{'scenario':20s} {'ker':>3s}  {'geometry':16s} {'set':9s} class (expected)")
for sid in ScenarioId:
    sc = make_scenario(sid)
    base = sc.spec if sc.spec.is_autonomous else sc.spec.dissipator_only()
    dim = kernel(build_superoperator(base)).dimension
    dyn = classify_dynamics(sc.spec)
    print(f"{sid.value:20s} {dim:3d}  {dyn.stationary.geometry.value:16s} "
          f"{dyn.stationary.cardinality.value:9s} {dyn.label.value}  ({sc.expected_class.value})")

# decaying coupling: the limit depends on the initial state, so even a
# unique-kernel generator yields a small family of asymptotic states
