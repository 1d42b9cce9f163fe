"""Discrete-time random walks, the exact distribution oracle, and the
projected chain on isomorphism classes.

A walk applies i.i.d. increments through the cellwise symmetric difference.
For exchangeable increment laws the isomorphism class of the state is
itself a Markov chain; this script computes its transition kernel and
compares a simulated path against the exact T-step distribution.
"""

from collections import Counter

from comblevy import (
    Signature,
    empty_structure,
    make_rng,
    orbit_kernel,
    project_orbit_chain,
    simulate_walk,
    urn_measure,
    walk_distribution_exact,
)

SIG = Signature((1,))
n = 3
mu = urn_measure(1, n)  # flip one uniformly chosen element per step
x0 = empty_structure(SIG, n)

traj = simulate_walk(mu, x0, 12, make_rng(5))
print("walk states:")
for t, state in enumerate(traj.steps):
    print(f"  {t:2d}  {state}")

chain = project_orbit_chain(traj)
print("\norbit chain (by set cardinality):",
      [oid.structure().tuple_count(0) for oid in chain])

print("\norbit transition kernel:")
for (src, dst), w in sorted(
    orbit_kernel(mu).items(), key=lambda kv: (kv[0][0].canonical, kv[0][1].canonical)
):
    print(f"  |{src.structure().tuple_count(0)}| -> |{dst.structure().tuple_count(0)}|: {w:.3f}")

# Monte Carlo agreement with the exact three-step distribution.
steps, reps = 3, 20_000
exact = walk_distribution_exact(mu, x0, steps)
counts = Counter(
    simulate_walk(mu, x0, steps, make_rng(6, stream=r)).steps[-1]
    for r in range(reps)
)
print(f"\nstate distribution after {steps} steps ({reps} replicates):")
for state, p in exact.items_sorted():
    print(f"  {state}  exact {p:.4f}  empirical {counts[state] / reps:.4f}")
