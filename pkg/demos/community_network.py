"""Joint evolution of a network and a community of its vertices.

With signature (1,2) a state is a vertex subset (the community) together
with a directed graph.  The local jump components couple the two relations:
a vertex event may flip the vertex's membership and rewire its incident
edges at once, and a loop event may flip membership together with the
self-loop.  The script tracks community size and edge counts along one
path.
"""

from comblevy import (
    LevyIntensity,
    LoopComponent,
    MixtureAtom,
    PairComponent,
    Signature,
    VertexComponent,
    make_rng,
    simulate_levy,
)

SIG = Signature((1, 2))

intensity = LevyIntensity(
    SIG,
    (
        # rare global burst touching both relations
        MixtureAtom(weight=0.05, probs=(0.2, 0.05)),
        # vertex events: membership flips with probability 0.5, incident
        # edges rewire with probability 0.3
        VertexComponent(rate=0.4, rho=0.3, member_prob=0.5),
        PairComponent(rate=0.15),
        # loop events may flip membership, the self-loop, or both
        LoopComponent(rate=0.05, pattern=(0.25, 0.25, 0.5)),
    ),
)

n = 10
traj = simulate_levy(intensity, n, 8.0, make_rng(99))
print(f"{len(traj.events) - 1} jumps at resolution n={n}\n")

print("time   |community|   edges")
for t in range(9):
    state = traj.state_at(float(t))
    print(f"{t:4d}   {state.tuple_count(0):11d}   {state.tuple_count(1):5d}")

coupled = sum(
    1
    for inc in traj.jump_increments()
    if inc.tuple_count(0) > 0 and inc.tuple_count(1) > 0
)
print(f"\n{coupled} jumps changed community and network together")
