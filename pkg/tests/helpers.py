"""Shared test utilities: random structure generation and naive oracles.

The naive implementations here re-derive the defining formulas directly
(full-cell enumeration, no bitmask shortcuts) so library results can be
checked against an independent route.
"""

from __future__ import annotations

import itertools

import numpy as np

from comblevy.structures import Permutation, Signature, Structure


def random_structure(rng, signature: Signature, n: int, density: float = 0.5) -> Structure:
    relations = []
    for arity in signature.arities:
        cells = n**arity
        flips = np.nonzero(rng.random(cells) < density)[0]
        tuples = [decode_cell(int(i), n, arity) for i in flips]
        relations.append(tuples)
    return Structure.from_tuples(signature, n, relations)


def random_permutation(rng, n: int) -> Permutation:
    return Permutation(n, tuple(int(v) + 1 for v in rng.permutation(n)))


def decode_cell(idx: int, n: int, arity: int) -> tuple[int, ...]:
    entries = [0] * arity
    for pos in range(arity - 1, -1, -1):
        entries[pos] = idx % n + 1
        idx //= n
    return tuple(entries)


def all_cells(n: int, arity: int):
    return itertools.product(range(1, n + 1), repeat=arity)


def tuple_sets(m: Structure) -> list[set]:
    return [set(m.tuples(j)) for j in range(m.signature.k)]


def naive_relabel(m: Structure, sigma: Permutation) -> Structure:
    """Definition-level relabeling: a is present iff sigma(a) is present."""
    rels = tuple_sets(m)
    out = []
    for j, arity in enumerate(m.signature.arities):
        out.append(
            [
                t
                for t in all_cells(m.n, arity)
                if tuple(sigma(a) for a in t) in rels[j]
            ]
        )
    return Structure.from_tuples(m.signature, m.n, out)


def naive_restrict(m: Structure, size: int) -> Structure:
    rels = tuple_sets(m)
    out = []
    for j, arity in enumerate(m.signature.arities):
        out.append(
            [t for t in all_cells(size, arity) if t in rels[j]]
        )
    return Structure.from_tuples(m.signature, size, out)


def naive_increment(m1: Structure, m2: Structure) -> Structure:
    r1, r2 = tuple_sets(m1), tuple_sets(m2)
    out = []
    for j, arity in enumerate(m1.signature.arities):
        out.append(
            [t for t in all_cells(m1.n, arity) if (t in r1[j]) != (t in r2[j])]
        )
    return Structure.from_tuples(m1.signature, m1.n, out)


def naive_hom_density(a: Structure, m: Structure) -> float:
    """Full enumeration of injections with complete cell comparison."""
    level, n = a.n, m.n
    a_rels = tuple_sets(a)
    m_rels = tuple_sets(m)
    hits = 0
    total = 0
    for phi in itertools.permutations(range(1, n + 1), level):
        total += 1
        ok = True
        for j, arity in enumerate(a.signature.arities):
            for t in all_cells(level, arity):
                mapped = tuple(phi[x - 1] for x in t)
                if (t in a_rels[j]) != (mapped in m_rels[j]):
                    ok = False
                    break
            if not ok:
                break
        hits += ok
    return hits / total if total else 0.0
