"""Isomorphism classes of structures under relabeling.

Two structures are isomorphic when some permutation of the labels maps one
onto the other.  The canonical form of a structure is the relabeling with
the lexicographically minimal serialization; the orbit id wraps that text.
Canonicalization minimizes over all n! permutations, so everything here is
gated by an enumeration cap (default n <= 8).

With the cap in place all labels are single decimal digits, so comparing
per-relation sorted tuple sequences is identical to comparing serialized
strings; the cheaper tuple comparison is what the code uses.
"""

from __future__ import annotations

import itertools
import json
from dataclasses import dataclass
from functools import lru_cache

from .structures import (
    Permutation,
    Signature,
    Structure,
    parse,
    relabel,
    serialize,
)
from .structures import _cell_decode  # cell layout shared with Structure

__all__ = [
    "OrbitId",
    "OrbitTable",
    "canonical_form",
    "orbit_of",
    "orbit_size",
    "orbit_members",
    "enumerate_orbits",
    "orbit_lookup",
    "iter_space",
    "space_size",
    "DEFAULT_CANONICAL_CAP",
    "DEFAULT_SPACE_CAP",
]

DEFAULT_CANONICAL_CAP = 8
DEFAULT_SPACE_CAP = 1_000_000


@dataclass(frozen=True, order=True)
class OrbitId:
    """An isomorphism class, identified by its canonical serialization."""

    canonical: str

    def structure(self) -> Structure:
        return parse(self.canonical)


@dataclass(frozen=True)
class OrbitTable:
    """Complete list of (orbit, size) pairs for one structure space."""

    signature: Signature
    n: int
    entries: tuple[tuple[OrbitId, int], ...]

    def sizes(self) -> dict[OrbitId, int]:
        return {oid: size for oid, size in self.entries}

    def to_json(self) -> str:
        payload = [
            {"canonical": oid.canonical, "size": size}
            for oid, size in self.entries
        ]
        return json.dumps(payload, indent=2)


@lru_cache(maxsize=32)
def _permutations(n: int) -> tuple[Permutation, ...]:
    return tuple(
        Permutation(n, image)
        for image in itertools.permutations(range(1, n + 1))
    )


def _sort_key(m: Structure) -> tuple:
    return tuple(tuple(m.tuples(j)) for j in range(m.signature.k))


def _check_cap(n: int, cap: int) -> None:
    if n > cap:
        raise ValueError(f"n={n} exceeds canonicalization cap {cap}")


def canonical_form(m: Structure, cap: int = DEFAULT_CANONICAL_CAP) -> Structure:
    """Relabeling of ``m`` with lexicographically minimal serialization."""
    _check_cap(m.n, cap)
    return min(
        (relabel(m, sigma) for sigma in _permutations(m.n)),
        key=_sort_key,
    )


def orbit_members(m: Structure, cap: int = DEFAULT_CANONICAL_CAP) -> list[Structure]:
    """All distinct relabelings of ``m``, sorted by canonical key."""
    _check_cap(m.n, cap)
    members = {relabel(m, sigma) for sigma in _permutations(m.n)}
    return sorted(members, key=_sort_key)


def orbit_of(m: Structure, cap: int = DEFAULT_CANONICAL_CAP) -> OrbitId:
    return OrbitId(serialize(canonical_form(m, cap)))


def orbit_size(m: Structure, cap: int = DEFAULT_CANONICAL_CAP) -> int:
    return len(orbit_members(m, cap))


def space_size(signature: Signature, n: int) -> int:
    """Number of structures over [n]: the product of 2^(n^arity) factors."""
    total = 1
    for arity in signature.arities:
        total *= 1 << (n**arity)
    return total


def iter_space(signature: Signature, n: int, cap: int = DEFAULT_SPACE_CAP):
    """Yield every structure over [n], in canonical key order per relation."""
    if space_size(signature, n) > cap:
        raise ValueError(
            f"structure space of size {space_size(signature, n)} exceeds cap {cap}"
        )
    cell_counts = [n**a for a in signature.arities]
    ranges = [range(1 << c) for c in cell_counts]
    for masks in itertools.product(*ranges):
        payloads = []
        for arity, mask, cells in zip(signature.arities, masks, cell_counts):
            if arity <= 2:
                payloads.append(mask)
            else:
                payloads.append(
                    frozenset(
                        _cell_decode(i, n, arity)
                        for i in range(cells)
                        if mask >> i & 1
                    )
                )
        yield Structure(signature, n, tuple(payloads))


@lru_cache(maxsize=64)
def _orbit_data(
    signature: Signature, n: int, space_cap: int, canonical_cap: int
) -> tuple[OrbitTable, dict]:
    _check_cap(n, canonical_cap)
    sigmas = _permutations(n)
    lookup: dict[Structure, OrbitId] = {}
    entries = []
    for m in iter_space(signature, n, space_cap):
        if m in lookup:
            continue
        members = {relabel(m, sigma) for sigma in sigmas}
        rep = min(members, key=_sort_key)
        oid = OrbitId(serialize(rep))
        for member in members:
            lookup[member] = oid
        entries.append((oid, len(members)))
    entries.sort(key=lambda e: e[0].canonical)
    table = OrbitTable(signature, n, tuple(entries))
    return table, lookup


def enumerate_orbits(
    signature: Signature,
    n: int,
    space_cap: int = DEFAULT_SPACE_CAP,
    canonical_cap: int = DEFAULT_CANONICAL_CAP,
) -> OrbitTable:
    """Partition the whole structure space over [n] into orbits."""
    return _orbit_data(signature, n, space_cap, canonical_cap)[0]


def orbit_lookup(
    signature: Signature,
    n: int,
    space_cap: int = DEFAULT_SPACE_CAP,
    canonical_cap: int = DEFAULT_CANONICAL_CAP,
) -> dict:
    """Map from every structure over [n] to its OrbitId (cached)."""
    return _orbit_data(signature, n, space_cap, canonical_cap)[1]
