"""Finite labeled relational structures and their increment group.

A structure is a base set [n] = {1, ..., n} together with one tuple-set per
relation of a signature (a nondecreasing list of arities).  Structures of a
common shape form an abelian group under the cellwise symmetric difference
("increment"), in which the empty structure is the identity and every element
is its own inverse.  All process state in this package is a Structure.

Relations of arity <= 2 are backed by integer bitmasks indexed by mixed-radix
cell position (tuple (a1, ..., ar) -> sum (a_i - 1) * n^(r - i)), which makes
the increment a plain XOR.  Relations of arity >= 3 fall back to frozensets
of tuples.

Labels are 1-based throughout.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Iterable, Iterator, Sequence

__all__ = [
    "Signature",
    "Structure",
    "Permutation",
    "empty_structure",
    "increment",
    "restrict",
    "relabel",
    "agreement_level",
    "serialize",
    "parse",
]

# Arities up to this bound use the dense bitmask backing.
_BITMASK_MAX_ARITY = 2


@dataclass(frozen=True)
class Signature:
    """A nondecreasing tuple of relation arities."""

    arities: tuple[int, ...]

    def __post_init__(self) -> None:
        arities = tuple(int(a) for a in self.arities)
        object.__setattr__(self, "arities", arities)
        if any(a < 0 for a in arities):
            raise ValueError(f"arities must be nonnegative: {arities}")
        if any(arities[i] > arities[i + 1] for i in range(len(arities) - 1)):
            raise ValueError(f"arities must be nondecreasing: {arities}")

    @property
    def k(self) -> int:
        return len(self.arities)

    @property
    def max_arity(self) -> int:
        return max(self.arities, default=0)

    def __str__(self) -> str:
        return "(" + ",".join(str(a) for a in self.arities) + ")"

    @classmethod
    def parse(cls, text: str) -> "Signature":
        """Parse the parenthesized form, e.g. ``(1,2)``."""
        text = text.strip()
        if not (text.startswith("(") and text.endswith(")")):
            raise ValueError(f"malformed signature: {text!r}")
        inner = text[1:-1].strip()
        if not inner:
            return cls(())
        parts = inner.split(",")
        try:
            arities = tuple(int(p) for p in parts)
        except ValueError:
            raise ValueError(f"malformed signature: {text!r}") from None
        return cls(arities)


def _cell_index(entries: Sequence[int], n: int) -> int:
    idx = 0
    for a in entries:
        idx = idx * n + (a - 1)
    return idx


def _cell_decode(idx: int, n: int, arity: int) -> tuple[int, ...]:
    entries = [0] * arity
    for pos in range(arity - 1, -1, -1):
        entries[pos] = idx % n + 1
        idx //= n
    return tuple(entries)


def _iter_bits(mask: int) -> Iterator[int]:
    while mask:
        low = mask & -mask
        yield low.bit_length() - 1
        mask ^= low


def _validate_tuple(t: tuple[int, ...], arity: int, n: int) -> None:
    if len(t) != arity:
        raise ValueError(f"tuple {t} has length {len(t)}, expected arity {arity}")
    for a in t:
        if not 1 <= a <= n:
            raise ValueError(f"tuple {t} has entry {a} outside 1..{n}")


@dataclass(frozen=True)
class Structure:
    """A finite labeled structure: base size ``n`` plus one set per relation.

    ``relations[j]`` is an int bitmask for arity <= 2 and a frozenset of
    tuples for arity >= 3.  Instances are immutable values; build them with
    :func:`empty_structure` or :meth:`from_tuples` rather than directly.
    """

    signature: Signature
    n: int
    relations: tuple

    @classmethod
    def from_tuples(
        cls,
        signature: Signature,
        n: int,
        relations: Sequence[Iterable],
    ) -> "Structure":
        """Build and validate a structure from explicit tuple collections.

        For arity-1 relations, bare ints are accepted in place of 1-tuples.
        """
        if n < 0:
            raise ValueError(f"n must be >= 0, got {n}")
        if len(relations) != signature.k:
            raise ValueError(
                f"expected {signature.k} relations, got {len(relations)}"
            )
        payloads = []
        for arity, rel in zip(signature.arities, relations):
            tuples = []
            for t in rel:
                if isinstance(t, int):
                    t = (t,)
                else:
                    t = tuple(int(a) for a in t)
                _validate_tuple(t, arity, n)
                tuples.append(t)
            if len(set(tuples)) != len(tuples):
                raise ValueError("duplicate tuples in relation")
            if arity <= _BITMASK_MAX_ARITY:
                mask = 0
                for t in tuples:
                    mask |= 1 << _cell_index(t, n)
                payloads.append(mask)
            else:
                payloads.append(frozenset(tuples))
        return cls(signature, n, tuple(payloads))

    def tuples(self, j: int) -> list[tuple[int, ...]]:
        """Sorted tuple list of relation ``j`` (0-based index)."""
        arity = self.signature.arities[j]
        rel = self.relations[j]
        if arity <= _BITMASK_MAX_ARITY:
            return [_cell_decode(i, self.n, arity) for i in _iter_bits(rel)]
        return sorted(rel)

    def tuple_count(self, j: int) -> int:
        rel = self.relations[j]
        if isinstance(rel, int):
            return rel.bit_count()
        return len(rel)

    def is_empty(self) -> bool:
        return all(
            rel == 0 if isinstance(rel, int) else not rel
            for rel in self.relations
        )

    def __str__(self) -> str:
        return serialize(self)


@dataclass(frozen=True)
class Permutation:
    """A bijection of {1, ..., n}, stored as the image tuple (1-based)."""

    n: int
    image: tuple[int, ...]

    def __post_init__(self) -> None:
        image = tuple(int(v) for v in self.image)
        object.__setattr__(self, "image", image)
        if len(image) != self.n or sorted(image) != list(range(1, self.n + 1)):
            raise ValueError(f"not a bijection of 1..{self.n}: {image}")

    def __call__(self, i: int) -> int:
        return self.image[i - 1]

    def inverse(self) -> "Permutation":
        inv = [0] * self.n
        for i, v in enumerate(self.image, start=1):
            inv[v - 1] = i
        return Permutation(self.n, tuple(inv))

    def compose(self, other: "Permutation") -> "Permutation":
        """Return self o other, acting as i -> self(other(i))."""
        if self.n != other.n:
            raise ValueError("size mismatch in composition")
        return Permutation(self.n, tuple(self.image[v - 1] for v in other.image))

    @classmethod
    def identity(cls, n: int) -> "Permutation":
        return cls(n, tuple(range(1, n + 1)))


def empty_structure(signature: Signature, n: int) -> Structure:
    """The identity of the increment group: all relations empty."""
    if n < 0:
        raise ValueError(f"n must be >= 0, got {n}")
    payloads = tuple(
        0 if a <= _BITMASK_MAX_ARITY else frozenset()
        for a in signature.arities
    )
    return Structure(signature, n, payloads)


def _check_same_shape(m1: Structure, m2: Structure) -> None:
    if m1.signature != m2.signature or m1.n != m2.n:
        raise ValueError(
            f"shape mismatch: {m1.signature}/n={m1.n} vs {m2.signature}/n={m2.n}"
        )


def increment(m1: Structure, m2: Structure) -> Structure:
    """Cellwise symmetric difference of two structures of a common shape."""
    _check_same_shape(m1, m2)
    payloads = tuple(
        r1 ^ r2 if isinstance(r1, int) else r1.symmetric_difference(r2)
        for r1, r2 in zip(m1.relations, m2.relations)
    )
    return Structure(m1.signature, m1.n, payloads)


def restrict(m: Structure, size: int) -> Structure:
    """Keep only tuples with all entries <= size; base set becomes [size]."""
    if not 0 <= size <= m.n:
        raise ValueError(f"restriction size {size} outside 0..{m.n}")
    if size == m.n:
        return m
    payloads = []
    for arity, rel in zip(m.signature.arities, m.relations):
        if isinstance(rel, int):
            mask = 0
            for idx in _iter_bits(rel):
                t = _cell_decode(idx, m.n, arity)
                if all(a <= size for a in t):
                    mask |= 1 << _cell_index(t, size)
            payloads.append(mask)
        else:
            payloads.append(
                frozenset(t for t in rel if all(a <= size for a in t))
            )
    return Structure(m.signature, size, tuple(payloads))


def relabel(m: Structure, sigma: Permutation) -> Structure:
    """Relabeled structure: tuple a is present iff sigma(a) is present in m."""
    if sigma.n != m.n:
        raise ValueError(f"permutation size {sigma.n} != structure size {m.n}")
    inv = sigma.inverse().image
    payloads = []
    for arity, rel in zip(m.signature.arities, m.relations):
        if isinstance(rel, int):
            mask = 0
            for idx in _iter_bits(rel):
                t = _cell_decode(idx, m.n, arity)
                mapped = tuple(inv[a - 1] for a in t)
                mask |= 1 << _cell_index(mapped, m.n)
            payloads.append(mask)
        else:
            payloads.append(
                frozenset(tuple(inv[a - 1] for a in t) for t in rel)
            )
    return Structure(m.signature, m.n, tuple(payloads))


def agreement_level(m1: Structure, m2: Structure) -> int:
    """Largest size whose restrictions of the two structures coincide.

    Returns ``n`` when the structures are equal.  Returns -1 in the corner
    case where arity-0 relations differ (restrictions then differ even at
    size 0, so no agreement level exists).
    """
    _check_same_shape(m1, m2)
    diff = increment(m1, m2)
    if diff.is_empty():
        return m1.n
    level = m1.n
    for j, arity in enumerate(m1.signature.arities):
        for t in diff.tuples(j):
            reach = max(t) if t else 0
            level = min(level, reach - 1)
    return level


def serialize(m: Structure) -> str:
    """Canonical text form, bit-exact and sortable.

    Format: ``L=(i1,...,ik)|n=N|R1={t;t;...}|...|Rk={...}`` with tuples
    ``(a1,...,ai)`` in lexicographic order and no whitespace.
    """
    parts = [f"L={m.signature}", f"n={m.n}"]
    for j in range(m.signature.k):
        body = ";".join(
            "(" + ",".join(str(a) for a in t) + ")" for t in m.tuples(j)
        )
        parts.append(f"R{j + 1}={{{body}}}")
    return "|".join(parts)


def _parse_tuple(text: str, arity: int, n: int) -> tuple[int, ...]:
    if not (text.startswith("(") and text.endswith(")")):
        raise ValueError(f"malformed tuple: {text!r}")
    inner = text[1:-1]
    if not inner:
        entries: tuple[int, ...] = ()
    else:
        try:
            entries = tuple(int(p) for p in inner.split(","))
        except ValueError:
            raise ValueError(f"malformed tuple: {text!r}") from None
    _validate_tuple(entries, arity, n)
    return entries


def parse(text: str) -> Structure:
    """Inverse of :func:`serialize`; rejects any non-canonical text."""
    parts = text.split("|")
    if len(parts) < 2 or not parts[0].startswith("L=") or not parts[1].startswith("n="):
        raise ValueError(f"malformed structure text: {text!r}")
    signature = Signature.parse(parts[0][2:])
    try:
        n = int(parts[1][2:])
    except ValueError:
        raise ValueError(f"malformed size field: {parts[1]!r}") from None
    if n < 0:
        raise ValueError(f"negative size: {n}")
    rel_parts = parts[2:]
    if len(rel_parts) != signature.k:
        raise ValueError(
            f"expected {signature.k} relation fields, got {len(rel_parts)}"
        )
    relations = []
    for j, (arity, part) in enumerate(zip(signature.arities, rel_parts)):
        prefix = f"R{j + 1}={{"
        if not part.startswith(prefix) or not part.endswith("}"):
            raise ValueError(f"malformed relation field: {part!r}")
        body = part[len(prefix):-1]
        tuples: list[tuple[int, ...]] = []
        if body:
            tuples = [_parse_tuple(tok, arity, n) for tok in body.split(";")]
        if tuples != sorted(set(tuples)):
            raise ValueError(f"relation field not canonical: {part!r}")
        relations.append(tuples)
    return Structure.from_tuples(signature, n, relations)
