"""Finitely supported measures on a space of structures.

Covers the measure algebra used everywhere else: exchangeability checking,
orbit averaging (symmetrization), the finite exchangeable decomposition into
orbit-uniform measures, urn measures on k-subsets, and product-Bernoulli set
measures.  Measures are stored sparsely, keyed by structure; dense orbit
enumeration happens only inside the operations that need it and is guarded
by the canonicalization cap.

A measure here may weight the empty structure (empirical jump measures count
no-jump steps); the zero-mass-at-empty convention for jump intensities is
enforced in the intensity layer, not here.
"""

from __future__ import annotations

import itertools
import json
import math
from bisect import bisect_right
from dataclasses import dataclass, field

from .orbits import (
    DEFAULT_CANONICAL_CAP,
    OrbitId,
    orbit_members,
    orbit_of,
)
from .structures import Signature, Structure, empty_structure, parse, serialize

__all__ = [
    "FiniteMeasure",
    "OrbitWeights",
    "uniform_on_orbit",
    "urn_measure",
    "bernoulli_set_measure",
    "is_exchangeable",
    "symmetrize",
    "decompose_exchangeable",
    "recompose",
    "measure_to_json",
    "measure_from_json",
    "measure_to_payload",
    "measure_from_payload",
    "point_mass",
    "point_mass_at_empty",
    "orbit_weights_to_json",
    "orbit_weights_from_json",
]

MASS_TOL = 1e-12

SIG_SET = Signature((1,))


class FiniteMeasure:
    """A nonnegative measure with finite support on structures over [n].

    Zero-mass entries are dropped, so the support is the set of structures
    with strictly positive mass.
    """

    def __init__(self, signature: Signature, n: int, weights: dict):
        self.signature = signature
        self.n = n
        clean: dict[Structure, float] = {}
        for m, w in weights.items():
            if m.signature != signature or m.n != n:
                raise ValueError(
                    f"support structure {serialize(m)} does not match "
                    f"measure shape {signature}/n={n}"
                )
            w = float(w)
            if w < 0:
                raise ValueError(f"negative mass {w} on {serialize(m)}")
            if w > 0:
                clean[m] = clean.get(m, 0.0) + w
        self.weights = clean
        self.total_mass = math.fsum(clean.values())
        self._sampling: tuple[list[Structure], list[float]] | None = None

    @property
    def is_probability(self) -> bool:
        return abs(self.total_mass - 1.0) <= MASS_TOL

    def mass(self, m: Structure) -> float:
        return self.weights.get(m, 0.0)

    def support(self) -> list[Structure]:
        """Support sorted by canonical serialization."""
        return sorted(self.weights, key=serialize)

    def items_sorted(self) -> list[tuple[Structure, float]]:
        return [(m, self.weights[m]) for m in self.support()]

    def sampling_arrays(self) -> tuple[list[Structure], list[float]]:
        """Support plus cumulative weights, cached for inverse-CDF draws."""
        if self._sampling is None:
            structures = self.support()
            cum = list(itertools.accumulate(self.weights[m] for m in structures))
            self._sampling = (structures, cum)
        return self._sampling

    def sample(self, rng) -> Structure:
        structures, cum = self.sampling_arrays()
        if not structures:
            raise ValueError("cannot sample from a zero measure")
        u = rng.random() * self.total_mass
        idx = bisect_right(cum, u)
        if idx >= len(structures):
            idx = len(structures) - 1
        return structures[idx]

    def approx_equal(self, other: "FiniteMeasure", tol: float = MASS_TOL) -> bool:
        if self.signature != other.signature or self.n != other.n:
            return False
        keys = set(self.weights) | set(other.weights)
        return all(abs(self.mass(m) - other.mass(m)) <= tol for m in keys)

    def __eq__(self, other) -> bool:
        if not isinstance(other, FiniteMeasure):
            return NotImplemented
        return (
            self.signature == other.signature
            and self.n == other.n
            and self.weights == other.weights
        )

    __hash__ = None

    def __repr__(self) -> str:
        return (
            f"FiniteMeasure({self.signature}, n={self.n}, "
            f"|support|={len(self.weights)}, total={self.total_mass:.6g})"
        )


@dataclass(frozen=True)
class OrbitWeights:
    """Nonnegative weights on orbits, the mixing coefficients over U_Y."""

    signature: Signature
    n: int
    p: dict = field(default_factory=dict)

    def mass(self, oid: OrbitId) -> float:
        return self.p.get(oid, 0.0)

    def total(self) -> float:
        return math.fsum(self.p.values())

    def approx_equal(self, other: "OrbitWeights", tol: float = MASS_TOL) -> bool:
        if self.signature != other.signature or self.n != other.n:
            return False
        keys = set(self.p) | set(other.p)
        return all(abs(self.mass(y) - other.mass(y)) <= tol for y in keys)


def uniform_on_orbit(oid: OrbitId, cap: int = DEFAULT_CANONICAL_CAP) -> FiniteMeasure:
    """Uniform distribution over one isomorphism class."""
    rep = oid.structure()
    if orbit_of(rep, cap) != oid:
        raise ValueError(f"not a canonical orbit id: {oid.canonical!r}")
    members = orbit_members(rep, cap)
    mass = 1.0 / len(members)
    return FiniteMeasure(rep.signature, rep.n, {m: mass for m in members})


def urn_measure(k: int, n: int) -> FiniteMeasure:
    """Uniform measure on the k-subsets of [n] (signature (1))."""
    if not 0 <= k <= n:
        raise ValueError(f"k={k} outside 0..{n}")
    mass = 1.0 / math.comb(n, k)
    weights = {
        Structure.from_tuples(SIG_SET, n, [subset]): mass
        for subset in itertools.combinations(range(1, n + 1), k)
    }
    return FiniteMeasure(SIG_SET, n, weights)


def bernoulli_set_measure(prob: float, n: int, n_cap: int = 24) -> FiniteMeasure:
    """Product-Bernoulli measure on subsets of [n]: each element kept w.p. prob."""
    if not 0.0 <= prob <= 1.0:
        raise ValueError(f"prob={prob} outside [0, 1]")
    if n > n_cap:
        raise ValueError(f"n={n} exceeds enumeration cap {n_cap}")
    weights = {}
    for size in range(n + 1):
        mass = prob**size * (1.0 - prob) ** (n - size)
        if mass == 0.0:
            continue
        for subset in itertools.combinations(range(1, n + 1), size):
            weights[Structure.from_tuples(SIG_SET, n, [subset])] = mass
    return FiniteMeasure(SIG_SET, n, weights)


def _orbit_groups(mu: FiniteMeasure, cap: int) -> list[list[Structure]]:
    """Members of every orbit touching the support, grouped per orbit."""
    seen: set[Structure] = set()
    groups = []
    for m in mu.support():
        if m in seen:
            continue
        members = orbit_members(m, cap)
        seen.update(members)
        groups.append(members)
    return groups


def is_exchangeable(
    mu: FiniteMeasure, tol: float = 1e-9, cap: int = DEFAULT_CANONICAL_CAP
) -> bool:
    """Whether the mass is constant across each isomorphism class."""
    for members in _orbit_groups(mu, cap):
        mean = math.fsum(mu.mass(m) for m in members) / len(members)
        if any(abs(mu.mass(m) - mean) > tol for m in members):
            return False
    return True


def symmetrize(mu: FiniteMeasure, cap: int = DEFAULT_CANONICAL_CAP) -> FiniteMeasure:
    """Average the mass over each orbit; orbit totals are preserved."""
    weights: dict[Structure, float] = {}
    for members in _orbit_groups(mu, cap):
        mean = math.fsum(mu.mass(m) for m in members) / len(members)
        for m in members:
            weights[m] = mean
    return FiniteMeasure(mu.signature, mu.n, weights)


def decompose_exchangeable(
    mu: FiniteMeasure, tol: float = 1e-9, cap: int = DEFAULT_CANONICAL_CAP
) -> OrbitWeights:
    """Unique orbit weights with mu = sum of p_Y * (uniform on Y)."""
    if not mu.is_probability:
        raise ValueError(f"not a probability measure (total {mu.total_mass})")
    if not is_exchangeable(mu, tol, cap):
        raise ValueError("measure is not exchangeable within tolerance")
    p: dict[OrbitId, float] = {}
    for members in _orbit_groups(mu, cap):
        total = math.fsum(mu.mass(m) for m in members)
        if total > 0:
            p[orbit_of(members[0], cap)] = total
    return OrbitWeights(mu.signature, mu.n, p)


def recompose(p: OrbitWeights, cap: int = DEFAULT_CANONICAL_CAP) -> FiniteMeasure:
    """Mixture of orbit-uniform measures with the given weights."""
    weights: dict[Structure, float] = {}
    for oid, mass in p.p.items():
        if mass < 0:
            raise ValueError(f"negative orbit weight {mass} on {oid.canonical!r}")
        if mass == 0:
            continue
        members = orbit_members(oid.structure(), cap)
        share = mass / len(members)
        for m in members:
            weights[m] = weights.get(m, 0.0) + share
    return FiniteMeasure(p.signature, p.n, weights)


def measure_to_payload(mu: FiniteMeasure) -> dict:
    return {
        "signature": str(mu.signature),
        "n": mu.n,
        "entries": [
            {"structure": serialize(m), "mass": w} for m, w in mu.items_sorted()
        ],
    }


def measure_from_payload(payload: dict) -> FiniteMeasure:
    try:
        signature = Signature.parse(payload["signature"])
        n = int(payload["n"])
        entries = payload["entries"]
    except (KeyError, TypeError) as exc:
        raise ValueError(f"measure JSON missing field: {exc}") from None
    weights: dict[Structure, float] = {}
    for entry in entries:
        m = parse(entry["structure"])
        mass = float(entry["mass"])
        if m in weights:
            raise ValueError(f"duplicate entry: {entry['structure']!r}")
        weights[m] = mass
    return FiniteMeasure(signature, n, weights)


def measure_to_json(mu: FiniteMeasure) -> str:
    return json.dumps(measure_to_payload(mu), indent=2)


def measure_from_json(text: str) -> FiniteMeasure:
    try:
        payload = json.loads(text)
    except json.JSONDecodeError as exc:
        raise ValueError(f"malformed measure JSON: {exc}") from None
    return measure_from_payload(payload)


def orbit_weights_to_json(p: OrbitWeights) -> str:
    entries = sorted(p.p.items(), key=lambda kv: kv[0].canonical)
    payload = {
        "signature": str(p.signature),
        "n": p.n,
        "entries": [{"orbit": oid.canonical, "p": mass} for oid, mass in entries],
    }
    return json.dumps(payload, indent=2)


def orbit_weights_from_json(text: str) -> OrbitWeights:
    try:
        payload = json.loads(text)
    except json.JSONDecodeError as exc:
        raise ValueError(f"malformed orbit weights JSON: {exc}") from None
    signature = Signature.parse(payload["signature"])
    n = int(payload["n"])
    p = {
        OrbitId(entry["orbit"]): float(entry["p"]) for entry in payload["entries"]
    }
    return OrbitWeights(signature, n, p)


def point_mass(m: Structure) -> FiniteMeasure:
    return FiniteMeasure(m.signature, m.n, {m: 1.0})


def point_mass_at_empty(signature: Signature, n: int) -> FiniteMeasure:
    return point_mass(empty_structure(signature, n))
