"""Continuous-time jump processes driven by sigma-finite intensities.

An intensity is a finite list of components, each describing a family of
jump increments together with a rate:

* ``MixtureAtom`` - a dissociated product-Bernoulli kernel: every cell of
  relation j flips independently with probability ``probs[j]``; the whole
  atom carries rate ``weight``.
* singleton-indexed components - local jumps attached to an element, pair,
  or loop of the label set (the set, graph, and community-plus-graph
  families).
* ``ExplicitFinite`` - an arbitrary finite measure on increments over a
  fixed label window, with zero mass on the empty structure.

Simulation never materializes the underlying Poisson point process.  At a
finite resolution n, every component restricts to a finite total rate with
an explicit conditional increment law given a nonempty restriction, so the
process reduces to a Gillespie-style jump chain: exponential waiting times
at the total restricted rate, component selection proportional to component
rates, then one conditional increment draw.
"""

from __future__ import annotations

import json
import math
from bisect import bisect_right
from dataclasses import dataclass
from itertools import accumulate

import numpy as np

from .measures import (
    FiniteMeasure,
    measure_from_payload,
    measure_to_payload,
)
from .structures import (
    Signature,
    Structure,
    empty_structure,
    increment,
    parse,
    restrict,
    serialize,
)
from .structures import _cell_decode  # cell layout shared with Structure

__all__ = [
    "MixtureAtom",
    "SetSingletonComponent",
    "VertexComponent",
    "PairComponent",
    "LoopComponent",
    "ExplicitFinite",
    "LevyIntensity",
    "LevyTrajectory",
    "RestrictedIntensity",
    "restricted_measure",
    "simulate_levy",
    "restrict_trajectory",
    "marginal_flip_probability",
    "expm_small",
    "intensity_to_json",
    "intensity_from_json",
    "trajectory_to_csv",
    "trajectory_from_csv",
    "events_to_jsonl",
    "events_from_jsonl",
]

RATE_TOL = 1e-12
REJECTION_CAP = 10_000


def _check_prob(p: float, name: str) -> float:
    p = float(p)
    if not 0.0 <= p <= 1.0:
        raise ValueError(f"{name}={p} outside [0, 1]")
    return p


def _check_rate(r: float, name: str) -> float:
    r = float(r)
    if r < 0.0:
        raise ValueError(f"{name}={r} must be >= 0")
    return r


def _check_pattern(pattern, name: str) -> tuple[float, float, float]:
    pattern = tuple(float(p) for p in pattern)
    if len(pattern) != 3 or any(p < 0 for p in pattern):
        raise ValueError(f"{name} must be 3 nonnegative probabilities")
    if abs(sum(pattern) - 1.0) > RATE_TOL:
        raise ValueError(f"{name} must sum to 1, got {sum(pattern)}")
    return pattern


@dataclass(frozen=True)
class MixtureAtom:
    """Dissociated product-Bernoulli jump kernel with one flip probability
    per relation, carrying total rate ``weight``."""

    weight: float
    probs: tuple[float, ...]

    def __post_init__(self) -> None:
        object.__setattr__(self, "weight", _check_rate(self.weight, "weight"))
        object.__setattr__(
            self,
            "probs",
            tuple(_check_prob(p, "flip probability") for p in self.probs),
        )


@dataclass(frozen=True)
class SetSingletonComponent:
    """Rate ``rate`` per element i: the jump flips the single cell {i}."""

    rate: float

    def __post_init__(self) -> None:
        object.__setattr__(self, "rate", _check_rate(self.rate, "rate"))


@dataclass(frozen=True)
class VertexComponent:
    """Per-vertex jumps: each edge incident to the chosen vertex flips with
    probability ``rho``; for a community signature the vertex's membership
    flips with probability ``member_prob``.  The self-loop cell is excluded
    unless ``include_loop`` is set (loops belong to the loop component)."""

    rate: float
    rho: float
    member_prob: float = 0.0
    include_loop: bool = False

    def __post_init__(self) -> None:
        object.__setattr__(self, "rate", _check_rate(self.rate, "rate"))
        rho = _check_prob(self.rho, "rho")
        if rho <= 0.0:
            raise ValueError("rho must lie in (0, 1]")
        object.__setattr__(self, "rho", rho)
        object.__setattr__(
            self, "member_prob", _check_prob(self.member_prob, "member_prob")
        )


@dataclass(frozen=True)
class PairComponent:
    """Per-unordered-pair jumps: for the chosen pair {i, j} (i < j), flip one
    of the nonempty subsets of {(i,j), (j,i)} drawn from ``pattern``
    (forward only, backward only, both)."""

    rate: float
    pattern: tuple[float, float, float] = (1 / 3, 1 / 3, 1 / 3)

    def __post_init__(self) -> None:
        object.__setattr__(self, "rate", _check_rate(self.rate, "rate"))
        object.__setattr__(self, "pattern", _check_pattern(self.pattern, "pattern"))


@dataclass(frozen=True)
class LoopComponent:
    """Per-element jumps on the diagonal: flip the loop (i, i).  For a
    community signature, ``pattern`` distributes over the nonempty subsets
    of {membership flip, loop flip} (member only, loop only, both)."""

    rate: float
    pattern: tuple[float, float, float] = (0.0, 1.0, 0.0)

    def __post_init__(self) -> None:
        object.__setattr__(self, "rate", _check_rate(self.rate, "rate"))
        object.__setattr__(self, "pattern", _check_pattern(self.pattern, "pattern"))


@dataclass(frozen=True)
class ExplicitFinite:
    """Arbitrary finite intensity over a fixed label window."""

    measure: FiniteMeasure

    def __post_init__(self) -> None:
        mu = self.measure
        if mu.mass(empty_structure(mu.signature, mu.n)) != 0.0:
            raise ValueError("explicit jump intensity must not weight the empty structure")


_SIG_GRAPH = Signature((2,))
_SIG_COMMUNITY = Signature((1, 2))


@dataclass(frozen=True)
class LevyIntensity:
    """A composite jump intensity: a sum of component intensities."""

    signature: Signature
    components: tuple

    def __post_init__(self) -> None:
        if self.signature.max_arity < 1:
            raise ValueError(
                f"process signature must have top arity >= 1, got {self.signature}"
            )
        for comp in self.components:
            self._validate_component(comp)

    def _validate_component(self, comp) -> None:
        sig = self.signature
        if isinstance(comp, MixtureAtom):
            if len(comp.probs) != sig.k:
                raise ValueError(
                    f"mixture atom has {len(comp.probs)} flip probabilities, "
                    f"signature needs {sig.k}"
                )
        elif isinstance(comp, SetSingletonComponent):
            if sig.arities != (1,):
                raise ValueError("set singleton component requires signature (1)")
        elif isinstance(comp, (VertexComponent, PairComponent, LoopComponent)):
            if sig not in (_SIG_GRAPH, _SIG_COMMUNITY):
                raise ValueError(
                    f"{type(comp).__name__} requires signature (2) or (1,2)"
                )
            if sig == _SIG_GRAPH:
                if isinstance(comp, VertexComponent) and comp.member_prob != 0.0:
                    raise ValueError("member_prob requires signature (1,2)")
                if isinstance(comp, LoopComponent) and comp.pattern != (0.0, 1.0, 0.0):
                    raise ValueError(
                        "loop pattern other than (0,1,0) requires signature (1,2)"
                    )
        elif isinstance(comp, ExplicitFinite):
            if comp.measure.signature != sig:
                raise ValueError("explicit component signature mismatch")
        else:
            raise ValueError(f"unknown component type: {type(comp).__name__}")


@dataclass(frozen=True)
class LevyTrajectory:
    """Right-continuous step path: state_at(t) is the last state with event
    time <= t.  Event times are strictly increasing, consecutive states
    differ, and the first event is the time-0 initial state."""

    n: int
    horizon: float
    events: tuple

    def __post_init__(self) -> None:
        if not self.events:
            raise ValueError("trajectory needs at least the initial event")
        t0, s0 = self.events[0]
        if t0 != 0.0:
            raise ValueError(f"first event must be at time 0, got {t0}")
        last_t, last_s = t0, s0
        for t, s in self.events[1:]:
            if t <= last_t:
                raise ValueError("event times must be strictly increasing")
            if s == last_s:
                raise ValueError("consecutive events must change the state")
            if s.signature != s0.signature or s.n != self.n:
                raise ValueError("all states must share signature and n")
            last_t, last_s = t, s
        if s0.n != self.n:
            raise ValueError(f"state size {s0.n} != trajectory resolution {self.n}")
        if last_t > self.horizon:
            raise ValueError("event beyond the horizon")
        object.__setattr__(self, "_times", tuple(t for t, _ in self.events))

    @property
    def signature(self) -> Signature:
        return self.events[0][1].signature

    def state_at(self, t: float) -> Structure:
        if not 0.0 <= t <= self.horizon:
            raise ValueError(f"time {t} outside [0, {self.horizon}]")
        idx = bisect_right(self._times, t) - 1
        return self.events[idx][1]

    def jump_increments(self) -> list[Structure]:
        return [
            increment(self.events[i][1], self.events[i - 1][1])
            for i in range(1, len(self.events))
        ]


class _BernoulliBlocks:
    """Independent cell flips in blocks (count, prob), conditioned on at
    least one flip overall.

    Sampling is exact: rejection when the conditioning event has probability
    at least 1%, otherwise an analytic draw of the first flipped cell in the
    global cell order followed by unconditioned flips after it.
    """

    def __init__(self, blocks):
        self.blocks = [(int(c), float(p)) for c, p in blocks if c > 0]
        none = 1.0
        for c, p in self.blocks:
            none *= (1.0 - p) ** c
        self.none_prob = none
        self.hit_prob = 1.0 - none

    def sample(self, rng) -> list[list[int]]:
        if self.hit_prob <= 0.0:
            raise ValueError("conditioning on an impossible flip event")
        if self.hit_prob >= 0.01:
            for _ in range(REJECTION_CAP):
                flips = self._unconditioned(rng)
                if any(flips):
                    return flips
            raise RuntimeError(
                f"rejection sampling failed after {REJECTION_CAP} tries"
            )
        return self._first_flip(rng)

    def _unconditioned(self, rng) -> list[list[int]]:
        flips = []
        for c, p in self.blocks:
            k = int(rng.binomial(c, p))
            if k == 0:
                flips.append([])
            else:
                flips.append(sorted(int(x) for x in rng.choice(c, size=k, replace=False)))
        return flips

    def _first_flip(self, rng) -> list[list[int]]:
        block_probs = []
        prefix_none = 1.0
        for c, p in self.blocks:
            none_b = (1.0 - p) ** c
            block_probs.append(prefix_none * (1.0 - none_b))
            prefix_none *= none_b
        u = rng.random() * self.hit_prob
        bi = len(self.blocks) - 1
        acc = 0.0
        for idx, bp in enumerate(block_probs):
            acc += bp
            if u < acc:
                bi = idx
                break
        c, p = self.blocks[bi]
        first = self._truncated_geometric(rng, c, p)
        flips: list[list[int]] = [[] for _ in self.blocks]
        flips[bi].append(first)
        remaining = c - first - 1
        if remaining > 0 and p > 0.0:
            k = int(rng.binomial(remaining, p))
            if k:
                flips[bi].extend(
                    first + 1 + int(x)
                    for x in rng.choice(remaining, size=k, replace=False)
                )
        for j in range(bi + 1, len(self.blocks)):
            cj, pj = self.blocks[j]
            k = int(rng.binomial(cj, pj))
            if k:
                flips[j].extend(
                    int(x) for x in rng.choice(cj, size=k, replace=False)
                )
        return [sorted(f) for f in flips]

    @staticmethod
    def _truncated_geometric(rng, c: int, p: float) -> int:
        if p >= 1.0:
            return 0
        tail = (1.0 - p) ** c
        u = rng.random()
        f = int(math.floor(math.log1p(-u * (1.0 - tail)) / math.log1p(-p)))
        return min(max(f, 0), c - 1)


def _structure_from_cells(
    signature: Signature, n: int, cells_per_relation
) -> Structure:
    payloads = []
    for arity, cells in zip(signature.arities, cells_per_relation):
        if arity <= 2:
            mask = 0
            for i in cells:
                mask |= 1 << i
            payloads.append(mask)
        else:
            payloads.append(frozenset(_cell_decode(i, n, arity) for i in cells))
    return Structure(signature, n, tuple(payloads))


class _RestrictedMixture:
    def __init__(self, comp: MixtureAtom, signature: Signature, n: int):
        self.signature = signature
        self.n = n
        self.blocks = _BernoulliBlocks(
            [(n**a, p) for a, p in zip(signature.arities, comp.probs)]
        )
        # Blocks with zero cells are dropped inside _BernoulliBlocks; keep a
        # map from block position back to relation index.
        self.block_to_rel = [
            j for j, a in enumerate(signature.arities) if n**a > 0
        ]
        self.rate = comp.weight * self.blocks.hit_prob

    def sample(self, rng) -> Structure:
        flips = self.blocks.sample(rng)
        cells = [[] for _ in range(self.signature.k)]
        for pos, block_flips in zip(self.block_to_rel, flips):
            cells[pos] = block_flips
        return _structure_from_cells(self.signature, self.n, cells)


class _RestrictedSetSingleton:
    def __init__(self, comp: SetSingletonComponent, signature: Signature, n: int):
        self.signature = signature
        self.n = n
        self.rate = comp.rate * n

    def sample(self, rng) -> Structure:
        i = int(rng.integers(1, self.n + 1))
        return _structure_from_cells(self.signature, self.n, [[i - 1]])


class _RestrictedVertex:
    def __init__(self, comp: VertexComponent, signature: Signature, n: int):
        self.signature = signature
        self.n = n
        self.comp = comp
        self.has_member = signature == _SIG_COMMUNITY
        self.edge_rel = signature.k - 1
        self.edge_cells = 2 * (n - 1) + (1 if comp.include_loop else 0)
        blocks = []
        if self.has_member:
            blocks.append((1, comp.member_prob))
        blocks.append((self.edge_cells, comp.rho))
        self.blocks = _BernoulliBlocks(blocks)
        # _BernoulliBlocks drops zero-cell blocks; track surviving positions.
        self.member_pos = None
        self.edge_pos = None
        pos = 0
        if self.has_member:
            self.member_pos = pos
            pos += 1
        if self.edge_cells > 0:
            self.edge_pos = pos
        self.rate = comp.rate * n * self.blocks.hit_prob

    def _edge_cell_index(self, vertex: int, v: int) -> int:
        n = self.n
        if self.comp.include_loop and v == self.edge_cells - 1:
            return (vertex - 1) * n + (vertex - 1)
        pair_idx, direction = divmod(v, 2)
        other = pair_idx + 1 if pair_idx + 1 < vertex else pair_idx + 2
        if direction == 0:
            return (vertex - 1) * n + (other - 1)
        return (other - 1) * n + (vertex - 1)

    def sample(self, rng) -> Structure:
        i = int(rng.integers(1, self.n + 1))
        flips = self.blocks.sample(rng)
        cells = [[] for _ in range(self.signature.k)]
        if self.member_pos is not None and flips[self.member_pos]:
            cells[0] = [i - 1]
        if self.edge_pos is not None:
            cells[self.edge_rel] = [
                self._edge_cell_index(i, v) for v in flips[self.edge_pos]
            ]
        return _structure_from_cells(self.signature, self.n, cells)


class _RestrictedPair:
    def __init__(self, comp: PairComponent, signature: Signature, n: int):
        self.signature = signature
        self.n = n
        self.pattern_cum = list(accumulate(comp.pattern))
        self.edge_rel = signature.k - 1
        self.rate = comp.rate * n * (n - 1) / 2.0

    def sample(self, rng) -> Structure:
        picked = rng.choice(self.n, size=2, replace=False)
        i, j = sorted(int(x) + 1 for x in picked)
        u = rng.random()
        which = bisect_right(self.pattern_cum, u)
        which = min(which, 2)
        n = self.n
        fwd = (i - 1) * n + (j - 1)
        bwd = (j - 1) * n + (i - 1)
        edge_cells = {0: [fwd], 1: [bwd], 2: [fwd, bwd]}[which]
        cells = [[] for _ in range(self.signature.k)]
        cells[self.edge_rel] = sorted(edge_cells)
        return _structure_from_cells(self.signature, self.n, cells)


class _RestrictedLoop:
    def __init__(self, comp: LoopComponent, signature: Signature, n: int):
        self.signature = signature
        self.n = n
        self.pattern_cum = list(accumulate(comp.pattern))
        self.edge_rel = signature.k - 1
        self.has_member = signature == _SIG_COMMUNITY
        self.rate = comp.rate * n

    def sample(self, rng) -> Structure:
        i = int(rng.integers(1, self.n + 1))
        u = rng.random()
        which = min(bisect_right(self.pattern_cum, u), 2)
        cells = [[] for _ in range(self.signature.k)]
        loop_cell = (i - 1) * self.n + (i - 1)
        if which == 0:
            cells[0] = [i - 1]
        elif which == 1:
            cells[self.edge_rel] = [loop_cell]
        else:
            cells[0] = [i - 1]
            cells[self.edge_rel] = [loop_cell]
        return _structure_from_cells(self.signature, self.n, cells)


def _embed(m: Structure, n: int) -> Structure:
    if n == m.n:
        return m
    return Structure.from_tuples(
        m.signature, n, [m.tuples(j) for j in range(m.signature.k)]
    )


class _RestrictedExplicit:
    def __init__(self, comp: ExplicitFinite, signature: Signature, n: int):
        mu = comp.measure
        weights: dict[Structure, float] = {}
        empty_n = empty_structure(signature, n)
        for m, w in mu.weights.items():
            image = restrict(m, n) if n < m.n else _embed(m, n)
            if image == empty_n:
                continue
            weights[image] = weights.get(image, 0.0) + w
        self.level_measure = FiniteMeasure(signature, n, weights)
        self.rate = self.level_measure.total_mass

    def sample(self, rng) -> Structure:
        return self.level_measure.sample(rng)


_RESTRICTORS = {
    MixtureAtom: _RestrictedMixture,
    SetSingletonComponent: _RestrictedSetSingleton,
    VertexComponent: _RestrictedVertex,
    PairComponent: _RestrictedPair,
    LoopComponent: _RestrictedLoop,
    ExplicitFinite: _RestrictedExplicit,
}


class RestrictedIntensity:
    """Level-n view of an intensity: finite total rate plus a sampler for
    increments conditioned on a nonempty restriction."""

    def __init__(self, intensity: LevyIntensity, n: int):
        if n < 1:
            raise ValueError(f"resolution must be >= 1, got {n}")
        self.signature = intensity.signature
        self.n = n
        restricted = [
            _RESTRICTORS[type(comp)](comp, intensity.signature, n)
            for comp in intensity.components
        ]
        self.components = [rc for rc in restricted if rc.rate > RATE_TOL]
        self.component_rates = [rc.rate for rc in self.components]
        self.total_rate = math.fsum(self.component_rates)
        self._cum = list(accumulate(self.component_rates))

    def sample(self, rng) -> Structure:
        if self.total_rate <= 0.0:
            raise ValueError("cannot sample from a zero-rate intensity")
        u = rng.random() * self.total_rate
        idx = min(bisect_right(self._cum, u), len(self.components) - 1)
        return self.components[idx].sample(rng)


def restricted_measure(intensity: LevyIntensity, n: int) -> RestrictedIntensity:
    """Total jump rate at resolution n and the conditional increment sampler."""
    return RestrictedIntensity(intensity, n)


def simulate_levy(
    intensity: LevyIntensity, n: int, horizon: float, rng
) -> LevyTrajectory:
    """Jump-chain simulation at resolution n over [0, horizon]."""
    if horizon <= 0.0:
        raise ValueError(f"horizon must be > 0, got {horizon}")
    restricted = RestrictedIntensity(intensity, n)
    state = empty_structure(intensity.signature, n)
    events = [(0.0, state)]
    rate = restricted.total_rate
    if rate > 0.0:
        t = 0.0
        while True:
            t += rng.exponential(1.0 / rate)
            if t > horizon:
                break
            state = increment(state, restricted.sample(rng))
            events.append((t, state))
    return LevyTrajectory(n=n, horizon=float(horizon), events=tuple(events))


def restrict_trajectory(traj: LevyTrajectory, m: int) -> LevyTrajectory:
    """Project every state to [m]; jumps that vanish under restriction merge."""
    if not 0 <= m <= traj.n:
        raise ValueError(f"restriction level {m} outside 0..{traj.n}")
    t0, s0 = traj.events[0]
    events = [(t0, restrict(s0, m))]
    for t, s in traj.events[1:]:
        rs = restrict(s, m)
        if rs != events[-1][1]:
            events.append((t, rs))
    return LevyTrajectory(n=m, horizon=traj.horizon, events=tuple(events))


def marginal_flip_probability(c: float, t: float) -> float:
    """P{element i is present at time t} under the pure rate-c singleton
    intensity started from empty: (1 - exp(-2ct)) / 2."""
    if c < 0 or t < 0:
        raise ValueError("rate and time must be >= 0")
    return 0.5 * (1.0 - math.exp(-2.0 * c * t))


def expm_small(Q, t: float, dim_cap: int = 1024) -> np.ndarray:
    """exp(tQ) for a small conservative rate matrix, by scaling and squaring
    of the truncated series.  Rows of the result sum to 1 within 1e-10;
    round-off negatives above -1e-12 are clamped to zero."""
    Q = np.asarray(Q, dtype=float)
    if Q.ndim != 2 or Q.shape[0] != Q.shape[1]:
        raise ValueError("Q must be a square matrix")
    d = Q.shape[0]
    if d > dim_cap:
        raise ValueError(f"dimension {d} exceeds cap {dim_cap}")
    if t < 0:
        raise ValueError(f"time must be >= 0, got {t}")
    off = Q - np.diag(np.diag(Q))
    if off.min() < -1e-12:
        raise ValueError("off-diagonal rates must be nonnegative")
    if np.abs(Q.sum(axis=1)).max() > 1e-9:
        raise ValueError("rows of a rate matrix must sum to zero")
    A = Q * t
    norm = float(np.abs(A).sum(axis=1).max()) if d else 0.0
    squarings = max(0, int(math.ceil(math.log2(norm / 0.5)))) if norm > 0.5 else 0
    B = A / (2.0**squarings)
    E = np.eye(d)
    term = np.eye(d)
    for k in range(1, 40):
        term = term @ B / k
        E = E + term
        if float(np.abs(term).max()) < 1e-20:
            break
    for _ in range(squarings):
        E = E @ E
    E[(E < 0) & (E >= -1e-12)] = 0.0
    return E


# --- file formats ---------------------------------------------------------


def intensity_to_json(intensity: LevyIntensity) -> str:
    comps = []
    for comp in intensity.components:
        if isinstance(comp, MixtureAtom):
            comps.append(
                {
                    "type": "mixture_atom",
                    "weight": comp.weight,
                    "probs": list(comp.probs),
                }
            )
        elif isinstance(comp, SetSingletonComponent):
            comps.append({"type": "set_singleton", "rate": comp.rate})
        elif isinstance(comp, VertexComponent):
            comps.append(
                {
                    "type": "vertex",
                    "rate": comp.rate,
                    "rho": comp.rho,
                    "member_prob": comp.member_prob,
                    "include_loop": comp.include_loop,
                }
            )
        elif isinstance(comp, PairComponent):
            comps.append(
                {"type": "pair", "rate": comp.rate, "pattern": list(comp.pattern)}
            )
        elif isinstance(comp, LoopComponent):
            comps.append(
                {"type": "loop", "rate": comp.rate, "pattern": list(comp.pattern)}
            )
        elif isinstance(comp, ExplicitFinite):
            comps.append(
                {"type": "explicit", "measure": measure_to_payload(comp.measure)}
            )
    payload = {"signature": str(intensity.signature), "components": comps}
    return json.dumps(payload, indent=2)


def intensity_from_json(text: str) -> LevyIntensity:
    try:
        payload = json.loads(text)
    except json.JSONDecodeError as exc:
        raise ValueError(f"malformed intensity JSON: {exc}") from None
    try:
        signature = Signature.parse(payload["signature"])
        raw_components = payload["components"]
    except (KeyError, TypeError) as exc:
        raise ValueError(f"intensity JSON missing field: {exc}") from None
    components = []
    for raw in raw_components:
        try:
            kind = raw["type"]
            if kind == "mixture_atom":
                components.append(
                    MixtureAtom(weight=raw["weight"], probs=tuple(raw["probs"]))
                )
            elif kind == "set_singleton":
                components.append(SetSingletonComponent(rate=raw["rate"]))
            elif kind == "vertex":
                components.append(
                    VertexComponent(
                        rate=raw["rate"],
                        rho=raw["rho"],
                        member_prob=raw.get("member_prob", 0.0),
                        include_loop=raw.get("include_loop", False),
                    )
                )
            elif kind == "pair":
                components.append(
                    PairComponent(
                        rate=raw["rate"],
                        pattern=tuple(raw.get("pattern", (1 / 3, 1 / 3, 1 / 3))),
                    )
                )
            elif kind == "loop":
                components.append(
                    LoopComponent(
                        rate=raw["rate"],
                        pattern=tuple(raw.get("pattern", (0.0, 1.0, 0.0))),
                    )
                )
            elif kind == "explicit":
                components.append(
                    ExplicitFinite(measure=measure_from_payload(raw["measure"]))
                )
            else:
                raise ValueError(f"unknown component type {kind!r}")
        except (KeyError, TypeError) as exc:
            raise ValueError(f"component missing field: {exc}") from None
    return LevyIntensity(signature, tuple(components))


def trajectory_to_csv(traj: LevyTrajectory) -> str:
    lines = ["time,structure"]
    for t, s in traj.events:
        lines.append(f"{t!r},{serialize(s)}")
    return "\n".join(lines) + "\n"


def trajectory_from_csv(text: str, horizon: float | None = None) -> LevyTrajectory:
    lines = [ln for ln in text.splitlines() if ln]
    if not lines or lines[0] != "time,structure":
        raise ValueError("trajectory CSV must start with header 'time,structure'")
    events = []
    for line in lines[1:]:
        time_text, _, struct_text = line.partition(",")
        try:
            t = float(time_text)
        except ValueError:
            raise ValueError(f"malformed time: {time_text!r}") from None
        events.append((t, parse(struct_text)))
    if not events:
        raise ValueError("trajectory CSV has no events")
    if horizon is None:
        horizon = events[-1][0]
    n = events[0][1].n
    return LevyTrajectory(n=n, horizon=horizon, events=tuple(events))


def events_to_jsonl(traj: LevyTrajectory, seed: int | None = None) -> str:
    """Event-stream form: a header record, then one jump increment per line.

    The stream assumes the canonical start at the empty structure, so only
    jump times and increments are recorded.
    """
    header = {
        "signature": str(traj.signature),
        "n": traj.n,
        "T": traj.horizon,
        "seed": seed,
    }
    lines = [json.dumps(header, sort_keys=True)]
    increments = traj.jump_increments()
    for (t, _), inc in zip(traj.events[1:], increments):
        lines.append(json.dumps({"t": t, "increment": serialize(inc)}, sort_keys=True))
    return "\n".join(lines) + "\n"


def events_from_jsonl(text: str) -> LevyTrajectory:
    lines = [ln for ln in text.splitlines() if ln]
    if not lines:
        raise ValueError("empty event stream")
    try:
        header = json.loads(lines[0])
        signature = Signature.parse(header["signature"])
        n = int(header["n"])
        horizon = float(header["T"])
    except (json.JSONDecodeError, KeyError, TypeError) as exc:
        raise ValueError(f"malformed event-stream header: {exc}") from None
    state = empty_structure(signature, n)
    events = [(0.0, state)]
    for line in lines[1:]:
        try:
            record = json.loads(line)
            t = float(record["t"])
            inc = parse(record["increment"])
        except (json.JSONDecodeError, KeyError, TypeError) as exc:
            raise ValueError(f"malformed event record: {exc}") from None
        state = increment(state, inc)
        events.append((t, state))
    return LevyTrajectory(n=n, horizon=horizon, events=tuple(events))
