import math
from collections import Counter

import numpy as np
import pytest

from comblevy.levy import (
    ExplicitFinite,
    LevyIntensity,
    LevyTrajectory,
    LoopComponent,
    MixtureAtom,
    PairComponent,
    SetSingletonComponent,
    VertexComponent,
    _BernoulliBlocks,
    events_from_jsonl,
    events_to_jsonl,
    expm_small,
    intensity_from_json,
    intensity_to_json,
    marginal_flip_probability,
    restrict_trajectory,
    restricted_measure,
    simulate_levy,
    trajectory_from_csv,
    trajectory_to_csv,
)
from comblevy.measures import FiniteMeasure
from comblevy.orbits import orbit_of
from comblevy.rng import make_rng
from comblevy.structures import (
    Signature,
    Structure,
    empty_structure,
    relabel,
    serialize,
)

from helpers import random_permutation

SIG1 = Signature((1,))
SIG2 = Signature((2,))
SIG12 = Signature((1, 2))


def S(sig, n, *relations):
    return Structure.from_tuples(sig, n, list(relations))


class TestComponentValidation:
    def test_mixture_prob_range(self):
        with pytest.raises(ValueError):
            MixtureAtom(weight=1.0, probs=(1.5,))
        with pytest.raises(ValueError):
            MixtureAtom(weight=-1.0, probs=(0.5,))

    def test_mixture_arity_count(self):
        with pytest.raises(ValueError):
            LevyIntensity(SIG12, (MixtureAtom(weight=1.0, probs=(0.5,)),))

    def test_set_singleton_signature(self):
        with pytest.raises(ValueError):
            LevyIntensity(SIG2, (SetSingletonComponent(1.0),))

    def test_vertex_signature(self):
        with pytest.raises(ValueError):
            LevyIntensity(SIG1, (VertexComponent(1.0, 0.5),))
        with pytest.raises(ValueError):
            LevyIntensity(SIG2, (VertexComponent(1.0, 0.5, member_prob=0.2),))

    def test_vertex_rho_positive(self):
        with pytest.raises(ValueError):
            VertexComponent(1.0, 0.0)

    def test_loop_pattern_graph_signature(self):
        with pytest.raises(ValueError):
            LevyIntensity(SIG2, (LoopComponent(1.0, pattern=(0.5, 0.5, 0.0)),))

    def test_pattern_must_normalize(self):
        with pytest.raises(ValueError):
            PairComponent(1.0, pattern=(0.5, 0.5, 0.5))

    def test_explicit_rejects_empty_mass(self):
        mu = FiniteMeasure(
            SIG1, 2, {empty_structure(SIG1, 2): 0.5, S(SIG1, 2, {1}): 0.5}
        )
        with pytest.raises(ValueError):
            ExplicitFinite(mu)

    def test_rejects_arity_zero_only(self):
        with pytest.raises(ValueError):
            LevyIntensity(Signature((0,)), ())


class TestRestrictedRates:
    def test_set_singleton_rate(self):
        I = LevyIntensity(SIG1, (SetSingletonComponent(rate=2.0),))
        assert restricted_measure(I, 3).total_rate == pytest.approx(6.0)

    def test_zero_intensity(self):
        assert restricted_measure(LevyIntensity(SIG1, ()), 5).total_rate == 0.0

    def test_mixture_rate(self):
        I = LevyIntensity(SIG1, (MixtureAtom(weight=1.0, probs=(0.5,)),))
        assert restricted_measure(I, 2).total_rate == pytest.approx(0.75)

    def test_mixture_rate_multi_relation(self):
        I = LevyIntensity(SIG12, (MixtureAtom(weight=2.0, probs=(0.1, 0.2)),))
        n = 3
        expected = 2.0 * (1 - (0.9**3) * (0.8**9))
        assert restricted_measure(I, n).total_rate == pytest.approx(expected)

    def test_vertex_rate(self):
        I = LevyIntensity(SIG2, (VertexComponent(rate=1.5, rho=0.3),))
        n = 4
        expected = 1.5 * n * (1 - 0.7 ** (2 * (n - 1)))
        assert restricted_measure(I, n).total_rate == pytest.approx(expected)

    def test_pair_rate(self):
        I = LevyIntensity(SIG2, (PairComponent(rate=2.0),))
        assert restricted_measure(I, 5).total_rate == pytest.approx(2.0 * 10)
        assert restricted_measure(I, 1).total_rate == 0.0

    def test_loop_rate(self):
        I = LevyIntensity(SIG2, (LoopComponent(rate=0.5),))
        assert restricted_measure(I, 4).total_rate == pytest.approx(2.0)

    def test_community_vertex_rate(self):
        I = LevyIntensity(
            SIG12, (VertexComponent(rate=1.0, rho=0.4, member_prob=0.25),)
        )
        n = 3
        expected = n * (1 - 0.75 * 0.6 ** (2 * (n - 1)))
        assert restricted_measure(I, n).total_rate == pytest.approx(expected)

    def test_explicit_rate_same_level(self):
        mu = FiniteMeasure(SIG1, 2, {S(SIG1, 2, {1}): 0.7, S(SIG1, 2, {1, 2}): 0.8})
        I = LevyIntensity(SIG1, (ExplicitFinite(mu),))
        assert restricted_measure(I, 2).total_rate == pytest.approx(1.5)


def _conditional_bernoulli_law(n, p):
    """Exact conditional law of a nonempty product-Bernoulli subset of [n]."""
    import itertools

    hit = 1 - (1 - p) ** n
    law = {}
    for size in range(1, n + 1):
        for subset in itertools.combinations(range(1, n + 1), size):
            law[frozenset(subset)] = p**size * (1 - p) ** (n - size) / hit
    return law


def _empirical_subset_law(sampler, rng, draws):
    counts = Counter()
    for _ in range(draws):
        m = sampler(rng)
        counts[frozenset(a for (a,) in m.tuples(0))] += 1
    return {k: v / draws for k, v in counts.items()}


def _assert_law_close(empirical, exact, draws, z=4.0):
    for subset, p in exact.items():
        band = z * math.sqrt(p * (1 - p) / draws) + 1e-9
        assert abs(empirical.get(subset, 0.0) - p) <= band, subset


class TestConditionalSamplers:
    def test_rejection_path_matches_exact_law(self):
        I = LevyIntensity(SIG1, (MixtureAtom(weight=1.0, probs=(0.4,)),))
        r = restricted_measure(I, 3)
        assert r.components[0].blocks.hit_prob >= 0.01  # rejection path
        draws = 40_000
        empirical = _empirical_subset_law(
            lambda rng: r.sample(rng), make_rng(42), draws
        )
        _assert_law_close(empirical, _conditional_bernoulli_law(3, 0.4), draws)

    def test_analytic_path_matches_exact_law(self):
        p = 0.003
        I = LevyIntensity(SIG1, (MixtureAtom(weight=1.0, probs=(p,)),))
        r = restricted_measure(I, 3)
        assert r.components[0].blocks.hit_prob < 0.01  # analytic fallback path
        draws = 40_000
        empirical = _empirical_subset_law(
            lambda rng: r.sample(rng), make_rng(43), draws
        )
        _assert_law_close(empirical, _conditional_bernoulli_law(3, p), draws)

    def test_both_paths_agree_on_same_blocks(self):
        # force the analytic branch on a rejection-regime parameterization
        blocks = _BernoulliBlocks([(3, 0.4)])
        draws = 40_000
        rng = make_rng(44)
        counts = Counter()
        for _ in range(draws):
            flips = blocks._first_flip(rng)
            counts[frozenset(i + 1 for i in flips[0])] += 1
        empirical = {k: v / draws for k, v in counts.items()}
        _assert_law_close(empirical, _conditional_bernoulli_law(3, 0.4), draws)

    def test_samples_never_empty(self):
        I = LevyIntensity(
            SIG12,
            (
                MixtureAtom(weight=1.0, probs=(0.05, 0.02)),
                VertexComponent(rate=1.0, rho=0.3, member_prob=0.1),
                PairComponent(rate=1.0),
                LoopComponent(rate=1.0, pattern=(0.3, 0.3, 0.4)),
            ),
        )
        r = restricted_measure(I, 4)
        rng = make_rng(45)
        assert all(not r.sample(rng).is_empty() for _ in range(2000))


class TestLocalComponentSemantics:
    def test_vertex_flips_are_incident_to_one_vertex(self):
        I = LevyIntensity(SIG2, (VertexComponent(rate=1.0, rho=0.6),))
        r = restricted_measure(I, 4)
        rng = make_rng(46)
        for _ in range(500):
            edges = r.sample(rng).tuples(0)
            assert edges
            assert all(a != b for a, b in edges)  # no loops by default
            pivots = set.intersection(*[{a, b} for a, b in edges])
            assert pivots  # one common endpoint

    def test_vertex_include_loop(self):
        I = LevyIntensity(
            SIG2, (VertexComponent(rate=1.0, rho=0.9, include_loop=True),)
        )
        r = restricted_measure(I, 3)
        rng = make_rng(47)
        saw_loop = False
        for _ in range(500):
            edges = r.sample(rng).tuples(0)
            loops = [(a, b) for a, b in edges if a == b]
            if loops:
                saw_loop = True
                pivot = loops[0][0]
                assert all(pivot in (a, b) for a, b in edges)
        assert saw_loop

    def test_pair_patterns(self):
        I = LevyIntensity(SIG2, (PairComponent(rate=1.0, pattern=(0.25, 0.25, 0.5)),))
        r = restricted_measure(I, 3)
        rng = make_rng(48)
        kinds = Counter()
        for _ in range(3000):
            edges = r.sample(rng).tuples(0)
            pair = {a for e in edges for a in e}
            assert len(pair) == 2
            kinds[len(edges)] += 1
        assert abs(kinds[1] / 3000 - 0.5) <= 0.05
        assert abs(kinds[2] / 3000 - 0.5) <= 0.05

    def test_loop_component_graph(self):
        I = LevyIntensity(SIG2, (LoopComponent(rate=1.0),))
        r = restricted_measure(I, 3)
        rng = make_rng(49)
        for _ in range(200):
            edges = r.sample(rng).tuples(0)
            assert len(edges) == 1 and edges[0][0] == edges[0][1]

    def test_loop_component_community_patterns(self):
        I = LevyIntensity(SIG12, (LoopComponent(rate=1.0, pattern=(0.2, 0.3, 0.5)),))
        r = restricted_measure(I, 3)
        rng = make_rng(50)
        kinds = Counter()
        for _ in range(5000):
            m = r.sample(rng)
            members = [a for (a,) in m.tuples(0)]
            loops = m.tuples(1)
            assert all(a == b for a, b in loops)
            if members and loops:
                assert members[0] == loops[0][0]
                kinds["both"] += 1
            elif members:
                kinds["member"] += 1
            else:
                kinds["loop"] += 1
        assert abs(kinds["member"] / 5000 - 0.2) <= 0.03
        assert abs(kinds["loop"] / 5000 - 0.3) <= 0.03
        assert abs(kinds["both"] / 5000 - 0.5) <= 0.03

    def test_community_vertex_member_flip(self):
        I = LevyIntensity(
            SIG12, (VertexComponent(rate=1.0, rho=0.5, member_prob=0.5),)
        )
        r = restricted_measure(I, 3)
        rng = make_rng(51)
        saw_member = saw_edges = False
        for _ in range(500):
            m = r.sample(rng)
            members = [a for (a,) in m.tuples(0)]
            edges = m.tuples(1)
            assert members or edges
            if members:
                saw_member = True
                if edges:
                    assert all(members[0] in (a, b) for a, b in edges)
            if edges:
                saw_edges = True
        assert saw_member and saw_edges


class TestExplicitFinite:
    def _intensity(self):
        mu = FiniteMeasure(
            SIG1,
            3,
            {
                S(SIG1, 3, {3}): 2.0,
                S(SIG1, 3, {1, 3}): 1.0,
                S(SIG1, 3, {2}): 0.5,
            },
        )
        return LevyIntensity(SIG1, (ExplicitFinite(mu),))

    def test_pushforward_to_smaller_level(self):
        r = restricted_measure(self._intensity(), 2)
        assert r.total_rate == pytest.approx(1.5)
        law = r.components[0].level_measure
        assert law.mass(S(SIG1, 2, {1})) == pytest.approx(1.0)
        assert law.mass(S(SIG1, 2, {2})) == pytest.approx(0.5)

    def test_embedding_to_larger_level(self):
        r = restricted_measure(self._intensity(), 4)
        assert r.total_rate == pytest.approx(3.5)
        law = r.components[0].level_measure
        assert law.mass(S(SIG1, 4, {1, 3})) == pytest.approx(1.0)

    def test_conditional_sampling_frequencies(self):
        r = restricted_measure(self._intensity(), 3)
        rng = make_rng(52)
        draws = 30_000
        counts = Counter(serialize(r.sample(rng)) for _ in range(draws))
        for m, w in r.components[0].level_measure.items_sorted():
            p = w / 3.5
            band = 4 * math.sqrt(p * (1 - p) / draws)
            assert abs(counts[serialize(m)] / draws - p) <= band


class TestSimulate:
    def test_zero_intensity_constant_path(self):
        traj = simulate_levy(LevyIntensity(SIG1, ()), 5, 2.0, make_rng(53))
        assert len(traj.events) == 1
        assert traj.events[0] == (0.0, empty_structure(SIG1, 5))
        assert traj.state_at(2.0) == empty_structure(SIG1, 5)

    def test_jump_count_poisson(self):
        I = LevyIntensity(SIG1, (SetSingletonComponent(rate=1.0),))
        runs = 400
        counts = [
            len(simulate_levy(I, 10, 5.0, make_rng(54, stream=r)).events) - 1
            for r in range(runs)
        ]
        mean = sum(counts) / runs
        assert abs(mean - 50.0) <= 3 * math.sqrt(50) / 20

    def test_trajectory_legality(self):
        I = LevyIntensity(
            SIG2,
            (MixtureAtom(weight=1.0, probs=(0.2,)), LoopComponent(rate=0.5)),
        )
        traj = simulate_levy(I, 3, 3.0, make_rng(55))
        times = [t for t, _ in traj.events]
        assert times[0] == 0.0
        assert all(b > a for a, b in zip(times, times[1:]))
        states = [s for _, s in traj.events]
        assert all(x != y for x, y in zip(states, states[1:]))

    def test_right_continuity(self):
        I = LevyIntensity(SIG1, (SetSingletonComponent(rate=2.0),))
        traj = simulate_levy(I, 4, 2.0, make_rng(56))
        assert len(traj.events) > 2
        t1, s1 = traj.events[1]
        assert traj.state_at(t1) == s1

    def test_rejects_nonpositive_horizon(self):
        with pytest.raises(ValueError):
            simulate_levy(LevyIntensity(SIG1, ()), 3, 0.0, make_rng(57))

    def test_deterministic_given_seed(self):
        I = LevyIntensity(SIG1, (SetSingletonComponent(rate=1.0),))
        a = simulate_levy(I, 6, 2.0, make_rng(58))
        b = simulate_levy(I, 6, 2.0, make_rng(58))
        assert a.events == b.events


class TestTrajectoryType:
    def test_rejects_nonzero_start(self):
        with pytest.raises(ValueError):
            LevyTrajectory(2, 1.0, ((0.5, empty_structure(SIG1, 2)),))

    def test_rejects_unordered_times(self):
        e = empty_structure(SIG1, 2)
        s = S(SIG1, 2, {1})
        with pytest.raises(ValueError):
            LevyTrajectory(2, 2.0, ((0.0, e), (1.0, s), (1.0, e)))

    def test_rejects_consecutive_duplicates(self):
        e = empty_structure(SIG1, 2)
        with pytest.raises(ValueError):
            LevyTrajectory(2, 2.0, ((0.0, e), (1.0, e)))

    def test_rejects_event_beyond_horizon(self):
        e = empty_structure(SIG1, 2)
        with pytest.raises(ValueError):
            LevyTrajectory(2, 1.0, ((0.0, e), (1.5, S(SIG1, 2, {1}))))

    def test_state_at_bounds(self):
        e = empty_structure(SIG1, 2)
        traj = LevyTrajectory(2, 2.0, ((0.0, e), (1.0, S(SIG1, 2, {1}))))
        with pytest.raises(ValueError):
            traj.state_at(2.5)
        assert traj.state_at(0.999) == e


class TestRestrictTrajectory:
    def test_identity(self):
        I = LevyIntensity(SIG1, (SetSingletonComponent(rate=1.0),))
        traj = simulate_levy(I, 5, 1.0, make_rng(59))
        assert restrict_trajectory(traj, 5).events == traj.events

    def test_vanishing_jump(self):
        e3 = empty_structure(SIG1, 3)
        traj = LevyTrajectory(3, 2.0, ((0.0, e3), (1.0, S(SIG1, 3, {3}))))
        restricted = restrict_trajectory(traj, 2)
        assert restricted.events == ((0.0, empty_structure(SIG1, 2)),)

    def test_rejects_growth(self):
        traj = LevyTrajectory(2, 1.0, ((0.0, empty_structure(SIG1, 2)),))
        with pytest.raises(ValueError):
            restrict_trajectory(traj, 3)


class TestRestrictionInLaw:
    def test_restricted_increment_law_chi_square(self):
        # restricting a level-20 singleton process to [5] must reproduce the
        # level-5 conditional increment law: uniform over the five singletons
        from comblevy.inference import chi2_upper_tail

        I = LevyIntensity(SIG1, (SetSingletonComponent(rate=1.0),))
        counts = Counter()
        for r in range(200):
            traj = restrict_trajectory(
                simulate_levy(I, 20, 2.0, make_rng(70, stream=r)), 5
            )
            for inc in traj.jump_increments():
                (element,) = [a for (a,) in inc.tuples(0)]
                counts[element] += 1
        total = sum(counts.values())
        expected = total / 5
        statistic = sum(
            (counts.get(i, 0) - expected) ** 2 / expected for i in range(1, 6)
        )
        assert chi2_upper_tail(statistic, 4) > 0.001

    def test_per_element_marginal_general_rate(self):
        c, n, t, reps = 0.7, 10, 0.8, 400
        I = LevyIntensity(SIG1, (SetSingletonComponent(rate=c),))
        present = Counter()
        for r in range(reps):
            traj = simulate_levy(I, n, 1.0, make_rng(71, stream=r))
            for (a,) in traj.state_at(t).tuples(0):
                present[a] += 1
        p = marginal_flip_probability(c, t)
        band = 3 * math.sqrt(p * (1 - p) / reps)
        for i in range(1, n + 1):
            assert abs(present[i] / reps - p) <= band


class TestLawExchangeability:
    def _orbit_jump_counts(self, traj):
        counts = Counter()
        for inc in traj.jump_increments():
            counts[orbit_of(inc)] += 1
        return counts

    def test_relabeled_counts_exactly_equal(self):
        I = LevyIntensity(
            SIG1,
            (SetSingletonComponent(rate=1.0), MixtureAtom(weight=0.5, probs=(0.3,))),
        )
        traj = simulate_levy(I, 4, 3.0, make_rng(60))
        sigma = random_permutation(make_rng(61), 4)
        relabeled = LevyTrajectory(
            4,
            traj.horizon,
            tuple((t, relabel(s, sigma)) for t, s in traj.events),
        )
        assert self._orbit_jump_counts(traj) == self._orbit_jump_counts(relabeled)

    def test_independent_runs_match_within_noise(self):
        I = LevyIntensity(
            SIG1,
            (SetSingletonComponent(rate=1.0), MixtureAtom(weight=0.5, probs=(0.3,))),
        )
        runs = 100
        totals_a: Counter = Counter()
        totals_b: Counter = Counter()
        for r in range(runs):
            totals_a.update(
                self._orbit_jump_counts(simulate_levy(I, 4, 2.0, make_rng(62, stream=r)))
            )
            totals_b.update(
                self._orbit_jump_counts(simulate_levy(I, 4, 2.0, make_rng(63, stream=r)))
            )
        for oid in set(totals_a) | set(totals_b):
            a, b = totals_a[oid], totals_b[oid]
            assert abs(a - b) <= 3 * math.sqrt(a + b + 1)


class TestClosedForms:
    def test_marginal_flip_examples(self):
        assert marginal_flip_probability(1.0, 0.0) == 0.0
        assert marginal_flip_probability(1.0, 1e9) == pytest.approx(0.5)
        assert marginal_flip_probability(1.0, math.log(2) / 2) == pytest.approx(0.25)

    def test_marginal_flip_rate_scaling(self):
        assert marginal_flip_probability(2.0, 0.5) == pytest.approx(
            marginal_flip_probability(1.0, 1.0)
        )

    def test_rejects_negative(self):
        with pytest.raises(ValueError):
            marginal_flip_probability(-1.0, 1.0)

    def test_expm_zero_generator(self):
        E = expm_small(np.zeros((3, 3)), 5.0)
        assert np.allclose(E, np.eye(3), atol=1e-14)

    def test_expm_flip_generator(self):
        Q = np.array([[-1.0, 1.0], [1.0, -1.0]])
        for t in (0.1, 1.0, 10.0):
            E = expm_small(Q, t)
            assert abs(E[0, 1] - 0.5 * (1 - math.exp(-2 * t))) <= 1e-10
            assert abs(E[0, 0] - 0.5 * (1 + math.exp(-2 * t))) <= 1e-10

    def test_expm_consistent_with_closed_form(self):
        for c in (0.5, 1.0, 3.0):
            for t in (0.2, 1.0, 4.0):
                Q = c * np.array([[-1.0, 1.0], [1.0, -1.0]])
                assert abs(
                    expm_small(Q, t)[0, 1] - marginal_flip_probability(c, t)
                ) <= 1e-10

    def test_expm_random_generators_stochastic_rows(self):
        rng = make_rng(64)
        for _ in range(10):
            off = rng.random((4, 4)) * 2.0
            np.fill_diagonal(off, 0.0)
            Q = off - np.diag(off.sum(axis=1))
            E = expm_small(Q, 0.7)
            assert np.abs(E.sum(axis=1) - 1.0).max() <= 1e-10
            assert E.min() >= 0.0

    def test_expm_rejects_invalid(self):
        with pytest.raises(ValueError):
            expm_small(np.array([[0.0, -1.0], [1.0, 0.0]]), 1.0)
        with pytest.raises(ValueError):
            expm_small(np.array([[-1.0, 2.0], [1.0, -1.0]]), 1.0)
        with pytest.raises(ValueError):
            expm_small(np.zeros((2, 3)), 1.0)


class TestFileFormats:
    def _intensity(self):
        mu = FiniteMeasure(SIG12, 2, {Structure.from_tuples(SIG12, 2, [{1}, set()]): 0.4})
        return LevyIntensity(
            SIG12,
            (
                MixtureAtom(weight=1.0, probs=(0.1, 0.05)),
                VertexComponent(rate=0.5, rho=0.4, member_prob=0.2),
                PairComponent(rate=0.3, pattern=(0.2, 0.3, 0.5)),
                LoopComponent(rate=0.1, pattern=(0.1, 0.8, 0.1)),
                ExplicitFinite(mu),
            ),
        )

    def test_intensity_json_roundtrip(self):
        I = self._intensity()
        back = intensity_from_json(intensity_to_json(I))
        assert back == I

    def test_intensity_rejects_malformed(self):
        with pytest.raises(ValueError):
            intensity_from_json("nope")
        with pytest.raises(ValueError):
            intensity_from_json('{"signature": "(1)", "components": [{"type": "wat"}]}')
        with pytest.raises(ValueError):
            intensity_from_json('{"signature": "(1)", "components": [{"type": "vertex"}]}')

    def test_trajectory_csv_roundtrip(self):
        I = LevyIntensity(SIG1, (SetSingletonComponent(rate=1.0),))
        traj = simulate_levy(I, 4, 2.0, make_rng(65))
        back = trajectory_from_csv(trajectory_to_csv(traj), horizon=traj.horizon)
        assert back.events == traj.events

    def test_events_jsonl_roundtrip(self):
        I = LevyIntensity(SIG1, (SetSingletonComponent(rate=1.0),))
        traj = simulate_levy(I, 4, 2.0, make_rng(66))
        text = events_to_jsonl(traj, seed=66)
        back = events_from_jsonl(text)
        assert back.events == traj.events
        assert back.horizon == traj.horizon
        import json

        assert json.loads(text.splitlines()[0])["seed"] == 66
