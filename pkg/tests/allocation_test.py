"""
Tests of the scheduling and pilot assignment algorithms.

Licensed under the MIT License
Written by Jean Da Rolt
"""
import numpy as np
import pytest

from tests.scenarios import synthetic_stats
from xlmimo.models import allocation
from xlmimo.models.channel import error_covariances
from xlmimo.models.combining import se_map
from xlmimo.models.deterministic import asymptotic_sinr_centralized, \
    ergodic_sinr_centralized, u_switch
from xlmimo.models.system_model import select_subarrays
from xlmimo.structs.allocation_state import AllocationState, AllocationStep
from xlmimo.structs.channel_statistics import ChannelStatistics
from xlmimo.structs.deterministic_sinr import SwitchRule
from xlmimo.structs.pilot_config import UNSCHEDULED, PilotConfig
from xlmimo.structs.selection import SelectionMatrixSet
from xlmimo.utils.exceptions import AllocationError, PilotError


@pytest.fixture
def scenario():
    stats = synthetic_stats(K=4, L=3, M=3, seed=11, power=1.,
                            noise_power=0.5)
    return stats, select_subarrays('lsf', stats, 2)


def _min_se(evaluator, pilots):
    sinr, _ = evaluator.evaluate(pilots)
    return float(np.min(se_map(sinr[pilots.scheduled], pilots.tau_p,
                               pilots.tau_c)))


def _separated_stats():
    """UEs 0 and 1 share subarray 0, UE 2 is alone on subarray 1."""
    R = np.zeros((3, 2, 4, 4), dtype=complex)  # pylint: disable=C0103
    R[0, 0] = np.eye(4)
    R[1, 0] = 0.5 * np.eye(4)
    R[2, 1] = 0.25 * np.eye(4)
    stats = ChannelStatistics.from_components(
        np.zeros((3, 2, 4), dtype=complex), R, 1., 0.01, correlated=False)
    return stats, select_subarrays('lsf', stats, 1)


def test_scheduling_order(scenario):
    stats, _ = scenario
    order = allocation.scheduling_order(stats)
    assert sorted(order) == list(range(stats.K))
    assert np.all(np.diff(stats.beta_bar[order]) <= 0)
    flat = stats.copy()
    flat.beta = np.ones_like(stats.beta)
    np.testing.assert_array_equal(allocation.scheduling_order(flat),
                                  np.arange(stats.K))


def test_candidates():
    t = np.full(3, UNSCHEDULED)
    configs = allocation._candidates(t, 1, 0, 8)  # pylint: disable=W0212
    assert [(pilot, c.tau_p) for pilot, c in configs] == [(0, 1)]
    t = np.array([0, 1, UNSCHEDULED])
    configs = allocation._candidates(t, 2, 2, 8)  # pylint: disable=W0212
    assert [(pilot, c.tau_p) for pilot, c in configs] == \
        [(0, 2), (1, 2), (2, 3)]
    # no new pilot once tau_p reaches tau_c - 1
    configs = allocation._candidates(t, 2, 2, 3)  # pylint: disable=W0212
    assert [pilot for pilot, _ in configs] == [0, 1]
    with pytest.raises(PilotError, match='no room'):
        allocation._candidates(t, 2, 0, 1)  # pylint: disable=W0212


def test_pilot_ties_go_to_lowest_index(scenario):
    stats, _ = scenario
    state = allocation._greedy(  # pylint: disable=W0212
        'constant', stats, 8, lambda pilots: (0., 0., None), lambda _: True)
    np.testing.assert_array_equal(state.pilots.t, 0)
    assert state.tau_p == 1
    assert state.U == stats.K
    assert [step.pilot for step in state.trace] == [0] * stats.K


def test_error_covariance_cache(scenario):
    stats, _ = scenario
    cache = allocation.ErrorCovarianceCache(stats)
    pilots = PilotConfig(2, 8, [0, 1, 0, UNSCHEDULED])
    expected, _ = error_covariances(stats, pilots)
    np.testing.assert_allclose(cache.covariances(pilots), expected,
                               rtol=1e-10, atol=1e-14)
    misses = cache.misses
    cache.covariances(pilots)
    assert cache.misses == misses
    cache.covariances(pilots.with_pilot(3, 1))
    assert cache.misses == misses + 2


def test_schedule_nmse_admits_everyone(scenario):
    stats, sel = scenario
    state = allocation.schedule_nmse(stats, sel, 1., 8)
    assert state.U == stats.K
    assert state.scheduled == list(allocation.scheduling_order(stats))
    # a new pilot always lowers every NMSE while the cap allows it
    assert not state.pilots.reuse
    assert all(step.admitted for step in state.trace)
    assert all(0 < step.metric < 1 for step in state.trace)


def test_schedule_nmse_respects_pilot_cap(scenario):
    stats, sel = scenario
    state = allocation.schedule_nmse(stats, sel, 1., 3)
    assert state.tau_p == 2
    assert state.pilots.reuse
    assert state.U == stats.K


def test_schedule_nmse_threshold(scenario):
    stats, sel = scenario
    reference = allocation.schedule_nmse(stats, sel, 1., 3)
    threshold = max(step.metric for step in reference.trace) - 1e-9
    state = allocation.schedule_nmse(stats, sel, threshold, 3)
    assert state.U < stats.K
    assert all(step.metric <= threshold for step in state.trace
               if step.admitted)
    assert not state.trace[-1].admitted
    assert state.U == reference.admitted_count(threshold, above=False)
    nobody = allocation.schedule_nmse(stats, sel, 1e-9, 3)
    assert nobody.U == 0
    assert len(nobody.trace) == 1 and not nobody.trace[0].admitted
    assert np.all(nobody.pilots.t == UNSCHEDULED)
    with pytest.raises(AllocationError, match='positive'):
        allocation.schedule_nmse(stats, sel, 0., 3)


@pytest.mark.parametrize('threads', [1, 3])
def test_incremental_matches_literal(scenario, threads):
    stats, sel = scenario
    literal = allocation.schedule_nmse(stats, sel, 1., 3)
    cached = allocation.schedule_nmse(stats, sel, 1., 3, incremental=True,
                                      threads=threads)
    assert cached.scheduled == literal.scheduled
    assert cached.pilots == literal.pilots
    np.testing.assert_allclose([s.metric for s in cached.trace],
                               [s.metric for s in literal.trace],
                               rtol=1e-10)
    for mode, schedule in (('centralized',
                            allocation.schedule_sinr_centralized),
                           ('distributed',
                            allocation.schedule_sinr_distributed)):
        literal = schedule(stats, sel, 0., 4)
        cached = schedule(stats, sel, 0., 4, incremental=True,
                          threads=threads)
        assert cached.pilots == literal.pilots, mode


@pytest.mark.parametrize('mode', ['centralized', 'distributed'])
def test_max_min_scheduling(scenario, mode):
    stats, sel = scenario
    schedule = getattr(allocation, f"schedule_sinr_{mode}")
    state = schedule(stats, sel, 0., 4)
    assert state.U == stats.K
    assert state.tau_p <= 3
    assert state.algorithm == 'max_min_ana'
    if mode == 'distributed':
        rows = state.weights.mu[state.scheduled]
        np.testing.assert_allclose(rows.sum(axis=1), 1.)
    else:
        assert state.weights is None
    evaluator = allocation.DeterministicEvaluator(stats, sel, mode)
    assert state.trace[-1].metric == \
        pytest.approx(_min_se(evaluator, state.pilots))
    strict = schedule(stats, sel, 1e3, 4)
    assert strict.U == 0 and not strict.trace[0].admitted
    with pytest.raises(AllocationError, match='nonnegative'):
        schedule(stats, sel, -1., 4)


@pytest.mark.parametrize('mode', ['centralized', 'distributed'])
def test_candidates_share_one_approximation(mode):
    stats, sel = _separated_stats()
    evaluator = allocation.DeterministicEvaluator(stats, sel, mode)
    assert evaluator.switch_rule(1) == u_switch(False, False, mode, 4, 1)
    assert evaluator.switch_rule(1) == SwitchRule(2)
    shared = PilotConfig(1, 8, [0, 0, UNSCHEDULED])
    separate = PilotConfig(2, 8, [0, 1, UNSCHEDULED])
    # the shared pilot does not move UE 1 to the ergodic form
    for pilots in (shared, separate):
        sinr, _ = evaluator.evaluate(pilots)
        assert sinr[1] == pytest.approx(
            asymptotic_sinr_centralized(stats, pilots, sel, 1).value)
    forced = allocation.DeterministicEvaluator(stats, sel, mode,
                                               rule=SwitchRule(0))
    for pilots in (shared, separate):
        sinr, _ = forced.evaluate(pilots)
        assert sinr[1] == pytest.approx(
            ergodic_sinr_centralized(stats, pilots, sel, 1).value)


def test_threads_do_not_change_allocation(scenario):
    stats, sel = scenario
    first = allocation.schedule_sinr_distributed(stats, sel, 0., 4)
    second = allocation.schedule_sinr_distributed(stats, sel, 0., 4,
                                                  threads=4)
    assert first.pilots == second.pilots
    np.testing.assert_array_equal(first.weights.mu, second.weights.mu)


def test_monte_carlo_evaluator(scenario):
    stats, sel = scenario
    pilots = PilotConfig(2, 8, [0, 1, UNSCHEDULED, 0])
    evaluator = allocation.MonteCarloEvaluator(stats, sel, 'distributed',
                                               seed=3, trials=5)
    first, weights = evaluator.evaluate(pilots)
    second, _ = evaluator.evaluate(pilots)
    np.testing.assert_array_equal(first, second)
    assert np.isnan(first[2]) and np.all(first[[0, 1, 3]] > 0)
    np.testing.assert_allclose(weights.mu[[0, 1, 3]].sum(axis=1), 1.)
    central = allocation.MonteCarloEvaluator(stats, sel, 'centralized',
                                             seed=3, trials=5)
    sinr, none = central.evaluate(pilots)
    assert none is None
    assert np.all(sinr[[0, 1, 3]] >= first[[0, 1, 3]] * (1 - 1e-9))


def test_monte_carlo_greedy(scenario):
    stats, sel = scenario
    evaluator = allocation.MonteCarloEvaluator(stats, sel, 'centralized',
                                               seed=0, trials=4)
    state = allocation.schedule_sinr_centralized(
        stats, sel, 0., 4, evaluator=evaluator, algorithm='max_min_num')
    assert state.algorithm == 'max_min_num'
    assert state.U == stats.K


def test_baseline_random(scenario):
    stats, _ = scenario
    state = allocation.baseline_random(stats, 2, np.random.default_rng(0), 8)
    again = allocation.baseline_random(stats, 2, np.random.default_rng(0), 8)
    assert state.pilots == again.pilots
    assert state.U == stats.K
    assert np.all((state.pilots.t >= 0) & (state.pilots.t < 2))
    partial = allocation.baseline_random(stats, 2, np.random.default_rng(0),
                                         8, U=2)
    strongest = allocation.scheduling_order(stats)[:2]
    np.testing.assert_array_equal(partial.pilots.scheduled,
                                  np.sort(strongest))
    with pytest.raises(PilotError):
        allocation.baseline_random(stats, 0, np.random.default_rng(0), 8)


def test_orthogonal_random(scenario):
    stats, _ = scenario
    state = allocation.orthogonal_random(stats, np.random.default_rng(1), 8,
                                         U=3)
    assert state.tau_p == 3
    assert not state.pilots.reuse
    assert sorted(state.pilots.t[state.scheduled]) == [0, 1, 2]
    assert state.pilots.U == 3


def test_baseline_book(scenario):
    stats, sel = scenario
    state = allocation.baseline_greedy_book(stats, sel, 2,
                                            np.random.default_rng(4), 8)
    assert state.algorithm == 'book'
    assert len(state.serving) == stats.K
    t = state.pilots.t
    for l in range(stats.L):
        for pilot in range(2):
            served = [k for k in state.scheduled if l in state.serving[k] and
                      t[k] == pilot]
            assert len(served) <= 1
    for k in state.scheduled:
        assert len(state.serving[k]) > 0
        assert set(state.serving[k]) <= set(sel[k])
    for k in state.unserved:
        assert t[k] == UNSCHEDULED
        assert len(state.serving[k]) == 1
        assert state.serving[k][0] in sel[k]
    assert set(state.scheduled) | set(state.unserved) == set(range(stats.K))
    with pytest.raises(PilotError, match='exceeds'):
        allocation.baseline_greedy_book(stats, sel, 5,
                                        np.random.default_rng(0), 8)


def test_baseline_book_respects_selection():
    R = np.broadcast_to(np.eye(2, dtype=complex), (2, 2, 2, 2)).copy()  # pylint: disable=C0103
    R[1] *= 0.5
    stats = ChannelStatistics.from_components(
        np.zeros((2, 2, 2), dtype=complex), R, 1., 1., correlated=False)
    apart = SelectionMatrixSet([[0], [1]], 2)
    state = allocation.baseline_greedy_book(stats, apart, 1,
                                            np.random.default_rng(0), 4)
    assert state.unserved == []
    assert [list(s) for s in state.serving] == [[0], [1]]
    # with both subarrays open the stronger UE wins them both
    both = SelectionMatrixSet([[0, 1], [0, 1]], 2)
    state = allocation.baseline_greedy_book(stats, both, 1,
                                            np.random.default_rng(0), 4)
    assert state.unserved == [1]
    assert state.scheduled == [0]


def test_contamination(scenario):
    stats, _ = scenario
    t = np.array([0, 1, 0, UNSCHEDULED])
    assert allocation.contamination(stats, t, 0, 1) == \
        pytest.approx(stats.beta_nlos[0, 1] + stats.beta_nlos[2, 1])
    assert allocation.contamination(stats, t, 2, 1) == 0.


@pytest.mark.parametrize('K, max_blocks, expected', [
    (1, 1, 1),
    (3, 3, 5),
    (4, 4, 15),
    (5, 5, 52),
    (4, 2, 8),
    (4, 1, 1),
])
def test_restricted_growth_strings(K, max_blocks, expected):  # pylint: disable=C0103
    strings = list(allocation.restricted_growth_strings(K, max_blocks))
    assert len(strings) == expected
    assert len(set(strings)) == expected
    assert strings[0] == (0,) * K
    for string in strings:
        assert max(string) < max_blocks
        seen = -1
        for pilot in string:
            assert pilot <= seen + 1
            seen = max(seen, pilot)


@pytest.mark.parametrize('mode', ['centralized', 'distributed'])
def test_exhaustive_search_is_optimal(scenario, mode):
    stats, sel = scenario
    evaluator = allocation.DeterministicEvaluator(stats, sel, mode)
    greedy = getattr(allocation, f"schedule_sinr_{mode}")(stats, sel, 0., 5)
    best = allocation.exhaustive_search(stats, sel, stats.K, 5, mode,
                                        threads=2)
    assert best.algorithm == 'exhaustive'
    assert best.pilots.U == stats.K
    assert best.tau_p <= 4
    assert _min_se(evaluator, best.pilots) >= \
        _min_se(evaluator, greedy.pilots) - 1e-12


@pytest.mark.parametrize('mode', ['centralized', 'distributed'])
def test_exhaustive_beats_greedy(mode):
    stats, sel = _separated_stats()
    evaluator = allocation.DeterministicEvaluator(stats, sel, mode)
    greedy = getattr(allocation, f"schedule_sinr_{mode}")(stats, sel, 0., 8)
    best = allocation.exhaustive_search(stats, sel, 3, 8, mode)
    optimum = _min_se(evaluator, best.pilots)
    reached = _min_se(evaluator, greedy.pilots)
    assert optimum >= reached - 1e-12
    assert reached >= 0.95 * optimum
    # UE 2 reuses a pilot since it is alone on its subarray
    np.testing.assert_array_equal(greedy.pilots.t, [0, 1, 0])
    np.testing.assert_array_equal(best.pilots.t, greedy.pilots.t)
    assert [step.pilot for step in greedy.trace] == [0, 1, 0]


def test_exhaustive_limits(scenario):
    stats, sel = scenario
    with pytest.raises(AllocationError, match='at most 3'):
        allocation.exhaustive_search(stats, sel, 4, 8, 'centralized',
                                     max_ues=3)
    with pytest.raises(PilotError, match='no room'):
        allocation.exhaustive_search(stats, sel, 4, 1, 'centralized')


def test_state_prefix_and_report():
    pilots = PilotConfig(3, 8, [2, 0, 1, UNSCHEDULED])
    trace = [AllocationStep(1, 0, 2.5, True), AllocationStep(2, 1, 2.0, True),
             AllocationStep(0, 2, 1.5, True),
             AllocationStep(3, 0, 0.5, False)]
    state = AllocationState('max_min_ana', [1, 2, 0], pilots, trace=trace)
    assert state.admitted_count(1.8) == 2
    assert state.admitted_count(3.) == 0
    assert state.admitted_count(2.2, above=False) == 0
    prefix = state.prefix(2)
    assert prefix.scheduled == [1, 2]
    assert prefix.tau_p == 2
    np.testing.assert_array_equal(prefix.pilots.t,
                                  [UNSCHEDULED, 0, 1, UNSCHEDULED])
    report = state.to_dict()
    assert report['pilots'] == {1: 0, 2: 1, 0: 2}
    assert report['tau_p'] == 3
    assert report['trace'][-1] == {'ue': 3, 'pilot': 0, 'metric': 0.5,
                                   'admitted': False}
    assert 'weights' not in report and 'serving' not in report
