"""
Tests of the deterministic SINR approximations, the switching rule and the
complexity counts.

Licensed under the MIT License
Written by Jean Da Rolt
"""
import numpy as np
import pytest
import scipy.linalg

from tests.scenarios import identity_stats, orthogonal_pilots, \
    synthetic_stats
from xlmimo.functions.ldl import MultiplicationCounter
from xlmimo.functions.metrics import ergodic_mnae
from xlmimo.models import deterministic
from xlmimo.models.channel import error_covariances, mmse_estimate, \
    sample_channel
from xlmimo.models.combining import evaluate_centralized, \
    evaluate_distributed
from xlmimo.models.system_model import select_subarrays
from xlmimo.structs.channel_estimate import ChannelEstimate
from xlmimo.structs.channel_statistics import ChannelStatistics
from xlmimo.structs.deterministic_sinr import SwitchRule
from xlmimo.structs.pilot_config import UNSCHEDULED, PilotConfig
from xlmimo.utils.exceptions import PilotError, SelectionError


def _single_ue_sinr(beta, p, noise_power, tau_p, N):  # pylint: disable=C0103
    c = beta * noise_power / (p * tau_p * beta + noise_power)
    return p * N * (beta - c) / (noise_power + p * c)


@pytest.mark.parametrize('kind', ['ergodic', 'asymptotic'])
def test_single_ue_closed_form(kind):
    beta, p, noise_power, tau_p = 2., 0.5, 0.3, 2
    stats = identity_stats(1, 3, 4, beta, p, noise_power)
    pilots = PilotConfig(tau_p, 8, [0])
    sel = select_subarrays('lsf', stats, 2)
    central = getattr(deterministic, f"{kind}_sinr_centralized")(
        stats, pilots, sel, 0)
    local = getattr(deterministic, f"{kind}_sinr_distributed")(
        stats, pilots, sel, 0)
    assert central.kind == kind and central.mode == 'centralized'
    assert central.value == pytest.approx(
        _single_ue_sinr(beta, p, noise_power, tau_p, 8))
    np.testing.assert_allclose(
        local.values, _single_ue_sinr(beta, p, noise_power, tau_p, 4))
    assert local.value == pytest.approx(central.value)


def test_single_ue_reliable_estimate():
    stats = identity_stats(1, 2, 4, beta=1e-3, power=0.1, noise_power=1e-6)
    sel = select_subarrays('lsf', stats, 2)
    result = deterministic.asymptotic_sinr_centralized(
        stats, PilotConfig(64, 128, [0]), sel, 0)
    assert result.value == pytest.approx(0.1 * 8 * 1e-3 / 1e-6, rel=0.02)


def _explicit_zbar(stats, C, users, k, subarrays):  # pylint: disable=C0103
    N = stats.M * len(subarrays)  # pylint: disable=C0103
    Zbar = stats.noise_power * np.eye(N, dtype=complex)  # pylint: disable=C0103
    for i in users:
        C_i = scipy.linalg.block_diag(*C[i, subarrays])  # pylint: disable=C0103
        mean = stats.hbar[i, subarrays].reshape(-1)
        Q_i = np.outer(mean, mean.conj()) + \
            scipy.linalg.block_diag(*stats.R[i, subarrays])  # pylint: disable=C0103
        Zbar += stats.p[i] * (C_i if i == k else Q_i)
        if i == k:
            X = Q_i - C_i  # pylint: disable=C0103
    return Zbar, X


def test_ergodic_centralized_formula():
    stats = synthetic_stats(K=4, L=3, M=3, seed=2)
    pilots = PilotConfig(2, 8, [0, 1, 0, UNSCHEDULED])
    sel = select_subarrays('lsf', stats, 2)
    C, _ = error_covariances(stats, pilots)  # pylint: disable=C0103
    for k in pilots.scheduled:
        Zbar, X = _explicit_zbar(stats, C, pilots.scheduled, k, sel[k])  # pylint: disable=C0103
        expected = stats.p[k] * np.real(np.trace(np.linalg.solve(Zbar, X)))
        result = deterministic.ergodic_sinr_centralized(stats, pilots, sel, k)
        assert result.value == pytest.approx(expected, rel=1e-8)
        np.testing.assert_array_equal(result.subarrays, sel[k])


def test_ergodic_distributed_formula():
    stats = synthetic_stats(K=3, L=3, M=3, seed=3)
    pilots = PilotConfig(2, 8, [0, 1, 0])
    sel = select_subarrays('lsf', stats, 2)
    C, _ = error_covariances(stats, pilots)  # pylint: disable=C0103
    for k in range(3):
        result = deterministic.ergodic_sinr_distributed(stats, pilots, sel, k)
        for value, l in zip(result.values, sel[k]):
            Zbar, X = _explicit_zbar(stats, C, range(3), k, [l])  # pylint: disable=C0103
            expected = stats.p[k] * np.real(np.trace(np.linalg.solve(Zbar,
                                                                     X)))
            assert value == pytest.approx(expected, rel=1e-8)
        assert result.value == pytest.approx(np.sum(result.values))


def test_asymptotic_formula():
    stats = synthetic_stats(K=3, L=2, M=3, seed=4)
    pilots = orthogonal_pilots(3)
    sel = select_subarrays('lsf', stats, 1)
    C, _ = error_covariances(stats, pilots)  # pylint: disable=C0103
    k = 1
    l = sel[k][0]
    X = stats.Q[:, l] - C[:, l]  # pylint: disable=C0103
    numerator = np.real(np.trace(X[k])) - sum(
        np.real(np.trace(X[i] @ X[k])) / np.real(np.trace(X[i]))
        for i in (0, 2))
    denominator = np.sum(stats.p * np.real(np.trace(
        C[:, l], axis1=-2, axis2=-1))) / stats.M + stats.noise_power
    expected = stats.p[k] * max(numerator, 0.) / denominator
    result = deterministic.asymptotic_sinr_distributed(stats, pilots, sel, k)
    assert result.values[0] == pytest.approx(expected, rel=1e-8)


def _rank_one_stats(means, noise_power=1.):
    means = np.asarray(means, dtype=complex)
    K, L, M = means.shape  # pylint: disable=C0103
    return ChannelStatistics.from_components(
        means, np.zeros((K, L, M, M), dtype=complex), 1., noise_power)


def test_asymptotic_clamps_negative_numerator():
    a = np.array([1., 1j, -1.])
    stats = _rank_one_stats([[a]] * 3)
    sel = select_subarrays('lsf', stats, 1)
    result = deterministic.asymptotic_sinr_distributed(
        stats, orthogonal_pilots(3), sel, 0)
    assert result.values[0] == 0.
    assert result.diagnostics.clamped == 1
    assert result.diagnostics.skipped == 0
    assert 'clamped numerators: 1' in str(result.diagnostics)


def test_asymptotic_skips_silent_interferer():
    stats = _rank_one_stats([[[1., 1j, -1.]], [[0., 0., 0.]]])
    sel = select_subarrays('lsf', stats, 1)
    result = deterministic.asymptotic_sinr_centralized(
        stats, orthogonal_pilots(2), sel, 0)
    assert result.diagnostics.skipped == 1
    assert result.diagnostics.clamped == 0
    assert result.value == pytest.approx(3.)


def test_unscheduled_ue():
    stats = synthetic_stats(K=2)
    pilots = PilotConfig(1, 4, [0, UNSCHEDULED])
    sel = select_subarrays('lsf', stats, 1)
    for function in (deterministic.ergodic_sinr_centralized,
                     deterministic.asymptotic_sinr_distributed):
        with pytest.raises(PilotError, match='not scheduled'):
            function(stats, pilots, sel, 1)


@pytest.mark.parametrize('correlated, reuse, mode, expected', [
    (False, False, 'centralized', 32),
    (False, False, 'distributed', 8),
    (False, True, 'centralized', 16),
    (False, True, 'distributed', 4),
    (True, False, 'centralized', 16),
    (True, False, 'distributed', 4),
    (True, True, 'centralized', 0),
    (True, True, 'distributed', 0),
])
def test_u_switch_table(correlated, reuse, mode, expected):
    rule = deterministic.u_switch(correlated, reuse, mode, 16, 4)
    assert rule == SwitchRule(expected)
    assert rule.provenance == 'table'


def test_u_switch_override():
    rule = deterministic.u_switch(True, True, 'centralized', 16, 4,
                                  override=7)
    assert rule == SwitchRule(7, 'config-override')
    assert 'config-override' in str(rule)


def test_select_approximation():
    rule = SwitchRule(32)
    assert deterministic.select_approximation(32, rule) == 'asymptotic'
    assert deterministic.select_approximation(33, rule) == 'ergodic'
    assert deterministic.select_approximation(1, SwitchRule(0)) == 'ergodic'


@pytest.mark.parametrize('kind, mode, M, L_k, U, expected', [
    ('ergodic', 'centralized', 4, 2, 3, 1556),
    ('ergodic', 'distributed', 4, 2, 3, 388),
    ('ergodic', 'centralized', 1, 1, 1, 2),
    ('asymptotic', 'centralized', 4, 2, 3, 384),
    ('asymptotic', 'distributed', 4, 2, 3, 192),
    ('asymptotic', 'centralized', 4, 2, 1, 0),
    ('asymptotic', 'distributed', 4, 2, 0, 0),
])
def test_complexity_count(kind, mode, M, L_k, U, expected):  # pylint: disable=C0103
    assert deterministic.complexity_count(kind, mode, M, L_k, U) == expected


def test_complexity_count_unknown_kind():
    with pytest.raises(ValueError, match='Unknown'):
        deterministic.complexity_count('neumann', 'centralized', 4, 1, 2)


@pytest.mark.parametrize('mode', ['centralized', 'distributed'])
def test_counted_path_agrees(mode):
    stats = synthetic_stats(K=3, L=3, M=3, seed=6)
    pilots = PilotConfig(2, 8, [0, 1, 0])
    sel = select_subarrays('lsf', stats, 2)
    function = getattr(deterministic, f"ergodic_sinr_{mode}")
    for k in range(3):
        counter = MultiplicationCounter()
        plain = function(stats, pilots, sel, k)
        counted = function(stats, pilots, sel, k, counter=counter)
        np.testing.assert_allclose(counted.values, plain.values, rtol=1e-8)
        assert counter.total == plain.multiplications


def test_deterministic_sinr_dispatch():
    stats = synthetic_stats(K=3, L=2, M=4, seed=1)
    pilots = orthogonal_pilots(3)
    sel = select_subarrays('lsf', stats, 2)
    C, _ = error_covariances(stats, pilots)  # pylint: disable=C0103
    assert deterministic.deterministic_sinr(
        stats, pilots, sel, 0, 'centralized', SwitchRule(3), C).kind == \
        'asymptotic'
    assert deterministic.deterministic_sinr(
        stats, pilots, sel, 0, 'distributed', SwitchRule(2), C).kind == \
        'ergodic'
    # correlated and orthogonal: U_switch = M L_k / 4 = 2 < U
    assert deterministic.deterministic_sinr(
        stats, pilots, sel, 0, 'centralized').kind == 'ergodic'
    with pytest.raises(SelectionError, match='mode'):
        deterministic.deterministic_sinr(stats, pilots, sel, 0, 'cellular')


def test_sinr_selection_context():
    stats = identity_stats(3, 2, 4, beta=1., power=1., noise_power=0.5)
    pilots = PilotConfig(3, 6, [0, UNSCHEDULED, 1])
    context = deterministic.sinr_selection_context(stats, pilots)
    assert context.kind == 'asymptotic'
    assert context.local_sinr.shape == (3, 2)
    assert np.all(context.local_sinr[1] == 0)
    assert np.all(context.local_sinr[[0, 2]] > 0)
    forced = deterministic.sinr_selection_context(stats, pilots,
                                                  rule_override=0)
    assert forced.kind == 'ergodic'


def test_neumann_ratio():
    Zbar = np.diag([1., 2., 4.]).astype(complex)  # pylint: disable=C0103
    assert deterministic.neumann_ratio(Zbar, Zbar) == pytest.approx(0.)
    assert deterministic.neumann_ratio(1.5 * Zbar, Zbar) == \
        pytest.approx(0.5)


@pytest.mark.slow
def test_ergodic_tracks_monte_carlo():
    stats = identity_stats(1, 2, 16, beta=1., power=1., noise_power=1.)
    pilots = orthogonal_pilots(1)
    sel = select_subarrays('lsf', stats, 2)
    expected = deterministic.ergodic_sinr_centralized(stats, pilots, sel,
                                                      0).value
    rng = np.random.default_rng(0)
    sinrs = []
    for _ in range(300):
        real = sample_channel(stats, rng)
        est = mmse_estimate(real, stats, pilots, rng)
        sinrs.append(evaluate_centralized(est, stats, sel).inst[0])
    assert np.mean(np.log2(1 + np.array(sinrs))) == \
        pytest.approx(np.log2(1 + expected), rel=0.1)


def test_vanishing_noise():
    for noise_power in (1e-4, 1e-6):
        stats = identity_stats(1, 1, 4, beta=1., power=1.,
                               noise_power=noise_power)
        sel = select_subarrays('lsf', stats, 1)
        for kind in ('ergodic', 'asymptotic'):
            value = getattr(deterministic, f"{kind}_sinr_centralized")(
                stats, orthogonal_pilots(1), sel, 0).value
            # noise-limited: the SINR grows as 1 / sigma^2
            assert value * noise_power == \
                pytest.approx(4 / (2 + noise_power), rel=1e-6)
    # interference-limited: 4 interferers fill the 4 dimensions
    stats = identity_stats(5, 1, 4, beta=1., power=1., noise_power=1e-9)
    sel = select_subarrays('lsf', stats, 1)
    value = deterministic.ergodic_sinr_centralized(
        stats, orthogonal_pilots(5), sel, 0).value
    assert value == pytest.approx(1., rel=1e-6)


def _equal_gain_load(M, L):  # pylint: disable=C0103
    """U = 4 M L UEs of equal gain on orthogonal pilots, with a noise power
    matching the total received power."""
    U = 4 * M * L  # pylint: disable=C0103
    stats = identity_stats(U, L, M, beta=1., power=1., noise_power=float(U))
    return stats, orthogonal_pilots(U), select_subarrays('lsf', stats, L)


def _trial_estimates(stats, pilots, trials, seed):
    real = sample_channel(stats, np.random.default_rng(seed), trials=trials)
    est = mmse_estimate(real, stats, pilots,
                        np.random.default_rng(seed + 1))
    for trial in range(trials):
        yield ChannelEstimate(est.hhat[trial], est.C, est.Psi, pilots)


def test_neumann_regime_accuracy():
    stats, pilots, sel = _equal_gain_load(8, 1)
    C, _ = error_covariances(stats, pilots)  # pylint: disable=C0103
    U = pilots.U  # pylint: disable=C0103
    expected = np.array([deterministic.ergodic_sinr_distributed(
        stats, pilots, sel, k, C).value for k in range(U)])
    Zbar = stats.noise_power * np.eye(stats.M) + \
        np.sum(stats.Q[1:, 0], axis=0) + C[0, 0]  # pylint: disable=C0103
    ratios = []
    for est in _trial_estimates(stats, pilots, 200, 40):
        others = est.hhat[1:, 0]
        Z = others.T @ others.conj() + np.sum(C[:, 0], axis=0) + \
            stats.noise_power * np.eye(stats.M)  # pylint: disable=C0103
        assert deterministic.neumann_ratio(Z, Zbar) < 1
        report = evaluate_distributed(est, stats, sel, 'optimal')
        ratios.append(report.inst / expected)
    assert np.mean(ratios) == pytest.approx(1., rel=0.05)


@pytest.mark.slow
@pytest.mark.parametrize('mode, M, L', [
    ('distributed', 8, 1),
    ('centralized', 4, 2),
])
def test_ergodic_mnae_at_high_load(mode, M, L):  # pylint: disable=C0103
    stats, pilots, sel = _equal_gain_load(M, L)
    C, _ = error_covariances(stats, pilots)  # pylint: disable=C0103
    ergodic = getattr(deterministic, f"ergodic_sinr_{mode}")
    expected = np.array([ergodic(stats, pilots, sel, k, C).value
                         for k in range(pilots.U)])
    se = []
    for est in _trial_estimates(stats, pilots, 500, 50):
        if mode == 'centralized':
            report = evaluate_centralized(est, stats, sel)
        else:
            report = evaluate_distributed(est, stats, sel, 'optimal')
        se.append(np.log2(1 + report.inst))
    assert ergodic_mnae(se, np.log2(1 + expected)) <= 0.15
