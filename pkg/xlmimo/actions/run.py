"""
Monte Carlo orchestration of the three experiment kinds.

link         SE and approximation accuracy of centralized and distributed
             operation for fixed pilots, swept over M, U, L_K or TAU_C.
allocation   minimum and mean SE of the first U UEs admitted by each
             scheduling algorithm, plus the number of UEs each algorithm
             serves at the SE threshold.
exhaustive   greedy max-min scheduling against the exhaustive optimum,
             swept over TAU_C.

Every (drop, trial) pair draws from its own random stream, so the metrics do
not depend on the number of worker threads.

Licensed under The MIT License
Written by Jean Da Rolt
"""
import collections
import functools
import logging
import math
from concurrent.futures import ThreadPoolExecutor
from timeit import default_timer as timer

import numpy as np

from tools.time_profiling import profilable
from xlmimo.config.xlmimo_config import SWEEP_AXES, pilot_lengths
from xlmimo.functions.metrics import ergodic_mnae, min_mean_se, mnae, \
    percentiles
from xlmimo.models import allocation, combining, deterministic
from xlmimo.models.channel import error_covariances, mmse_estimate, \
    sample_channel
from xlmimo.models.system_model import build_geometry, \
    compute_channel_statistics, select_subarrays
from xlmimo.structs.deterministic_sinr import SwitchRule
from xlmimo.structs.metrics_table import MetricRow, MetricsTable
from xlmimo.structs.selection import SelectionMatrixSet
from xlmimo.utils import rng as rng_streams
from xlmimo.utils.exceptions import MetricError, XLMIMOError
from xlmimo.utils.progress_bar import ProgressBar


@profilable
def run_scenario(config, reports=None):
    """Runs the experiment described by a frozen configuration.

    Args:
        config: ScenarioConfig.
        reports: optional list receiving the allocation reports of the
            allocation and exhaustive kinds.

    Returns:
        MetricsTable. Sweep values that cannot be simulated get a single
        'infeasible' row.
    """
    experiment = config.EXPERIMENT
    table = MetricsTable()
    if experiment.KIND == 'allocation':
        samples = collections.OrderedDict()
        _run_allocation(config, samples, reports, table)
        _flush(table, samples)
        return table

    runner = _run_link if experiment.KIND == 'link' else _run_exhaustive
    axis = experiment.SWEEP.AXIS
    for value in experiment.SWEEP.VALUES:
        start_time = timer()
        logging.info(f"{config.NAME}: {experiment.KIND} {axis} = {value}")
        samples = collections.OrderedDict()
        try:
            runner(config.with_value(SWEEP_AXES[axis], value), value,
                   samples, reports)
        except XLMIMOError as err:
            logging.error(f"{axis} = {value} infeasible: {err}")
            table.add_row(MetricRow(value, 'infeasible', 1., math.nan, 0))
            continue
        _flush(table, samples)
        logging.info(f"{axis} = {value} done in "
                     f"{timer() - start_time:.2f}s")
    return table


def _flush(table, samples):
    for (sweep, metric), values in samples.items():
        table.add(sweep, metric, values)


def _record(samples, sweep, metric, values):
    samples.setdefault((sweep, metric), []).extend(np.atleast_1d(values))


def _guarded(func, *args):
    """Metric value, NaN when the series does not define it."""
    try:
        return func(*args)
    except MetricError as err:
        logging.debug(f"{func.__name__}: {err}")
        return math.nan


def _drop_statistics(config, drop):
    geom = build_geometry(config, drop)
    return compute_channel_statistics(geom, config, drop)


def _switch_override(config):
    if config.ALLOCATION.U_SWITCH is None:
        return None
    return SwitchRule(config.ALLOCATION.U_SWITCH, 'config-override')


def _select(config, strategy, stats, pilots, drop):
    context = None
    if strategy == 'sinr':
        context = deterministic.sinr_selection_context(
            stats, pilots, config.ALLOCATION.U_SWITCH)
    return select_subarrays(
        strategy, stats, config.SELECTION.L_K, context,
        rng_streams.stream(config.SEED, 'selection', drop))


def _assign_pilots(config, stats, tau_p, tau_c, drop):
    assignment = config.PILOTS.ASSIGNMENT
    rng = rng_streams.stream(config.SEED, 'pilots', drop)
    if assignment == 'random':
        return allocation.baseline_random(stats, tau_p, rng, tau_c).pilots
    if assignment == 'orthogonal':
        return allocation.orthogonal_random(stats, rng, tau_c).pilots
    sel = _allocation_selection(config, stats, drop)
    return allocation.schedule_nmse(stats, sel, config.ALLOCATION.GAMMA_TH,
                                    tau_c).pilots


def _estimate(config, stats, pilots, drop, trial):
    real = sample_channel(
        stats, rng_streams.stream(config.SEED, 'channel', drop, trial))
    return mmse_estimate(
        real, stats, pilots,
        rng_streams.stream(config.SEED, 'noise', drop, trial))


def _link_trial(config, stats, pilots, selections, drop, trial):
    """SINR reports of one realization for every (mode, selection,
    weighting)."""
    est = _estimate(config, stats, pilots, drop, trial)
    modes = config.OPERATION.MODES
    local = combining.local_processing(est, stats) \
        if 'distributed' in modes else None
    reports = {}
    for name, sel in selections.items():
        if 'centralized' in modes:
            reports[('cent', name)] = combining.evaluate_centralized(
                est, stats, sel)
        if 'distributed' in modes:
            for weighting in config.WEIGHTING.STRATEGIES:
                reports[('dist', name, weighting)] = \
                    combining.evaluate_distributed(est, stats, sel,
                                                   weighting, local)
    return reports


def _run_trials(config, trial_fn, drop):
    """Results of trial_fn over every trial of a drop, in trial order."""
    experiment = config.EXPERIMENT
    bar = ProgressBar(experiment.TRIALS, f"drop {drop} ") \
        if experiment.VERBOSE else None
    results = []
    with ThreadPoolExecutor(max_workers=experiment.THREADS) as executor:
        for result in executor.map(trial_fn, range(experiment.TRIALS)):
            results.append(result)
            if bar is not None:
                bar.print(_first_mean_se(result))
    return results


def _first_mean_se(result):
    if isinstance(result, dict):
        result = next(iter(result.values()))
    values = result.se if hasattr(result, 'se') else result
    values = np.asarray(values, dtype=float)
    return float(np.nanmean(values)) if np.any(~np.isnan(values)) else 0.


def _deterministic_se(stats, pilots, sel, mode, C, weighting=None):
    """Ergodic and asymptotic SEs of the scheduled UEs and their average
    multiplication counts."""
    users = pilots.scheduled
    se, mult = {}, {}
    kinds = {
        'erg': deterministic.ergodic_sinr_centralized
        if mode == 'centralized' else deterministic.ergodic_sinr_distributed,
        'asy': deterministic.asymptotic_sinr_centralized
        if mode == 'centralized' else deterministic.asymptotic_sinr_distributed,
    }
    for kind, func in kinds.items():
        sinr, counts = np.zeros(users.size), np.zeros(users.size)
        for pos, k in enumerate(users):
            result = func(stats, pilots, sel, k, C=C)
            counts[pos] = result.multiplications
            if mode == 'centralized':
                sinr[pos] = result.value
                continue
            local_row = np.zeros(stats.L)
            local_row[result.subarrays] = result.values
            mu = combining.compute_weights(weighting, local_row, stats,
                                           sel, k)
            sinr[pos] = combining.global_sinr_approx(local_row[sel[k]],
                                                     mu[sel[k]])
        se[kind] = combining.se_map(sinr, pilots.tau_p, pilots.tau_c)
        mult[kind] = float(np.mean(counts))
    return se, mult


def _record_link_metrics(samples, sweep, prefix, reports, users, det_se,
                         mult):
    se = np.array([report.se[users] for report in reports])
    _record(samples, sweep, f"{prefix}.mean_se", np.mean(se, axis=1))
    _record(samples, sweep, f"{prefix}.min_se",
            _guarded(min_mean_se, se))
    try:
        p5, p50, p95 = percentiles(se)
    except MetricError:
        p5 = p50 = p95 = math.nan
    _record(samples, sweep, f"{prefix}.se_p5", p5)
    _record(samples, sweep, f"{prefix}.se_p50", p50)
    _record(samples, sweep, f"{prefix}.se_p95", p95)
    if prefix.startswith('dist'):
        _record(samples, sweep, f"{prefix}.mnae_global",
                [_guarded(mnae, report.se[users], report.se_approx[users])
                 for report in reports])
    _record(samples, sweep, f"{prefix}.mnae_asy",
            [_guarded(mnae, trial_se, det_se['asy']) for trial_se in se])
    _record(samples, sweep, f"{prefix}.mnae_erg",
            _guarded(ergodic_mnae, se, det_se['erg']))
    _record(samples, sweep, f"{prefix}.mult_erg", mult['erg'])
    _record(samples, sweep, f"{prefix}.mult_asy", mult['asy'])


def _run_link(config, sweep, samples, reports):  # pylint: disable=W0613
    experiment = config.EXPERIMENT
    for drop in range(experiment.DROPS):
        stats = _drop_statistics(config, drop)
        tau_p, tau_c = pilot_lengths(config, stats.K)
        pilots = _assign_pilots(config, stats, tau_p, tau_c, drop)
        pilots.require_scheduled()
        users = pilots.scheduled
        selections = {strategy: _select(config, strategy, stats, pilots, drop)
                      for strategy in config.SELECTION.STRATEGIES}
        C, _ = error_covariances(stats, pilots)  # pylint: disable=C0103

        trial_fn = functools.partial(_link_trial, config, stats, pilots,
                                     selections, drop)
        results = _run_trials(config, trial_fn, drop)

        for name, sel in selections.items():
            if 'centralized' in config.OPERATION.MODES:
                det_se, mult = _deterministic_se(stats, pilots, sel,
                                                 'centralized', C)
                _record_link_metrics(
                    samples, sweep, f"cent.{name}",
                    [result[('cent', name)] for result in results], users,
                    det_se, mult)
            if 'distributed' in config.OPERATION.MODES:
                for weighting in config.WEIGHTING.STRATEGIES:
                    det_se, mult = _deterministic_se(
                        stats, pilots, sel, 'distributed', C, weighting)
                    _record_link_metrics(
                        samples, sweep, f"dist.{name}.{weighting}",
                        [result[('dist', name, weighting)]
                         for result in results], users, det_se, mult)


def _allocate(config, algorithm, mode, stats, sel, tau_p, tau_c, drop):
    """Full admission order of one algorithm, thresholds made vacuous."""
    alloc = config.ALLOCATION
    threads = config.EXPERIMENT.THREADS
    schedule = allocation.schedule_sinr_centralized \
        if mode == 'centralized' else allocation.schedule_sinr_distributed
    if algorithm == 'nmse':
        return allocation.schedule_nmse(stats, sel, math.inf, tau_c,
                                        alloc.INCREMENTAL, threads)
    if algorithm == 'max_min_ana':
        return schedule(stats, sel, 0., tau_c, _switch_override(config),
                        incremental=alloc.INCREMENTAL, threads=threads)
    if algorithm == 'max_min_num':
        evaluator = allocation.MonteCarloEvaluator(
            stats, sel, mode, config.SEED, alloc.NUMERICAL_TRIALS, drop)
        return schedule(stats, sel, 0., tau_c, evaluator=evaluator,
                        threads=threads, algorithm='max_min_num')
    if algorithm == 'random':
        return allocation.baseline_random(
            stats, tau_p, rng_streams.stream(config.SEED, 'pilots', drop),
            tau_c)
    return allocation.baseline_greedy_book(
        stats, sel, tau_p, rng_streams.stream(config.SEED, 'book', drop),
        tau_c)


def _admitted(config, state):
    """Admissions of the algorithm at the configured threshold, read from
    the trace of its vacuous-threshold run."""
    if state.algorithm == 'nmse':
        return state.admitted_count(config.ALLOCATION.GAMMA_TH, above=False)
    if state.algorithm.startswith('max_min'):
        return state.admitted_count(config.ALLOCATION.ETA_TH)
    return state.U


def _allocation_selection(config, stats, drop):
    """Serving sets used while allocating. SINR-based selection ranks the
    subarrays with every UE on its own pilot."""
    strategy = config.SELECTION.STRATEGIES[0]
    pilots = None
    if strategy == 'sinr':
        pilots = allocation.orthogonal_random(
            stats, rng_streams.stream(config.SEED, 'selection', drop),
            stats.K + 1).pilots
    return _select(config, strategy, stats, pilots, drop)


def _evaluation_selection(state, sel):
    if state.serving is None:
        return sel
    return SelectionMatrixSet(state.serving, sel.L)


def monte_carlo_se(config, stats, sel, state, mode, drop):
    """(trials, U) SEs of the scheduled UEs of an allocation, in admission
    order, on the common trial streams of the drop."""
    users = np.array(state.scheduled, dtype=int)
    weighting = config.WEIGHTING.STRATEGIES[0]

    def trial_se(trial):
        est = _estimate(config, stats, state.pilots, drop, trial)
        if mode == 'centralized':
            report = combining.evaluate_centralized(est, stats, sel)
        else:
            report = combining.evaluate_distributed(
                est, stats, sel, weighting, weights=state.weights)
        return report.se[users]

    return np.array(_run_trials(config, trial_se, drop))


def _run_allocation(config, samples, reports, table):
    experiment = config.EXPERIMENT
    alloc = config.ALLOCATION
    K = config.GEOMETRY.K  # pylint: disable=C0103
    values = list(experiment.SWEEP.VALUES)
    for value in values:
        if not 1 <= value <= K:
            logging.error(f"U = {value} infeasible: outside [1, {K}]")
            table.add_row(MetricRow(value, 'infeasible', 1., math.nan, 0))
    values = [value for value in values if 1 <= value <= K]

    for drop in range(experiment.DROPS):
        start_time = timer()
        stats = _drop_statistics(config, drop)
        tau_p, tau_c = pilot_lengths(config, K)
        sel = _allocation_selection(config, stats, drop)
        for mode in config.OPERATION.MODES:
            for algorithm in alloc.ALGORITHMS:
                state = _allocate(config, algorithm, mode, stats, sel,
                                  tau_p, tau_c, drop)
                if reports is not None:
                    reports.append({'drop': drop, 'mode': mode,
                                    **state.to_dict()})
                eval_sel = _evaluation_selection(state, sel)
                name = f"alloc.{mode}.{algorithm}"
                counting, scheduled = True, 0
                for U in range(1, state.U + 1):  # pylint: disable=C0103
                    if not counting and U not in values:
                        continue
                    se = monte_carlo_se(config, stats, eval_sel,
                                        state.prefix(U), mode, drop)
                    min_se = min_mean_se(se)
                    if counting and min_se >= alloc.ETA_TH:
                        scheduled = U
                    else:
                        counting = False
                    if U in values:
                        _record(samples, U, f"{name}.min_se", min_se)
                        _record(samples, U, f"{name}.mean_se",
                                np.mean(se, axis=1))
                for U in values:  # pylint: disable=C0103
                    samples.setdefault((U, f"{name}.min_se"), [])
                    samples.setdefault((U, f"{name}.mean_se"), [])
                _record(samples, K, f"{name}.scheduled", scheduled)
                _record(samples, K, f"{name}.admitted",
                        _admitted(config, state))
                logging.debug(f"drop {drop} {name}: {scheduled} UEs at "
                              f"{alloc.ETA_TH} bit/s/Hz")
            logging.info(f"drop {drop} {mode} allocations done in "
                         f"{timer() - start_time:.2f}s")


def _run_exhaustive(config, sweep, samples, reports):
    experiment = config.EXPERIMENT
    alloc = config.ALLOCATION
    for drop in range(experiment.DROPS):
        stats = _drop_statistics(config, drop)
        tau_p, tau_c = pilot_lengths(config, stats.K)
        sel = _allocation_selection(config, stats, drop)
        for mode in config.OPERATION.MODES:
            if alloc.EXHAUSTIVE_METRIC == 'numerical':
                evaluator = allocation.MonteCarloEvaluator(
                    stats, sel, mode, config.SEED, alloc.NUMERICAL_TRIALS,
                    drop)
            else:
                evaluator = allocation.DeterministicEvaluator(
                    stats, sel, mode, _switch_override(config))
            states = {
                'exhaustive': allocation.exhaustive_search(
                    stats, sel, stats.K, tau_c, mode, evaluator,
                    alloc.EXHAUSTIVE_MAX_UES, experiment.THREADS),
                'max_min_num': _allocate(config, 'max_min_num', mode, stats,
                                         sel, tau_p, tau_c, drop),
                'max_min_ana': _allocate(config, 'max_min_ana', mode, stats,
                                         sel, tau_p, tau_c, drop),
            }
            for name, state in states.items():
                if reports is not None:
                    reports.append({'drop': drop, 'mode': mode,
                                    **state.to_dict()})
                se = monte_carlo_se(config, stats, sel, state, mode, drop)
                _record(samples, sweep, f"exh.{mode}.{name}.min_se",
                        min_mean_se(se))
