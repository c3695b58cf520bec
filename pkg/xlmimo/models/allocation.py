"""
Joint user scheduling and pilot assignment.

The greedy algorithms visit UEs by descending average gain and try every
existing pilot plus one new pilot for each candidate. The pilot length never
exceeds tau_c - 1 so that every coherence block keeps a data symbol. Ties
between pilots go to the lowest index.

Licensed under The MIT License
Written by Jean Da Rolt
"""
import logging
import threading
from concurrent.futures import ThreadPoolExecutor

import numpy as np

from tools.time_profiling import profilable
from xlmimo.models import combining
from xlmimo.models.channel import error_covariances, mmse_estimate, \
    sample_channel
from xlmimo.models.deterministic import deterministic_sinr, u_switch
from xlmimo.structs.allocation_state import AllocationState, AllocationStep
from xlmimo.structs.channel_estimate import ChannelEstimate
from xlmimo.structs.pilot_config import UNSCHEDULED, PilotConfig
from xlmimo.utils import rng as rng_streams
from xlmimo.utils.exceptions import AllocationError, PilotError
from xlmimo.utils.linalg import factored_solve, hermitian_factor, \
    hermitian_part


EXHAUSTIVE_MAX_UES = 8


def scheduling_order(stats):
    """UEs by descending average gain, ties toward the lower index."""
    return np.argsort(-stats.beta_bar, kind='stable')


class ErrorCovarianceCache():
    """Error covariances keyed by (UE, UEs sharing its pilot, pilot length).

    A candidate pilot only changes the group it joins, so every other UE
    hits the cache. Values are computed with the same operations as
    channel.error_covariances.
    """
    def __init__(self, stats):
        self.stats = stats
        self._cache = {}
        self._lock = threading.Lock()
        self.misses = 0

    def _compute(self, k, sharers, tau_p):
        stats = self.stats
        C_k = np.zeros((stats.L, stats.M, stats.M), dtype=complex)  # pylint: disable=C0103
        for l in range(stats.L):
            Psi = stats.noise_power * np.eye(stats.M, dtype=complex)  # pylint: disable=C0103
            for i in sharers:
                Psi += stats.p[i] * tau_p * stats.R[i, l]
            X = factored_solve(hermitian_factor(Psi), stats.R[k, l])  # pylint: disable=C0103
            C_k[l] = hermitian_part(
                stats.R[k, l] - stats.p[k] * tau_p * stats.R[k, l] @ X)
        return C_k

    def get(self, k, sharers, tau_p):
        key = (int(k), tuple(int(i) for i in sharers), int(tau_p))
        with self._lock:
            if key in self._cache:
                return self._cache[key]
        value = self._compute(k, sharers, tau_p)
        with self._lock:
            self.misses += 1
            self._cache.setdefault(key, value)
            return self._cache[key]

    def covariances(self, pilots):
        C = np.zeros_like(self.stats.R)  # pylint: disable=C0103
        for k in pilots.scheduled:
            C[k] = self.get(k, pilots.sharing(pilots.t[k]), pilots.tau_p)
        return C


def _covariances(stats, pilots, cache):
    if cache is not None:
        return cache.covariances(pilots)
    return error_covariances(stats, pilots)[0]


class DeterministicEvaluator():
    """SINRs from the deterministic approximations, switching by the user
    load.

    The threshold of a UE does not depend on the candidate pilot, so every
    candidate of a greedy step, and every assignment of an exhaustive
    search, is scored with the same approximation.

    Attributes:
        mode: 'centralized' or 'distributed'.
        rule: fixed SwitchRule, or None for the orthogonal pilot row of the
            switching table.
    """
    def __init__(self, stats, sel, mode, rule=None, incremental=False):
        self.stats = stats
        self.sel = sel
        self.mode = mode
        self.rule = rule
        self.cache = ErrorCovarianceCache(stats) if incremental else None

    def switch_rule(self, k):
        """SwitchRule applied to UE k whatever pilot it is trying."""
        if self.rule is not None:
            return self.rule
        return u_switch(self.stats.correlated, False, self.mode,
                        self.stats.M, self.sel[k].size)

    def evaluate(self, pilots):
        """Returns:
            (sinr, weights): (K,) SINRs, NaN for unscheduled UEs, and the
            optimal WeightVector in distributed mode (None otherwise).
        """
        stats = self.stats
        C = _covariances(stats, pilots, self.cache)  # pylint: disable=C0103
        sinr = np.full(stats.K, np.nan)
        local = np.zeros((stats.K, stats.L))
        for k in pilots.scheduled:
            result = deterministic_sinr(stats, pilots, self.sel, k,
                                        self.mode, self.switch_rule(k), C)
            sinr[k] = result.value
            local[k, result.subarrays] = result.values
        if self.mode == 'centralized':
            return sinr, None
        weights = combining.assemble_weights('optimal', local, stats,
                                             self.sel, pilots.scheduled)
        return sinr, weights


class MonteCarloEvaluator():
    """Mean instantaneous SINRs over seeded trials.

    Every candidate is evaluated on the same channel realizations.

    Attributes:
        weights: fixed WeightVector of distributed operation, per-trial
            optimal weights when None.
    """
    def __init__(self, stats, sel, mode, seed, trials, drop=0, weights=None):
        self.stats = stats
        self.sel = sel
        self.mode = mode
        self.seed = seed
        self.trials = trials
        self.drop = drop
        self.weights = weights
        self.channels = sample_channel(
            stats, rng_streams.stream(seed, 'allocation', drop, trial=0),
            trials)

    def evaluate(self, pilots):
        stats = self.stats
        noise_rng = rng_streams.stream(self.seed, 'allocation', self.drop,
                                       trial=1)
        est = mmse_estimate(self.channels, stats, pilots, noise_rng)
        total = np.zeros(stats.K)
        local_total = np.zeros((stats.K, stats.L))
        for trial in range(self.trials):
            trial_est = ChannelEstimate(est.hhat[trial], est.C, est.Psi,
                                        pilots)
            if self.mode == 'centralized':
                report = combining.evaluate_centralized(trial_est, stats,
                                                        self.sel)
            else:
                report = combining.evaluate_distributed(
                    trial_est, stats, self.sel, 'optimal',
                    weights=self.weights)
                local_total += np.nan_to_num(report.local)
            total += np.nan_to_num(report.inst)
        sinr = np.full(stats.K, np.nan)
        users = pilots.scheduled
        sinr[users] = total[users] / self.trials
        if self.mode == 'centralized':
            return sinr, None
        weights = self.weights
        if weights is None:
            weights = combining.assemble_weights(
                'optimal', local_total / self.trials, stats, self.sel, users)
        return sinr, weights


def _candidates(t, k, tau_p, tau_c):
    """Pilot configurations of candidate k on each existing pilot and, when
    the cap allows it, on a new one."""
    cap = tau_c - 1
    if cap < 1:
        raise PilotError(f"Coherence block of {tau_c} symbols leaves no "
                         f"room for pilots and data.")
    n_pilots = tau_p + 1 if tau_p < cap else tau_p
    configs = []
    for pilot in range(n_pilots):
        trial_t = t.copy()
        trial_t[k] = pilot
        configs.append((pilot, PilotConfig(max(tau_p, pilot + 1), tau_c,
                                           trial_t)))
    return configs


def _greedy(algorithm, stats, tau_c, score, admits, threads=1):
    """Greedy scheduling skeleton.

    Args:
        score: PilotConfig -> (merit, metric, weights); the candidate pilot
            with the highest merit wins.
        admits: metric -> bool.
    """
    t = np.full(stats.K, UNSCHEDULED)
    tau_p = 0
    scheduled, trace = [], []
    weights = None
    with ThreadPoolExecutor(max_workers=threads) as executor:
        for k in scheduling_order(stats):
            configs = _candidates(t, k, tau_p, tau_c)
            results = list(executor.map(score, [c for _, c in configs]))
            best = 0
            for pos in range(1, len(results)):
                if results[pos][0] > results[best][0]:
                    best = pos
            pilot, config = configs[best]
            _, metric, candidate_weights = results[best]
            admitted = admits(metric)
            trace.append(AllocationStep(k, pilot, metric, admitted))
            logging.debug(f"{algorithm}: UE {k} pilot {pilot} metric "
                          f"{metric:.4f} "
                          f"{'admitted' if admitted else 'rejected'}")
            if not admitted:
                break
            scheduled.append(int(k))
            t = config.t.copy()
            tau_p = config.tau_p
            weights = candidate_weights
    pilots = PilotConfig(max(tau_p, 1), tau_c, t)
    logging.info(f"{algorithm}: scheduled {len(scheduled)} of {stats.K} UEs "
                 f"with {pilots.tau_p} pilots")
    return AllocationState(algorithm, scheduled, pilots, weights, trace)


def nmse_ratios(stats, sel, pilots, C):  # pylint: disable=C0103
    """Serving-set NMSE of every scheduled UE,
    sum_{l in D_i} tr(C_il) / sum_{l in D_i} tr(Q_il)."""
    trace_C = np.real(np.trace(C, axis1=-2, axis2=-1))
    trace_Q = np.real(np.trace(stats.Q, axis1=-2, axis2=-1))
    return np.array([np.sum(trace_C[i, sel[i]]) / np.sum(trace_Q[i, sel[i]])
                     for i in pilots.scheduled])


@profilable
def schedule_nmse(stats, sel, gamma_th, tau_c, incremental=False, threads=1):
    """Admits UEs while the largest serving-set NMSE stays below gamma_th.

    Returns:
        AllocationState whose trace holds the maximum NMSE of each step.
    """
    if not gamma_th > 0:
        raise AllocationError(f"NMSE threshold must be positive, got "
                              f"{gamma_th}")
    cache = ErrorCovarianceCache(stats) if incremental else None

    def score(pilots):
        gamma_max = float(np.max(nmse_ratios(
            stats, sel, pilots, _covariances(stats, pilots, cache))))
        return -gamma_max, gamma_max, None

    return _greedy('nmse', stats, tau_c, score,
                   lambda gamma_max: gamma_max <= gamma_th, threads)


def _max_min_score(evaluator, tau_c):
    def score(pilots):
        sinr, weights = evaluator.evaluate(pilots)
        se = combining.se_map(sinr[pilots.scheduled], pilots.tau_p, tau_c)
        eta_min = float(np.min(se))
        return eta_min, eta_min, weights
    return score


@profilable
def schedule_sinr_centralized(stats, sel, eta_th, tau_c, rule=None,
                              evaluator=None, incremental=False, threads=1,
                              algorithm='max_min_ana'):
    """Max-min SE scheduling for centralized operation.

    Args:
        eta_th: minimum per-user SE to admit a UE, bit/s/Hz.
        rule: fixed SwitchRule, the orthogonal pilot table row when None.
        evaluator: SINR evaluator, a DeterministicEvaluator when None.
    """
    if eta_th < 0:
        raise AllocationError(f"SE threshold must be nonnegative, got "
                              f"{eta_th}")
    if evaluator is None:
        evaluator = DeterministicEvaluator(stats, sel, 'centralized', rule,
                                           incremental)
    return _greedy(algorithm, stats, tau_c, _max_min_score(evaluator, tau_c),
                   lambda eta_min: eta_min >= eta_th, threads)


@profilable
def schedule_sinr_distributed(stats, sel, eta_th, tau_c, rule=None,
                              evaluator=None, incremental=False, threads=1,
                              algorithm='max_min_ana'):
    """Max-min SE scheduling for distributed operation. The optimal weights
    of the winning pilot are committed with each admission."""
    if eta_th < 0:
        raise AllocationError(f"SE threshold must be nonnegative, got "
                              f"{eta_th}")
    if evaluator is None:
        evaluator = DeterministicEvaluator(stats, sel, 'distributed', rule,
                                           incremental)
    return _greedy(algorithm, stats, tau_c, _max_min_score(evaluator, tau_c),
                   lambda eta_min: eta_min >= eta_th, threads)


def baseline_random(stats, tau_p, rng, tau_c, U=None):  # pylint: disable=C0103
    """Schedules the U strongest UEs (all by default) on uniformly drawn
    pilots."""
    if tau_p < 1:
        raise PilotError(f"Pilot length must be at least 1, got {tau_p}.")
    U = stats.K if U is None else U  # pylint: disable=C0103
    scheduled = scheduling_order(stats)[:U]
    t = np.full(stats.K, UNSCHEDULED)
    t[scheduled] = rng.integers(0, tau_p, size=len(scheduled))
    return AllocationState('random', scheduled, PilotConfig(tau_p, tau_c, t))


def orthogonal_random(stats, rng, tau_c, U=None):  # pylint: disable=C0103
    """Schedules the U strongest UEs on a random permutation of U orthogonal
    pilots."""
    U = stats.K if U is None else U  # pylint: disable=C0103
    scheduled = scheduling_order(stats)[:U]
    t = np.full(stats.K, UNSCHEDULED)
    t[scheduled] = rng.permutation(U)
    return AllocationState('orthogonal', scheduled, PilotConfig(U, tau_c, t))


def contamination(stats, t, pilot, l):
    """Sum of the NLoS gains at subarray l of the UEs on a pilot."""
    return float(np.sum(stats.beta_nlos[t == pilot, l]))


def baseline_greedy_book(stats, sel, tau_p, rng, tau_c):
    """Three-stage greedy assignment restricted to the candidate subarrays
    of each UE.

    (i) tau_p random UEs get orthogonal pilots, (ii) each remaining UE, by
    descending gain, takes the pilot with the least NLoS gain at its
    strongest candidate subarray, (iii) each subarray serves the strongest
    UE of every pilot among the UEs holding it in their selection. UEs
    served by no subarray are left unscheduled and reported as unserved.
    """
    if tau_p > stats.K:
        raise PilotError(f"Pilot length {tau_p} exceeds the {stats.K} UEs.")
    if tau_p < 1:
        raise PilotError(f"Pilot length must be at least 1, got {tau_p}.")
    candidates = np.zeros((stats.K, stats.L), dtype=bool)
    for k in range(stats.K):
        candidates[k, sel[k]] = True
    gains = np.where(candidates, stats.beta, -np.inf)
    t = np.full(stats.K, UNSCHEDULED)
    t[rng.choice(stats.K, size=tau_p, replace=False)] = np.arange(tau_p)
    for k in scheduling_order(stats):
        if t[k] != UNSCHEDULED:
            continue
        strongest = int(np.argmax(gains[k]))
        costs = [contamination(stats, t, pilot, strongest)
                 for pilot in range(tau_p)]
        t[k] = int(np.argmin(costs))

    serving = [[] for _ in range(stats.K)]
    for l in range(stats.L):
        for pilot in range(tau_p):
            group = np.flatnonzero((t == pilot) & candidates[:, l])
            if group.size:
                winner = group[np.argmax(stats.beta[group, l])]
                serving[winner].append(l)
    unserved = [k for k in range(stats.K) if not serving[k]]
    for k in unserved:
        t[k] = UNSCHEDULED
        serving[k] = [int(np.argmax(gains[k]))]
    scheduled = [k for k in scheduling_order(stats) if k not in unserved]
    if unserved:
        logging.info(f"book: {len(unserved)} UEs served by no subarray")
    return AllocationState('book', scheduled, PilotConfig(tau_p, tau_c, t),
                           serving=[np.array(s) for s in serving],
                           unserved=unserved)


def restricted_growth_strings(K, max_blocks):  # pylint: disable=C0103
    """Pilot assignments up to relabeling: pilot indices appear in first
    occurrence order and at most max_blocks pilots are used."""
    def extend(prefix, used):
        if len(prefix) == K:
            yield tuple(prefix)
            return
        for pilot in range(min(used + 1, max_blocks)):
            yield from extend(prefix + [pilot], max(used, pilot + 1))
    yield from extend([], 0)


@profilable
def exhaustive_search(stats, sel, tau_p_max, tau_c, mode, evaluator=None,
                      max_ues=EXHAUSTIVE_MAX_UES, threads=1):
    """Assignment of all K UEs maximizing the minimum SE.

    Args:
        tau_p_max: largest pilot length considered.
        mode: 'centralized' or 'distributed'.
        evaluator: SINR evaluator, a DeterministicEvaluator when None.
        max_ues: largest K accepted.

    Returns:
        AllocationState; ties go to the earlier enumerated assignment.
    """
    if stats.K > max_ues:
        raise AllocationError(f"Exhaustive search over {stats.K} UEs, at "
                              f"most {max_ues} allowed.")
    if evaluator is None:
        evaluator = DeterministicEvaluator(stats, sel, mode)
    score = _max_min_score(evaluator, tau_c)
    best = {'index': None, 'value': -np.inf, 'pilots': None, 'weights': None}
    lock = threading.Lock()

    def visit(item):
        index, assignment = item
        pilots = PilotConfig(max(assignment) + 1, tau_c, assignment)
        value, _, weights = score(pilots)
        with lock:
            if value > best['value'] or (value == best['value'] and
                                         index < best['index']):
                best.update(index=index, value=value, pilots=pilots,
                            weights=weights)

    max_blocks = min(tau_p_max, tau_c - 1)
    if max_blocks < 1:
        raise PilotError(f"Coherence block of {tau_c} symbols leaves no "
                         f"room for pilots and data.")
    assignments = list(restricted_growth_strings(stats.K, max_blocks))
    with ThreadPoolExecutor(max_workers=threads) as executor:
        list(executor.map(visit, enumerate(assignments)))
    logging.info(f"exhaustive: best of {len(assignments)} assignments "
                 f"reaches {best['value']:.4f} bit/s/Hz with "
                 f"{best['pilots'].tau_p} pilots")
    return AllocationState('exhaustive', scheduling_order(stats),
                           best['pilots'], best['weights'])

