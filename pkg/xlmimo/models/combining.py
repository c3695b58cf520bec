"""
MMSE combining, instantaneous SINRs and spectral efficiencies for
centralized and distributed operation.

Centralized algebra runs on the M L_k coordinates of the serving subarrays
of each UE. Unscheduled UEs neither transmit nor are decoded.

Licensed under The MIT License
Written by Jean Da Rolt
"""
import logging

import numpy as np

from xlmimo.structs.sinr_report import LocalProcessing, SinrReport, \
    WeightVector
from xlmimo.utils.exceptions import PilotError, SelectionError
from xlmimo.utils.linalg import block_diag, factored_solve, \
    hermitian_factor, hermitian_solve


def _check_scheduled(est, k):
    if est.pilots.t[k] < 0:
        raise PilotError(f"UE {k} is not scheduled.")


def _error_sum(est, stats):
    """(L, M, M) sum over scheduled UEs of p_i C_il."""
    users = est.pilots.scheduled
    return np.einsum('i,ilmn->lmn', stats.p[users], est.C[users])


def _centralized_system(est, sel, stats, k):
    """W on the serving coordinates of UE k and the reduced estimates of
    every scheduled UE.

    Returns:
        (W, H) with H of shape (U, M L_k) ordered as est.pilots.scheduled.
    """
    users = est.pilots.scheduled
    subarrays = sel[k]
    H = est.hhat[users][:, subarrays].reshape(users.size, -1)  # pylint: disable=C0103
    errors = _error_sum(est, stats)[subarrays]
    W = (H.T * stats.p[users]) @ H.conj() + block_diag(errors) + \
        stats.noise_power * np.eye(H.shape[1])  # pylint: disable=C0103
    return W, H


def _pad(stats, subarrays, reduced):
    full = np.zeros((stats.L, stats.M), dtype=complex)
    full[subarrays] = reduced.reshape(len(subarrays), stats.M)
    return full.reshape(-1)


def centralized_combiner(est, sel, stats, k):
    """v_k = p_k W^-1 D_k hhat_k, zero outside the serving blocks.

    Args:
        est: ChannelEstimate of a single realization.
        sel: SelectionMatrixSet.
        stats: ChannelStatistics.
        k: scheduled UE.

    Returns:
        (M L,) complex combining vector.
    """
    _check_scheduled(est, k)
    W, _ = _centralized_system(est, sel, stats, k)  # pylint: disable=C0103
    hk = est.hhat[k, sel[k]].reshape(-1)
    return _pad(stats, sel[k], stats.p[k] * hermitian_solve(W, hk))


def centralized_sinr(est, sel, stats, k):
    """p_k hhat_k^H Z_k^-1 hhat_k with Z_k = W - p_k hhat_k hhat_k^H."""
    _check_scheduled(est, k)
    W, _ = _centralized_system(est, sel, stats, k)  # pylint: disable=C0103
    hk = est.hhat[k, sel[k]].reshape(-1)
    Z = W - stats.p[k] * np.outer(hk, hk.conj())  # pylint: disable=C0103
    return max(float(np.real(stats.p[k] * hk.conj() @
                             hermitian_solve(Z, hk))), 0.)


def instantaneous_sinr_centralized(v, est, sel, stats, k):
    """SINR achieved by an arbitrary centralized combining vector.

    Args:
        v: (M L,) combiner, only its serving blocks are used.
    """
    _check_scheduled(est, k)
    subarrays = sel[k]
    users = est.pilots.scheduled
    v = np.asarray(v).reshape(stats.L, stats.M)[subarrays].reshape(-1)
    H = est.hhat[users][:, subarrays].reshape(users.size, -1)  # pylint: disable=C0103
    gains = stats.p[users] * np.abs(H.conj() @ v) ** 2
    own = users == k
    errors = block_diag(_error_sum(est, stats)[subarrays])
    impairment = np.real(v.conj() @ errors @ v) + \
        stats.noise_power * np.real(v.conj() @ v)
    return float(gains[own].sum() / (gains[~own].sum() + impairment))


def _local_matrix(est, stats, l):
    users = est.pilots.scheduled
    H = est.hhat[users, l]  # pylint: disable=C0103
    return (H.T * stats.p[users]) @ H.conj() + \
        np.einsum('i,imn->mn', stats.p[users], est.C[users, l]) + \
        stats.noise_power * np.eye(stats.M)


def local_combiner(est, stats, k, l):
    """L-MMSE combiner v_kl = p_k W_l^-1 hhat_kl."""
    _check_scheduled(est, k)
    return stats.p[k] * hermitian_solve(_local_matrix(est, stats, l),
                                        est.hhat[k, l])


def local_sinr(est, stats, k, l):
    """p_k hhat_kl^H Z_kl^-1 hhat_kl with Z_kl = W_l - p_k hhat_kl hhat_kl^H."""
    _check_scheduled(est, k)
    hkl = est.hhat[k, l]
    Z = _local_matrix(est, stats, l) - \
        stats.p[k] * np.outer(hkl, hkl.conj())  # pylint: disable=C0103
    return max(float(np.real(stats.p[k] * hkl.conj() @
                             hermitian_solve(Z, hkl))), 0.)


def instantaneous_sinr_local(v, est, stats, k, l):
    """Local SINR achieved by an arbitrary combiner at subarray l."""
    _check_scheduled(est, k)
    users = est.pilots.scheduled
    gains = stats.p[users] * np.abs(est.hhat[users, l].conj() @ v) ** 2
    own = users == k
    errors = np.einsum('i,imn->mn', stats.p[users], est.C[users, l])
    impairment = np.real(v.conj() @ errors @ v) + \
        stats.noise_power * np.real(v.conj() @ v)
    return float(gains[own].sum() / (gains[~own].sum() + impairment))


def local_processing(est, stats):
    """L-MMSE combiners and local SINRs of every scheduled UE at every
    subarray, with one factorization of W_l per subarray.

    The local SINR follows from a = p hhat^H W_l^-1 hhat by the
    Sherman-Morrison identity, SINR = a / (1 - a).
    """
    users = est.pilots.scheduled
    sinr = np.zeros((stats.K, stats.L))
    combiners = np.zeros((stats.K, stats.L, stats.M), dtype=complex)
    for l in range(stats.L):
        factor = hermitian_factor(_local_matrix(est, stats, l))
        H = est.hhat[users, l]  # pylint: disable=C0103
        solved = factored_solve(factor, H.T).T * stats.p[users, None]
        a = np.real(np.sum(H.conj() * solved, axis=1))
        a = np.clip(a, 0., None)
        sinr[users, l] = np.where(a < 1, a / np.maximum(1 - a, 1e-300),
                                  np.inf)
        combiners[users, l] = solved
    return LocalProcessing(sinr, combiners)


def compute_weights(strategy, local_sinr_k, stats, sel, k):
    """Aggregation weights of UE k over its serving subarrays.

    Args:
        strategy: 'optimal', 'lsf' or 'equal'.
        local_sinr_k: (L,) local SINRs of UE k.
        stats: ChannelStatistics.
        sel: SelectionMatrixSet.
        k: UE index.

    Returns:
        (L,) weights, zero outside D_k and summing to one.
    """
    subarrays = sel[k]
    mu = np.zeros(stats.L)
    if strategy == 'optimal':
        values = np.asarray(local_sinr_k, dtype=float)[subarrays]
    elif strategy == 'lsf':
        values = stats.beta[k, subarrays]
    elif strategy == 'equal':
        values = np.ones(subarrays.size)
    else:
        raise SelectionError(f"Unknown weighting strategy {strategy}.")
    total = np.sum(values)
    if not total > 0 or not np.isfinite(total):
        if strategy != 'equal':
            logging.warning(f"UE {k}: {strategy} weights undefined, "
                            f"using equal weights")
        values = np.ones(subarrays.size)
        total = float(subarrays.size)
    mu[subarrays] = values / total
    return mu


def assemble_weights(strategy, local_sinr, stats, sel, users):
    """WeightVector of every scheduled UE.

    Args:
        local_sinr: (K, L) local SINRs, only read by 'optimal'.
        users: scheduled UEs.
    """
    mu = np.zeros((stats.K, stats.L))
    for k in users:
        mu[k] = compute_weights(strategy, local_sinr[k], stats, sel, k)
    return WeightVector(mu, strategy)


def global_sinr_exact(est, stats, sel, weights, combiners, k):
    """Global SINR of UE k after weighted aggregation of the local
    estimates.

    Args:
        weights: WeightVector.
        combiners: (K, L, M) local combiners.
    """
    _check_scheduled(est, k)
    subarrays = sel[k]
    users = est.pilots.scheduled
    mu = weights.mu[k, subarrays]
    v = combiners[k, subarrays]
    # s_i = sum_l mu_kl v_kl^H hhat_il
    s = np.einsum('l,lm,ilm->i', mu, v.conj(), est.hhat[users][:, subarrays])
    gains = stats.p[users] * np.abs(s) ** 2
    own = users == k
    errors = _error_sum(est, stats)[subarrays]
    error_terms = np.real(np.einsum('lm,lmn,ln->l', v.conj(), errors, v))
    noise_terms = stats.noise_power * np.sum(np.abs(v) ** 2, axis=1)
    impairment = np.sum(mu ** 2 * (error_terms + noise_terms))
    return float(gains[own].sum() / (gains[~own].sum() + impairment))


def global_sinr_approx(local_sinr_k, mu_k):
    """(sum_l mu_l^2 / SINR_l)^-1 over the subarrays with a positive
    weight. Zero when a weighted subarray has zero SINR."""
    local_sinr_k = np.asarray(local_sinr_k, dtype=float)
    mu_k = np.asarray(mu_k, dtype=float)
    active = mu_k > 0
    if not np.any(active) or np.any(local_sinr_k[active] <= 0):
        return 0.
    return float(1 / np.sum(mu_k[active] ** 2 / local_sinr_k[active]))


def prelog(tau_p, tau_c):
    if tau_p > tau_c:
        raise PilotError(f"Pilot length {tau_p} exceeds coherence block "
                         f"length {tau_c}.")
    return 1 - tau_p / tau_c


def se_map(sinr, tau_p, tau_c):
    """(1 - tau_p / tau_c) log2(1 + SINR), elementwise."""
    return prelog(tau_p, tau_c) * np.log2(1 + np.asarray(sinr, dtype=float))


def se_map_componentwise(local_sinr_k, mu_k, tau_p, tau_c):
    """SE of the approximate global SINR evaluated from its components,
    prelog (log2(1 + S) - log2(S)) with S = sum_l mu_l^2 / SINR_l."""
    factor = prelog(tau_p, tau_c)
    local_sinr_k = np.asarray(local_sinr_k, dtype=float)
    mu_k = np.asarray(mu_k, dtype=float)
    active = mu_k > 0
    if not np.any(active) or np.any(local_sinr_k[active] <= 0):
        return 0.
    s = np.sum(mu_k[active] ** 2 / local_sinr_k[active])
    return float(factor * (np.log2(1 + s) - np.log2(s)))


def evaluate_centralized(est, stats, sel):
    """Centralized MMSE SINRs and SEs of one realization.

    Returns:
        SinrReport, NaN for unscheduled UEs.
    """
    pilots = est.pilots
    inst = np.full(stats.K, np.nan)
    for k in pilots.scheduled:
        W, _ = _centralized_system(est, sel, stats, k)  # pylint: disable=C0103
        hk = est.hhat[k, sel[k]].reshape(-1)
        a = stats.p[k] * np.real(hk.conj() @ hermitian_solve(W, hk))
        a = min(max(a, 0.), 1.)
        inst[k] = a / (1 - a) if a < 1 else np.inf
    return SinrReport(inst, se_map(inst, pilots.tau_p, pilots.tau_c),
                      'centralized')


def evaluate_distributed(est, stats, sel, strategy='optimal', local=None,
                         weights=None):
    """Distributed SINRs and SEs of one realization.

    Args:
        strategy: weighting strategy, ignored when weights are given.
        local: LocalProcessing shared between selections and weightings,
            computed when None.
        weights: fixed WeightVector.

    Returns:
        SinrReport with exact and approximate global SINRs.
    """
    pilots = est.pilots
    users = pilots.scheduled
    if local is None:
        local = local_processing(est, stats)
    if weights is None:
        weights = assemble_weights(strategy, local.sinr, stats, sel, users)
    inst = np.full(stats.K, np.nan)
    approx = np.full(stats.K, np.nan)
    se_approx = np.full(stats.K, np.nan)
    for k in users:
        inst[k] = global_sinr_exact(est, stats, sel, weights,
                                    local.combiners, k)
        approx[k] = global_sinr_approx(local.sinr[k, sel[k]],
                                       weights.mu[k, sel[k]])
        se_approx[k] = se_map_componentwise(local.sinr[k, sel[k]],
                                            weights.mu[k, sel[k]],
                                            pilots.tau_p, pilots.tau_c)
    local_sinr = np.full((stats.K, stats.L), np.nan)
    local_sinr[users] = local.sinr[users]
    return SinrReport(inst, se_map(inst, pilots.tau_p, pilots.tau_c),
                      'distributed', local=local_sinr, global_approx=approx,
                      se_approx=se_approx)
