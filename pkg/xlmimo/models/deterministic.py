"""
Deterministic approximations of the uplink SINR from channel statistics
only, the rule that chooses between them and their costs in real
multiplications.

ergodic      p_k tr(Zbar_k^-1 X_k), X_k = Q_k - C_k and
             Zbar_k = sum_{i != k} p_i Q_i + p_k C_k + sigma^2 I
asymptotic   p_k max(num, 0) / (sum_i p_i / N tr(C_i) + sigma^2) with
             num = tr(X_k) - sum_{i != k} tr(X_i X_k) / tr(X_i)

Centralized quantities live on the N = M L_k coordinates of the serving
subarrays and keep the LoS cross blocks, distributed ones are per subarray
with N = M.

Licensed under The MIT License
Written by Jean Da Rolt
"""
import logging

import numpy as np

from xlmimo.functions.ldl import trace_inv_product
from xlmimo.models.channel import error_covariances
from xlmimo.structs.deterministic_sinr import AsymptoticDiagnostics, \
    DeterministicSinr, SwitchRule
from xlmimo.structs.selection import SelectionMatrixSet, SinrContext
from xlmimo.utils.exceptions import PilotError, SelectionError
from xlmimo.utils.linalg import block_diag, hermitian_solve


ZERO_TRACE = 1e-300

# U_switch as a fraction of the array size, keyed by
# (correlated, pilot reuse)
SWITCH_FRACTIONS = {
    (False, False): (1, 2),
    (False, True): (1, 4),
    (True, False): (1, 4),
    (True, True): (0, 1),
}


def _scheduled_users(stats, pilots, k, C):
    stats.check_ue(k)
    if pilots.t[k] < 0:
        raise PilotError(f"UE {k} is not scheduled.")
    if C is None:
        C, _ = error_covariances(stats, pilots)  # pylint: disable=C0103
    return pilots.scheduled, C


def _collective(stats, C, i, subarrays):  # pylint: disable=C0103
    """(Q_i, C_i) on the serving coordinates."""
    return stats.collective_correlation(i, subarrays), \
        block_diag(C[i, subarrays])


def ergodic_sinr_centralized(stats, pilots, sel, k, C=None, counter=None):  # pylint: disable=C0103
    """Ergodic SINR of UE k under centralized operation.

    Args:
        stats: ChannelStatistics.
        pilots: PilotConfig.
        sel: SelectionMatrixSet.
        k: scheduled UE.
        C: (K, L, M, M) error covariances, computed from pilots when None.
        counter: MultiplicationCounter routing the trace through the
            instrumented LDL^H path.

    Returns:
        DeterministicSinr with one value.
    """
    users, C = _scheduled_users(stats, pilots, k, C)  # pylint: disable=C0103
    subarrays = sel[k]
    N = stats.M * subarrays.size  # pylint: disable=C0103
    Zbar = stats.noise_power * np.eye(N, dtype=complex)  # pylint: disable=C0103
    for i in users:
        Q_i, C_i = _collective(stats, C, i, subarrays)  # pylint: disable=C0103
        Zbar += stats.p[i] * (C_i if i == k else Q_i)
    Q_k, C_k = _collective(stats, C, k, subarrays)  # pylint: disable=C0103
    sinr = stats.p[k] * trace_inv_product(Zbar, Q_k - C_k, counter)
    return DeterministicSinr(
        'ergodic', 'centralized', [max(sinr, 0.)], subarrays,
        complexity_count('ergodic', 'centralized', stats.M, subarrays.size,
                         users.size))


def ergodic_sinr_distributed(stats, pilots, sel, k, C=None, counter=None):  # pylint: disable=C0103
    """Ergodic local SINRs of UE k at its serving subarrays."""
    users, C = _scheduled_users(stats, pilots, k, C)  # pylint: disable=C0103
    subarrays = sel[k]
    Q = stats.Q  # pylint: disable=C0103
    values = []
    for l in subarrays:
        Zbar = stats.noise_power * np.eye(stats.M, dtype=complex) + \
            np.einsum('i,imn->mn', stats.p[users], Q[users, l]) - \
            stats.p[k] * (Q[k, l] - C[k, l])  # pylint: disable=C0103
        values.append(max(stats.p[k] * trace_inv_product(
            Zbar, Q[k, l] - C[k, l], counter), 0.))
    return DeterministicSinr(
        'ergodic', 'distributed', values, subarrays,
        complexity_count('ergodic', 'distributed', stats.M, subarrays.size,
                         users.size))


def _asymptotic_value(p, k_pos, X, traces_C, noise_power, N, diagnostics,
                      k):  # pylint: disable=C0103
    """Asymptotic SINR from the useful-signal matrices X of the scheduled
    UEs, k_pos being the position of the UE of interest."""
    X_k = X[k_pos]  # pylint: disable=C0103
    numerator = np.real(np.trace(X_k))
    for pos, X_i in enumerate(X):  # pylint: disable=C0103
        if pos == k_pos:
            continue
        trace_i = np.real(np.trace(X_i))
        if trace_i <= ZERO_TRACE:
            diagnostics.skipped += 1
            logging.debug(f"UE {k}: interferer with zero useful trace "
                          f"skipped")
            continue
        # tr(X_i X_k) for Hermitian matrices
        numerator -= np.real(np.sum(X_i * X_k.T)) / trace_i
    if numerator < 0:
        diagnostics.clamped += 1
        logging.debug(f"UE {k}: negative asymptotic numerator "
                      f"{numerator:.3e} clamped")
        numerator = 0.
    denominator = np.sum(p * traces_C) / N + noise_power
    return float(p[k_pos] * numerator / denominator)


def asymptotic_sinr_centralized(stats, pilots, sel, k, C=None):  # pylint: disable=C0103
    """Large-array SINR of UE k under centralized operation."""
    users, C = _scheduled_users(stats, pilots, k, C)  # pylint: disable=C0103
    subarrays = sel[k]
    N = stats.M * subarrays.size  # pylint: disable=C0103
    if users.size > N:
        logging.debug(f"UE {k}: {users.size} users exceed {N} dimensions, "
                      f"asymptotic SINR outside its load regime")
    X, traces_C = [], []  # pylint: disable=C0103
    for i in users:
        Q_i, C_i = _collective(stats, C, i, subarrays)  # pylint: disable=C0103
        X.append(Q_i - C_i)
        traces_C.append(np.real(np.trace(C_i)))
    diagnostics = AsymptoticDiagnostics()
    k_pos = int(np.flatnonzero(users == k)[0])
    value = _asymptotic_value(stats.p[users], k_pos, X, np.array(traces_C),
                              stats.noise_power, N, diagnostics, k)
    return DeterministicSinr(
        'asymptotic', 'centralized', [value], subarrays,
        complexity_count('asymptotic', 'centralized', stats.M,
                         subarrays.size, users.size), diagnostics)


def asymptotic_sinr_distributed(stats, pilots, sel, k, C=None):  # pylint: disable=C0103
    """Large-array local SINRs of UE k at its serving subarrays."""
    users, C = _scheduled_users(stats, pilots, k, C)  # pylint: disable=C0103
    subarrays = sel[k]
    if users.size > stats.M:
        logging.debug(f"UE {k}: {users.size} users exceed {stats.M} "
                      f"antennas, asymptotic SINR outside its load regime")
    Q = stats.Q  # pylint: disable=C0103
    k_pos = int(np.flatnonzero(users == k)[0])
    diagnostics = AsymptoticDiagnostics()
    values = []
    for l in subarrays:
        X = Q[users, l] - C[users, l]  # pylint: disable=C0103
        traces_C = np.real(np.trace(C[users, l], axis1=-2, axis2=-1))
        values.append(_asymptotic_value(stats.p[users], k_pos, X, traces_C,
                                        stats.noise_power, stats.M,
                                        diagnostics, k))
    return DeterministicSinr(
        'asymptotic', 'distributed', values, subarrays,
        complexity_count('asymptotic', 'distributed', stats.M,
                         subarrays.size, users.size), diagnostics)


def u_switch(correlated, pilot_reuse, mode, M, L_k, override=None):  # pylint: disable=C0103
    """User-load threshold of the asymptotic approximation.

    Args:
        correlated: spatially correlated NLoS.
        pilot_reuse: some pilot is shared.
        mode: 'centralized' or 'distributed'.
        M: antennas per subarray.
        L_k: serving subarrays.
        override: numerical threshold replacing the table.

    Returns:
        SwitchRule.
    """
    if override is not None:
        return SwitchRule(override, 'config-override')
    size = M * L_k if mode == 'centralized' else M
    numerator, denominator = SWITCH_FRACTIONS[(bool(correlated),
                                               bool(pilot_reuse))]
    return SwitchRule(size * numerator // denominator)


def select_approximation(U, rule):  # pylint: disable=C0103
    return 'asymptotic' if U <= rule.U_switch else 'ergodic'


def complexity_count(kind, mode, M, L_k, U):  # pylint: disable=C0103
    """Real multiplications of one deterministic SINR evaluation."""
    if kind == 'ergodic':
        N = M * L_k if mode == 'centralized' else M  # pylint: disable=C0103
        per_matrix = 3 * N ** 3 + (N ** 2 - 3 * N) // 2
        return per_matrix if mode == 'centralized' else L_k * per_matrix
    if kind == 'asymptotic':
        if U <= 1:
            return 0
        if mode == 'centralized':
            return 3 * (U - 1) * (M * L_k) ** 2
        return 3 * (U - 1) * M ** 2 * L_k
    raise ValueError(f"Unknown approximation {kind}")


def deterministic_sinr(stats, pilots, sel, k, mode, rule=None, C=None,
                       counter=None):  # pylint: disable=C0103
    """Deterministic SINR of UE k with the approximation chosen by the
    switching rule. Without a rule the table rule of the live pilot
    configuration applies."""
    if rule is None:
        rule = u_switch(stats.correlated, pilots.reuse, mode, stats.M,
                        sel[k].size)
    kind = select_approximation(pilots.U, rule)
    if mode == 'centralized':
        if kind == 'asymptotic':
            return asymptotic_sinr_centralized(stats, pilots, sel, k, C)
        return ergodic_sinr_centralized(stats, pilots, sel, k, C, counter)
    if mode == 'distributed':
        if kind == 'asymptotic':
            return asymptotic_sinr_distributed(stats, pilots, sel, k, C)
        return ergodic_sinr_distributed(stats, pilots, sel, k, C, counter)
    raise SelectionError(f"Unknown operation mode {mode}.")


def sinr_selection_context(stats, pilots, rule_override=None):
    """Deterministic local SINR of every scheduled UE at every subarray.

    Returns:
        SinrContext, zero rows for unscheduled UEs.
    """
    everywhere = SelectionMatrixSet([np.arange(stats.L)] * stats.K, stats.L)
    rule = u_switch(stats.correlated, pilots.reuse, 'distributed', stats.M,
                    stats.L, rule_override)
    kind = select_approximation(pilots.U, rule)
    C, _ = error_covariances(stats, pilots)  # pylint: disable=C0103
    local_sinr = np.zeros((stats.K, stats.L))
    for k in pilots.scheduled:
        if kind == 'asymptotic':
            result = asymptotic_sinr_distributed(stats, pilots, everywhere,
                                                 k, C)
        else:
            result = ergodic_sinr_distributed(stats, pilots, everywhere, k, C)
        local_sinr[k] = result.values
    return SinrContext(local_sinr, kind)


def neumann_ratio(Z, Zbar):  # pylint: disable=C0103
    """Spectral norm of Zbar^-1 (Z - Zbar), below one where the Neumann
    expansion around Zbar converges."""
    return float(np.linalg.norm(hermitian_solve(Zbar, Z - Zbar), 2))
