"""
Channel realizations and MMSE channel estimation under pilot
contamination.

Pilot observations are despread analytically: the observation of pilot t at
subarray l is y = sum_{i in P_t} sqrt(p_i) tau_p h_il + sqrt(tau_p) n_tl
with n_tl ~ CN(0, sigma^2 I), whose covariance is tau_p Psi_tl.

Licensed under The MIT License
Written by Jean Da Rolt
"""
import numpy as np

from xlmimo.structs.channel_estimate import (ChannelEstimate,
                                             ChannelRealization, NmseReport)
from xlmimo.utils.exceptions import PilotError, ZeroGain
from xlmimo.utils.linalg import factored_solve, hermitian_factor, \
    hermitian_part
from xlmimo.utils.rng import complex_normal


def sample_channel(stats, rng, trials=None):
    """Draws h = hbar + R^(1/2) w for every UE and subarray.

    Args:
        stats: ChannelStatistics.
        rng: numpy Generator owned by the caller.
        trials: number of independent realizations, None for a single one.

    Returns:
        ChannelRealization with h of shape (K, L, M) or (trials, K, L, M).
    """
    batch = () if trials is None else (trials,)
    w = complex_normal(rng, batch + (stats.K, stats.L, stats.M))
    h = stats.hbar + np.einsum('klmn,...kln->...klm', stats.R_sqrt, w)
    return ChannelRealization(h)


def pilot_matrices(stats, pilots):
    """Psi_tl = sum_{i in P_t} p_i tau_p R_il + sigma^2 I.

    Returns:
        (tau_p, L, M, M) Hermitian positive definite matrices.
    """
    pilots.require_scheduled()
    Psi = np.broadcast_to(  # pylint: disable=C0103
        stats.noise_power * np.eye(stats.M, dtype=complex),
        (pilots.tau_p, stats.L, stats.M, stats.M)).copy()
    for k in pilots.scheduled:
        Psi[pilots.t[k]] += stats.p[k] * pilots.tau_p * stats.R[k]
    return Psi


def _estimation_gains(stats, pilots, Psi):  # pylint: disable=C0103
    """Per (k, l): X_kl = Psi_{t_k l}^-1 R_kl, used by the estimator and by
    the error covariance."""
    X = np.zeros_like(stats.R)  # pylint: disable=C0103
    for l in range(stats.L):
        factors = {}
        for k in pilots.scheduled:
            t = pilots.t[k]
            if t not in factors:
                factors[t] = hermitian_factor(Psi[t, l])
            X[k, l] = factored_solve(factors[t], stats.R[k, l])
    return X


def error_covariances(stats, pilots, Psi=None):  # pylint: disable=C0103
    """C_kl = R_kl - p_k tau_p R_kl Psi_{t_k l}^-1 R_kl.

    Returns:
        (C, Psi) with C of shape (K, L, M, M), zero for unscheduled UEs.
    """
    if Psi is None:
        Psi = pilot_matrices(stats, pilots)  # pylint: disable=C0103
    X = _estimation_gains(stats, pilots, Psi)  # pylint: disable=C0103
    return _errors_from_gains(stats, pilots, X), Psi


def estimate_cross_covariance(stats, pilots, k, i, Psi=None):  # pylint: disable=C0103
    """A_kil = sqrt(p_k p_i) tau_p R_kl Psi_{t_k l}^-1 R_il, the covariance
    of the estimates of two UEs sharing a pilot.

    Returns:
        (L, M, M), zero when the UEs hold different pilots.
    """
    stats.check_ue(k)
    stats.check_ue(i)
    if pilots.t[k] < 0 or pilots.t[i] < 0:
        raise PilotError(f"UEs {k} and {i} must both be scheduled.")
    A = np.zeros((stats.L, stats.M, stats.M), dtype=complex)  # pylint: disable=C0103
    if pilots.t[k] != pilots.t[i]:
        return A
    if Psi is None:
        Psi = pilot_matrices(stats, pilots)  # pylint: disable=C0103
    scale = np.sqrt(stats.p[k] * stats.p[i]) * pilots.tau_p
    for l in range(stats.L):
        A[l] = scale * stats.R[k, l] @ factored_solve(
            hermitian_factor(Psi[pilots.t[k], l]), stats.R[i, l])
    return A


def _errors_from_gains(stats, pilots, X):  # pylint: disable=C0103
    C = np.zeros_like(stats.R)  # pylint: disable=C0103
    for k in pilots.scheduled:
        C[k] = hermitian_part(
            stats.R[k] - stats.p[k] * pilots.tau_p * stats.R[k] @ X[k])
    return C


def mmse_estimate(real, stats, pilots, rng):
    """MMSE estimates of the scheduled UEs' channels.

    Args:
        real: ChannelRealization, single or batched.
        stats: ChannelStatistics.
        pilots: PilotConfig.
        rng: numpy Generator for the pilot noise.

    Returns:
        ChannelEstimate; hhat has the shape of real.h.
    """
    pilots.require_scheduled()
    Psi = pilot_matrices(stats, pilots)  # pylint: disable=C0103
    X = _estimation_gains(stats, pilots, Psi)  # pylint: disable=C0103
    scheduled = pilots.scheduled
    tau_p = pilots.tau_p

    # spreading[t, i] = sqrt(p_i) tau_p for i in P_t
    spreading = np.zeros((tau_p, stats.K))
    spreading[pilots.t[scheduled], scheduled] = \
        np.sqrt(stats.p[scheduled]) * tau_p
    batch = real.h.shape[:-3]
    noise = complex_normal(rng, batch + (tau_p, stats.L, stats.M)) * \
        np.sqrt(stats.noise_power)
    deviation = np.einsum('tk,...klm->...tlm', spreading,
                          real.h - stats.hbar) + np.sqrt(tau_p) * noise

    # sqrt(p_k) R_kl Psi^-1 = sqrt(p_k) X_kl^H since R and Psi are Hermitian
    gains = np.sqrt(stats.p)[:, None, None, None] * \
        np.swapaxes(X, -1, -2).conj()
    hhat = np.zeros(real.h.shape, dtype=complex)
    hhat[..., scheduled, :, :] = stats.hbar[scheduled] + np.einsum(
        'klmn,...kln->...klm', gains[scheduled],
        deviation[..., pilots.t[scheduled], :, :])

    return ChannelEstimate(hhat, _errors_from_gains(stats, pilots, X), Psi,
                           pilots)


def nmse(estimate, stats, scope='global'):
    """Normalized mean squared estimation errors.

    Args:
        estimate: ChannelEstimate, or (K, L, M, M) error covariances.
        stats: ChannelStatistics.
        scope: 'per_subarray' for gamma_kl, 'global' for gamma_k.

    Returns:
        NmseReport, NaN for unscheduled UEs.
    """
    if isinstance(estimate, ChannelEstimate):
        C, scheduled = estimate.C, estimate.pilots.scheduled  # pylint: disable=C0103
    else:
        C = estimate  # pylint: disable=C0103
        scheduled = np.arange(stats.K)
    trace_C = np.real(np.trace(C, axis1=-2, axis2=-1))
    trace_Q = np.real(np.trace(stats.Q, axis1=-2, axis2=-1))

    if scope == 'per_subarray':
        gamma = np.full((stats.K, stats.L), np.nan)
        for k in scheduled:
            if np.any(trace_Q[k] <= 0):
                raise ZeroGain(k)
            gamma[k] = trace_C[k] / trace_Q[k]
        return NmseReport(per_subarray=gamma)
    if scope == 'global':
        gamma = np.full(stats.K, np.nan)
        for k in scheduled:
            if np.sum(trace_Q[k]) <= 0:
                raise ZeroGain(k)
            gamma[k] = np.sum(trace_C[k]) / np.sum(trace_Q[k])
        return NmseReport(per_ue=gamma)
    raise PilotError(f"Unknown NMSE scope {scope}.")
