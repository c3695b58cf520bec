"""
Deployment geometry, long-term channel statistics and subarray selection.

The array is a horizontal line of L subarrays centered at the origin along
the x axis. Each subarray is a sqrt(M) x sqrt(M) UPA lying in the x-z plane
and facing +y, where UEs are dropped.

Licensed under The MIT License
Written by Jean Da Rolt
"""
import logging
import math

import numpy as np

from tools.time_profiling import profilable
from xlmimo.structs.channel_statistics import ChannelStatistics
from xlmimo.structs.selection import SelectionMatrixSet
from xlmimo.structs.system_geometry import SystemGeometry
from xlmimo.utils import rng as rng_streams
from xlmimo.utils.exceptions import (InvalidChannelModel, InvalidGeometry,
                                     SelectionError, UndefinedAngle)


MIN_DISTANCE = 1e-9


def build_geometry(config, drop=0):
    """Places the subarrays and drops the UEs.

    Args:
        config: ScenarioConfig with GEOMETRY and SEED.
        drop: UE drop index, selects the random stream.

    Returns:
        SystemGeometry, a pure function of (config, drop).
    """
    geometry = config.GEOMETRY
    L, M, K = geometry.L, geometry.M, geometry.K  # pylint: disable=C0103
    if min(L, M) < 1 or K < 1:
        raise InvalidGeometry(f"L={L}, M={M}, K={K} must be positive")
    side = math.isqrt(M)
    if side * side != M:
        raise InvalidGeometry(f"M={M} is not a perfect square")
    width, depth = geometry.AREA
    if width <= 0 or depth <= 0 or geometry.SUBARRAY_SPACING <= 0:
        raise InvalidGeometry('area and spacing must be positive')

    wavelength = geometry.WAVELENGTH
    spacing = wavelength / 2

    centers = np.zeros((L, 3))
    centers[:, 0] = (np.arange(L) - (L - 1) / 2) * geometry.SUBARRAY_SPACING
    centers[:, 2] = geometry.ARRAY_HEIGHT

    # antenna m sits on row m // side (z) and column m % side (x)
    grid = (np.arange(side) - (side - 1) / 2) * spacing
    offsets = np.zeros((M, 3))
    offsets[:, 0] = np.tile(grid, side)
    offsets[:, 2] = np.repeat(grid, side)
    offsets = np.broadcast_to(offsets, (L, M, 3)).copy()

    rng = rng_streams.stream(config.SEED, 'geometry', drop=drop)
    ues = np.zeros((K, 3))
    ues[:, 0] = rng.uniform(-width / 2, width / 2, K)
    ues[:, 1] = depth - rng.uniform(0, depth, K)
    ues[:, 2] = geometry.UE_HEIGHT

    return SystemGeometry(centers, offsets, ues, wavelength,
                          (width, depth)).freeze()


def pathloss_gain(distance, channel_config):
    """Linear channel gain of the log-distance model."""
    pathloss = channel_config.PATHLOSS
    gain_db = pathloss.INTERCEPT_DB - pathloss.EXPONENT * np.log10(distance)
    return 10 ** (gain_db / 10)


def rician_factor(distance, channel_config):
    rician = channel_config.RICIAN
    if rician.FACTOR is not None:
        kappa = np.full_like(distance, float(rician.FACTOR))
    else:
        kappa = 10 ** (rician.OFFSET - rician.SLOPE * distance)
    if np.any(kappa < 0):
        raise InvalidChannelModel(f"negative Rician factor {kappa.min()}")
    return kappa


def los_probability(distance_2d):
    """Street-canyon LoS probability as a function of horizontal
    distance."""
    return np.minimum(18 / np.maximum(distance_2d, MIN_DISTANCE), 1) * \
        (1 - np.exp(-distance_2d / 36)) + np.exp(-distance_2d / 36)


def los_flags(distance, distance_2d, channel_config, seed, drop):
    mode = channel_config.LOS
    if mode == 'always':
        return np.ones(distance.shape, dtype=int)
    if mode == 'never':
        return np.zeros(distance.shape, dtype=int)
    if mode == 'visibility':
        return (distance <= channel_config.VISIBILITY_RADIUS).astype(int)
    if mode == 'probabilistic':
        rng = rng_streams.stream(seed, 'los', drop=drop)
        draws = rng.uniform(size=distance.shape)
        return (draws < los_probability(distance_2d)).astype(int)
    raise InvalidChannelModel(f"unknown LoS mode {mode}")


def direction(vector):
    """Azimuth and elevation of a vector seen from a UPA facing +y.

    Returns:
        (azimuth, elevation) in radians such that the unit vector is
        (cos el sin az, cos el cos az, sin el).
    """
    distance = np.linalg.norm(vector)
    azimuth = math.atan2(vector[0], vector[1])
    elevation = math.asin(np.clip(vector[2] / distance, -1, 1))
    return azimuth, elevation


def steering_vector(offsets, azimuth, elevation, wavelength):
    """Plane-wave response of a UPA in the x-z plane."""
    unit = np.array([math.cos(elevation) * math.sin(azimuth),
                     math.cos(elevation) * math.cos(azimuth),
                     math.sin(elevation)])
    return np.exp(2j * np.pi / wavelength * offsets @ unit)


def local_scattering_covariance(side, azimuth, elevation, asd_azimuth,
                                asd_elevation, spacing=0.5):
    """Normalized spatial correlation of a side x side UPA.

    Gaussian angular deviations around the nominal direction are applied
    per UPA axis with a first-order approximation, and the two axes are
    composed with a Kronecker product. The diagonal is one.

    Args:
        side: antennas per UPA row.
        azimuth, elevation: nominal direction in radians.
        asd_azimuth, asd_elevation: angular standard deviations in radians.
        spacing: antenna spacing in wavelengths.
    """
    lag = np.subtract.outer(np.arange(side), np.arange(side))
    phase = 2 * np.pi * spacing * lag
    horizontal = math.cos(elevation) * math.sin(azimuth)
    horizontal_slope = math.cos(elevation) * math.cos(azimuth)
    vertical = math.sin(elevation)
    vertical_slope = math.cos(elevation)
    R_x = np.exp(1j * phase * horizontal) * \
        np.exp(-asd_azimuth ** 2 / 2 * (phase * horizontal_slope) ** 2)
    R_z = np.exp(1j * phase * vertical) * \
        np.exp(-asd_elevation ** 2 / 2 * (phase * vertical_slope) ** 2)
    return np.kron(R_z, R_x)


@profilable
def compute_channel_statistics(geom, config, drop=0):
    """Long-term statistics of every (UE, subarray) pair.

    Args:
        geom: SystemGeometry.
        config: ScenarioConfig with CHANNEL and POWER sections.
        drop: UE drop index, selects the LoS random stream.

    Returns:
        ChannelStatistics.
    """
    channel = config.CHANNEL
    K, L, M = geom.K, geom.L, geom.M  # pylint: disable=C0103
    vectors = geom.ue_positions[:, None, :] - \
        geom.subarray_positions[None, :, :]
    distance = np.linalg.norm(vectors, axis=-1)
    if np.any(distance < MIN_DISTANCE):
        k, l = np.argwhere(distance < MIN_DISTANCE)[0]
        raise UndefinedAngle(k, l)
    distance_2d = np.linalg.norm(vectors[..., :2], axis=-1)

    beta = pathloss_gain(distance, channel)
    kappa = rician_factor(distance, channel)
    los_flag = los_flags(distance, distance_2d, channel, config.SEED, drop)
    beta_nlos = np.where(los_flag == 1, beta / (kappa + 1), beta)

    correlated = channel.CORRELATION == 'local_scattering'
    asd_azimuth = math.radians(channel.ASD_AZIMUTH_DEG)
    asd_elevation = math.radians(channel.ASD_ELEVATION_DEG)
    wavelength = geom.carrier_wavelength

    hbar = np.zeros((K, L, M), dtype=complex)
    R = np.zeros((K, L, M, M), dtype=complex)  # pylint: disable=C0103
    for k in range(K):
        for l in range(L):
            azimuth, elevation = direction(vectors[k, l])
            if correlated:
                R[k, l] = beta_nlos[k, l] * local_scattering_covariance(
                    geom.side, azimuth, elevation, asd_azimuth, asd_elevation)
            else:
                R[k, l] = beta_nlos[k, l] * np.eye(M)
            if los_flag[k, l]:
                phase = np.exp(-2j * np.pi * distance[k, l] / wavelength)
                hbar[k, l] = math.sqrt(beta[k, l] - beta_nlos[k, l]) * \
                    phase * steering_vector(geom.antenna_offsets[l], azimuth,
                                            elevation, wavelength)

    p = np.full(K, config.POWER.UE_W)
    logging.debug(f"Channel statistics of drop {drop}: "
                  f"{int(los_flag.sum())} LoS links out of {K * L}")
    return ChannelStatistics(hbar, R, beta, beta_nlos, los_flag, p,
                             config.POWER.NOISE_W, correlated)


def average_gain(stats, k):
    """(1/L) sum_l beta_kl."""
    stats.check_ue(k)
    return float(np.mean(stats.beta[k]))


def select_subarrays(strategy, stats, L_k, context=None, rng=None):  # pylint: disable=C0103
    """Serving subarrays of every UE.

    Args:
        strategy: 'random', 'lsf' or 'sinr'.
        stats: ChannelStatistics.
        L_k: serving subarrays per UE.
        context: SinrContext, required by 'sinr'.
        rng: numpy Generator, required by 'random'.

    Returns:
        SelectionMatrixSet. Ranked strategies break ties toward the lower
        subarray index.
    """
    L = stats.L  # pylint: disable=C0103
    if not 1 <= L_k <= L:
        raise SelectionError(f"L_k={L_k} must lie in [1, {L}].")
    if strategy == 'random':
        if rng is None:
            raise SelectionError('Random selection needs a random stream.')
        D = [rng.choice(L, size=L_k, replace=False)  # pylint: disable=C0103
             for _ in range(stats.K)]
    elif strategy == 'lsf':
        D = [np.argsort(-stats.beta[k], kind='stable')[:L_k]  # pylint: disable=C0103
             for k in range(stats.K)]
    elif strategy == 'sinr':
        if context is None:
            raise SelectionError('SINR selection needs a SINR context.')
        D = [np.argsort(-context.local_sinr[k], kind='stable')[:L_k]  # pylint: disable=C0103
             for k in range(stats.K)]
    else:
        raise SelectionError(f"Unknown selection strategy {strategy}.")
    return SelectionMatrixSet(D, L)
