"""Accuracy and fairness metrics of SE series."""
import logging

import numpy as np

from xlmimo.utils.exceptions import MetricError


PERCENTILES = (5, 50, 95)


def mnae(truth, estimate):
    """Mean normalized absolute error mean(|estimate - truth| / truth).

    Samples whose truth is zero are dropped.

    Args:
        truth: reference values, scalar or array.
        estimate: approximations with the same shape.

    Returns:
        float MNAE.
    """
    truth = np.asarray(truth, dtype=float).ravel()
    estimate = np.asarray(estimate, dtype=float).ravel()
    if truth.shape != estimate.shape:
        raise MetricError(f"Series lengths differ: {truth.size} truths, "
                          f"{estimate.size} estimates.")
    keep = truth > 0
    if not np.all(keep):
        logging.debug(f"MNAE: dropped {int(np.sum(~keep))} zero-truth "
                      f"samples")
    if not np.any(keep):
        raise MetricError('No positive truth value left to normalize by.')
    return float(np.mean(np.abs(estimate[keep] - truth[keep]) / truth[keep]))


def ergodic_mnae(truth_samples, estimate):
    """MNAE of deterministic values against Monte Carlo means.

    Args:
        truth_samples: (trials, U) instantaneous values.
        estimate: (U,) deterministic values.
    """
    truth_samples = np.asarray(truth_samples, dtype=float)
    if truth_samples.ndim != 2 or truth_samples.shape[0] == 0:
        raise MetricError('Monte Carlo truth needs at least one trial.')
    return mnae(np.mean(truth_samples, axis=0), estimate)


def percentiles(values, qs=PERCENTILES):
    """Percentiles of a pooled SE series, NaNs ignored."""
    values = np.asarray(values, dtype=float).ravel()
    values = values[~np.isnan(values)]
    if values.size == 0:
        raise MetricError('Percentiles of an empty series.')
    return np.percentile(values, qs)


def min_mean_se(se_samples):
    """Minimum over UEs of the per-UE mean SE.

    Args:
        se_samples: (trials, U) SEs.
    """
    se_samples = np.asarray(se_samples, dtype=float)
    if se_samples.size == 0:
        raise MetricError('Minimum SE of an empty series.')
    return float(np.min(np.mean(se_samples, axis=0)))
