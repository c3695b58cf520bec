"""
Combining weights and per-UE SINR/SE reports.

Licensed under The MIT License
Written by Jean Da Rolt
"""
import numpy as np

from xlmimo.structs.array_container import ArrayContainer


class WeightVector(ArrayContainer):
    """Weights mu_kl of the distributed signal aggregation.

    Attributes:
        mu: (K, L) nonnegative weights, zero outside the serving sets and
            for unscheduled UEs, rows of scheduled UEs sum to one.
        strategy: 'optimal', 'lsf' or 'equal'.
    """
    def __init__(self, mu, strategy):
        self.mu = mu
        self.strategy = strategy

    def row(self, k, subarrays):
        return self.mu[k, subarrays]


class LocalProcessing(ArrayContainer):
    """L-MMSE processing of one realization at every subarray.

    Attributes:
        sinr: (K, L) local SINRs, zero for unscheduled UEs.
        combiners: (K, L, M) L-MMSE combiners, zero for unscheduled UEs.
    """
    def __init__(self, sinr, combiners):
        self.sinr = sinr
        self.combiners = combiners


class SinrReport(ArrayContainer):
    """SINRs and SEs of every UE for one realization, NaN when the value
    does not apply (unscheduled UE, or a distributed-only quantity in a
    centralized report).

    Attributes:
        inst: (K,) instantaneous SINR of the operation mode. For
            distributed operation this is the exact global SINR.
        local: (K, L) local SINRs, distributed only.
        global_approx: (K,) approximate global SINR, distributed only.
        se: (K,) SE of inst.
        se_approx: (K,) SE of global_approx, distributed only.
        mode: 'centralized' or 'distributed'.
    """
    def __init__(self, inst, se, mode, local=None, global_approx=None,
                 se_approx=None):
        self.inst = inst
        self.se = se
        self.mode = mode
        K = inst.shape[0]  # pylint: disable=C0103
        self.local = local if local is not None else np.full((K, 0), np.nan)
        self.global_approx = global_approx if global_approx is not None \
            else np.full(K, np.nan)
        self.se_approx = se_approx if se_approx is not None \
            else np.full(K, np.nan)

    @property
    def global_exact(self):
        return self.inst
