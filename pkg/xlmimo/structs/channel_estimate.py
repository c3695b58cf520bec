"""
Channel realizations, MMSE estimates and estimation errors.

Licensed under The MIT License
Written by Jean Da Rolt
"""
from xlmimo.structs.array_container import ArrayContainer


class ChannelRealization(ArrayContainer):
    """Instantaneous channels.

    Attributes:
        h: (..., K, L, M) complex channels. Leading axes index independent
            realizations when drawn in batch.
    """
    def __init__(self, h):
        self.h = h


class ChannelEstimate(ArrayContainer):
    """MMSE estimates and the statistics they were computed with.

    Attributes:
        hhat: (..., K, L, M) estimates, zero for unscheduled UEs.
        C: (K, L, M, M) error covariances, zero for unscheduled UEs.
        Psi: (tau_p, L, M, M) pilot observation covariances.
        pilots: PilotConfig used for estimation.
    """
    def __init__(self, hhat, C, Psi, pilots):  # pylint: disable=C0103
        self.hhat = hhat
        self.C = C  # pylint: disable=C0103
        self.Psi = Psi  # pylint: disable=C0103
        self.pilots = pilots


class NmseReport():
    """Normalized mean squared errors.

    Attributes:
        per_subarray: (K, L) gamma_kl, None when not requested.
        per_ue: (K,) gamma_k, None when not requested.
    Unscheduled UEs hold NaN.
    """
    def __init__(self, per_subarray=None, per_ue=None):
        self.per_subarray = per_subarray
        self.per_ue = per_ue
