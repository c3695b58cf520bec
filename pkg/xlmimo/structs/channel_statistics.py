"""
Long-term channel statistics of every (UE, subarray) pair.

Licensed under The MIT License
Written by Jean Da Rolt
"""
import numpy as np

from xlmimo.structs.array_container import ArrayContainer
from xlmimo.utils.exceptions import IndexOutOfRange
from xlmimo.utils.linalg import block_diag, psd_sqrt


class ChannelStatistics(ArrayContainer):
    """Rician block-diagonal channel statistics.

    Attributes:
        hbar: (K, L, M) complex LoS means, zero where los_flag is 0.
        R: (K, L, M, M) NLoS covariances.
        beta: (K, L) average channel gains tr(Q_kl)/M.
        beta_nlos: (K, L) average NLoS gains tr(R_kl)/M.
        los_flag: (K, L) 0/1 LoS indicators.
        p: (K,) transmit powers in W.
        noise_power: noise power in W.
        correlated: whether R comes from a spatial correlation model.
    """
    def __init__(self, hbar, R, beta, beta_nlos, los_flag, p, noise_power,
                 correlated=True):
        self.hbar = hbar
        self.R = R  # pylint: disable=C0103
        self.beta = beta
        self.beta_nlos = beta_nlos
        self.los_flag = los_flag
        self.p = p
        self.noise_power = float(noise_power)
        self.correlated = correlated
        self._Q = None
        self._R_sqrt = None

    @classmethod
    def from_components(cls, hbar, R, p, noise_power, los_flag=None,
                        correlated=True):
        """Builds statistics from means and covariances, deriving the gains.

        Args:
            hbar: (K, L, M) LoS means.
            R: (K, L, M, M) NLoS covariances.
            p: (K,) powers or a scalar used by every UE.
            noise_power: noise power in W.
            los_flag: (K, L) indicators, defaults to hbar != 0.
        """
        hbar = np.asarray(hbar, dtype=complex)
        R = np.asarray(R, dtype=complex)  # pylint: disable=C0103
        M = hbar.shape[-1]  # pylint: disable=C0103
        if los_flag is None:
            los_flag = np.any(hbar != 0, axis=-1).astype(int)
        beta_nlos = np.real(np.trace(R, axis1=-2, axis2=-1)) / M
        beta = beta_nlos + np.sum(np.abs(hbar) ** 2, axis=-1) / M
        p = np.broadcast_to(np.asarray(p, dtype=float),
                            (hbar.shape[0],)).copy()
        return cls(hbar, R, beta, beta_nlos, np.asarray(los_flag), p,
                   noise_power, correlated)

    @property
    def K(self):  # pylint: disable=C0103
        return self.hbar.shape[0]

    @property
    def L(self):  # pylint: disable=C0103
        return self.hbar.shape[1]

    @property
    def M(self):  # pylint: disable=C0103
        return self.hbar.shape[2]

    @property
    def Q(self):  # pylint: disable=C0103
        """(K, L, M, M) correlation matrices hbar hbar^H + R."""
        if self._Q is None:
            self._Q = np.einsum('klm,kln->klmn', self.hbar,
                                self.hbar.conj()) + self.R
        return self._Q

    @property
    def R_sqrt(self):  # pylint: disable=C0103
        """(K, L, M, M) symmetric PSD square roots of R."""
        if self._R_sqrt is None:
            roots = np.empty_like(self.R)
            for k in range(self.K):
                for l in range(self.L):
                    roots[k, l] = psd_sqrt(self.R[k, l])
            self._R_sqrt = roots
        return self._R_sqrt

    @property
    def beta_bar(self):
        """(K,) gains averaged over all subarrays."""
        return np.mean(self.beta, axis=1)

    def check_ue(self, k):
        if not 0 <= k < self.K:
            raise IndexOutOfRange('UE', k, self.K)

    def collective_mean(self, k, subarrays):
        """Stacked LoS mean of UE k over the given subarrays."""
        return self.hbar[k, subarrays].reshape(-1)

    def collective_correlation(self, k, subarrays):
        """Q_k restricted to the given subarrays, LoS cross blocks
        included."""
        hbar = self.collective_mean(k, subarrays)
        return np.outer(hbar, hbar.conj()) + \
            block_diag(self.R[k, subarrays])

    def select(self, keep):
        stats = super().select(keep)
        stats._Q = None
        stats._R_sqrt = None
        return stats

