"""
Serving subarray sets of every UE.

Licensed under The MIT License
Written by Jean Da Rolt
"""
import numpy as np

from xlmimo.utils.exceptions import IndexOutOfRange, SelectionError


class SelectionMatrixSet():
    """Serving sets D_k as ascending arrays of subarray indices.

    The ascending order fixes the block order of the centralized
    coordinates, so results do not depend on how a strategy ranked the
    subarrays.
    """
    def __init__(self, D, L):  # pylint: disable=C0103
        self.L = L  # pylint: disable=C0103
        self.D = []  # pylint: disable=C0103
        for k, subarrays in enumerate(D):
            subarrays = np.sort(np.asarray(subarrays, dtype=int))
            if subarrays.size == 0:
                raise SelectionError(f"UE {k} has no serving subarray.")
            if np.any(subarrays < 0) or np.any(subarrays >= L):
                raise SelectionError(f"UE {k} served by a subarray outside "
                                     f"[0, {L}).")
            if np.unique(subarrays).size != subarrays.size:
                raise SelectionError(f"UE {k} has duplicated subarrays.")
            subarrays.flags.writeable = False
            self.D.append(subarrays)

    @property
    def K(self):  # pylint: disable=C0103
        return len(self.D)

    @property
    def L_k(self):  # pylint: disable=C0103
        return np.array([subarrays.size for subarrays in self.D])

    def __getitem__(self, k):
        if not 0 <= k < self.K:
            raise IndexOutOfRange('UE', k, self.K)
        return self.D[k]

    def __len__(self):
        return self.K

    def mask(self):
        """(K, L) boolean serving mask."""
        mask = np.zeros((self.K, self.L), dtype=bool)
        for k, subarrays in enumerate(self.D):
            mask[k, subarrays] = True
        return mask

    def matrix(self, k, M):  # pylint: disable=C0103
        """Block selection matrix D_k of size ML x ML."""
        diagonal = np.repeat(self.mask()[k].astype(float), M)
        return np.diag(diagonal)

    def served_by(self, l):
        """UEs that have subarray l in their serving set."""
        return [k for k, subarrays in enumerate(self.D) if l in subarrays]

    def __eq__(self, other):
        return isinstance(other, SelectionMatrixSet) and \
            self.L == other.L and len(self.D) == len(other.D) and \
            all(np.array_equal(a, b) for a, b in zip(self.D, other.D))

    def __str__(self):
        return 'SelectionMatrixSet: ' + \
            ', '.join(f"{k}: {list(d)}" for k, d in enumerate(self.D))


class SinrContext():
    """Deterministic local SINRs used by the SINR-based selection.

    Attributes:
        local_sinr: (K, L) local SINR of every UE at every subarray.
        approximation: 'ergodic' or 'asymptotic'.
    """
    def __init__(self, local_sinr, approximation):
        self.local_sinr = local_sinr
        self.approximation = approximation
