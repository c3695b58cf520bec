"""
Pilot lengths and pilot indices of the scheduled UEs.

Licensed under The MIT License
Written by Jean Da Rolt
"""
import numpy as np

from xlmimo.utils.exceptions import PilotError


UNSCHEDULED = -1


class PilotConfig():
    """Pilot assignment.

    Attributes:
        tau_p: pilot length in symbols.
        tau_c: coherence block length in symbols.
        t: (K,) pilot index of each UE in [0, tau_p), UNSCHEDULED for UEs
            that are not scheduled.
    """
    def __init__(self, tau_p, tau_c, t):
        t = np.array(t, dtype=int)
        if tau_p < 1:
            raise PilotError(f"Pilot length must be at least 1, got {tau_p}.")
        if tau_p > tau_c:
            raise PilotError(f"Pilot length {tau_p} exceeds coherence block "
                             f"length {tau_c}.")
        invalid = (t != UNSCHEDULED) & ((t < 0) | (t >= tau_p))
        if np.any(invalid):
            raise PilotError(f"Pilot indices {t[invalid].tolist()} outside "
                             f"[0, {tau_p}).")
        t.flags.writeable = False
        self.tau_p = int(tau_p)
        self.tau_c = int(tau_c)
        self.t = t

    @property
    def K(self):  # pylint: disable=C0103
        return self.t.size

    @property
    def scheduled(self):
        """Indices of scheduled UEs, ascending."""
        return np.flatnonzero(self.t != UNSCHEDULED)

    @property
    def U(self):  # pylint: disable=C0103
        return int(np.count_nonzero(self.t != UNSCHEDULED))

    def sharing(self, pilot):
        """P_t: UEs using the given pilot."""
        return np.flatnonzero(self.t == pilot)

    def groups(self):
        return [self.sharing(pilot) for pilot in range(self.tau_p)]

    @property
    def reuse(self):
        """Whether any pilot is shared by two or more UEs."""
        return any(group.size > 1 for group in self.groups())

    def require_scheduled(self):
        if self.U == 0:
            raise PilotError('No UE is scheduled.')

    def with_pilot(self, k, pilot, tau_p=None):
        """Copy where UE k uses the given pilot."""
        t = self.t.copy()
        t[k] = pilot
        return PilotConfig(self.tau_p if tau_p is None else tau_p,
                           self.tau_c, t)

    def __eq__(self, other):
        return isinstance(other, PilotConfig) and \
            self.tau_p == other.tau_p and self.tau_c == other.tau_c and \
            np.array_equal(self.t, other.t)

    def __str__(self):
        return f"PilotConfig(tau_p={self.tau_p}, tau_c={self.tau_c}, " \
               f"t={self.t.tolist()})"
