"""
Deterministic SINR approximations and the rule that chooses between them.

Licensed under The MIT License
Written by Jean Da Rolt
"""
import numpy as np


class AsymptoticDiagnostics():
    """Counts of the corrections applied by the asymptotic SINRs."""
    def __init__(self):
        self.clamped = 0
        self.skipped = 0

    def merge(self, other):
        self.clamped += other.clamped
        self.skipped += other.skipped
        return self

    def __str__(self):
        return f"clamped numerators: {self.clamped}, " \
               f"skipped interferers: {self.skipped}"


class DeterministicSinr():
    """Deterministic SINR of one UE.

    Attributes:
        kind: 'ergodic' or 'asymptotic'.
        mode: 'centralized' or 'distributed'.
        values: (1,) for centralized, one value per serving subarray for
            distributed operation.
        subarrays: serving subarrays the values refer to.
        multiplications: real multiplications of the closed form.
        diagnostics: AsymptoticDiagnostics, asymptotic kind only.
    """
    def __init__(self, kind, mode, values, subarrays, multiplications,
                 diagnostics=None):
        self.kind = kind
        self.mode = mode
        self.values = np.asarray(values, dtype=float)
        self.subarrays = subarrays
        self.multiplications = multiplications
        self.diagnostics = diagnostics

    @property
    def value(self):
        """Centralized SINR, or the optimal-weight global approximation
        (sum of local SINRs) for distributed operation."""
        return float(np.sum(self.values))

    def __str__(self):
        return f"DeterministicSinr({self.kind}, {self.mode}, " \
               f"{self.values.tolist()})"


class SwitchRule():
    """User-load threshold below which the asymptotic SINR is used.

    Attributes:
        U_switch: nonnegative integer threshold.
        provenance: 'table' or 'config-override'.
    """
    def __init__(self, U_switch, provenance='table'):  # pylint: disable=C0103
        self.U_switch = int(U_switch)  # pylint: disable=C0103
        self.provenance = provenance

    def __eq__(self, other):
        return isinstance(other, SwitchRule) and \
            self.U_switch == other.U_switch and \
            self.provenance == other.provenance

    def __str__(self):
        return f"SwitchRule(U_switch={self.U_switch}, {self.provenance})"
