"""
Outcome of a scheduling and pilot assignment algorithm.

Licensed under The MIT License
Written by Jean Da Rolt
"""
import numpy as np

from xlmimo.structs.pilot_config import UNSCHEDULED, PilotConfig


class AllocationStep():
    """One iteration of an allocation algorithm.

    Attributes:
        ue: candidate UE.
        pilot: best pilot found for the candidate.
        metric: value of the algorithm's criterion at that pilot (maximum
            NMSE or minimum SE).
        admitted: whether the candidate was scheduled.
    """
    def __init__(self, ue, pilot, metric, admitted):
        self.ue = int(ue)
        self.pilot = int(pilot)
        self.metric = float(metric)
        self.admitted = bool(admitted)

    def to_dict(self):
        return {'ue': self.ue, 'pilot': self.pilot, 'metric': self.metric,
                'admitted': self.admitted}


class AllocationState():
    """Scheduled UEs, their pilots and (distributed) weights.

    Attributes:
        algorithm: name of the algorithm that produced the state.
        scheduled: scheduled UEs in admission order.
        pilots: PilotConfig over all K UEs.
        weights: WeightVector or None.
        trace: list of AllocationStep.
        serving: optional list of serving subarray arrays decided by the
            algorithm itself (book baseline).
        unserved: UEs that no subarray serves.
    """
    def __init__(self, algorithm, scheduled, pilots, weights=None,
                 trace=None, serving=None, unserved=None):
        self.algorithm = algorithm
        self.scheduled = [int(k) for k in scheduled]
        self.pilots = pilots
        self.weights = weights
        self.trace = trace if trace is not None else []
        self.serving = serving
        self.unserved = [int(k) for k in unserved] if unserved else []

    @property
    def U(self):  # pylint: disable=C0103
        return len(self.scheduled)

    @property
    def tau_p(self):
        return self.pilots.tau_p

    def admitted_count(self, threshold, above=True):
        """Length of the admission prefix whose trace metric satisfies a
        threshold, used to read the outcome of a run with a different
        threshold from a run with a vacuous one."""
        count = 0
        for step in self.trace:
            ok = step.metric >= threshold if above else \
                step.metric <= threshold
            if not ok:
                break
            count += 1
        return count

    def prefix(self, count):
        """State restricted to the first count scheduled UEs."""
        keep = self.scheduled[:count]
        t = np.full(self.pilots.K, UNSCHEDULED)
        t[keep] = self.pilots.t[keep]
        if self.algorithm in ('random', 'book'):
            tau_p = self.pilots.tau_p
        else:
            tau_p = int(t.max()) + 1 if keep else 1
        weights = None
        if self.weights is not None:
            weights = self.weights.copy()
            drop = np.setdiff1d(np.arange(self.pilots.K), keep)
            weights.mu[drop] = 0.
        return AllocationState(self.algorithm, keep,
                               PilotConfig(tau_p, self.pilots.tau_c, t),
                               weights, self.trace[:count], self.serving,
                               [k for k in self.unserved])

    def to_dict(self):
        """Report of the allocation, serialized by the emit action."""
        report = {
            'algorithm': self.algorithm,
            'scheduled': self.scheduled,
            'tau_p': self.pilots.tau_p,
            'tau_c': self.pilots.tau_c,
            'pilots': {k: int(self.pilots.t[k]) for k in self.scheduled},
            'trace': [step.to_dict() for step in self.trace],
        }
        if self.weights is not None:
            report['weights'] = {
                k: {int(l): float(self.weights.mu[k, l])
                    for l in np.flatnonzero(self.weights.mu[k])}
                for k in self.scheduled}
        if self.serving is not None:
            report['serving'] = {k: [int(l) for l in self.serving[k]]
                                 for k in range(len(self.serving))}
            report['unserved'] = self.unserved
        return report
