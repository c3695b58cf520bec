"""
Aggregated experiment results.

Licensed under The MIT License
Written by Jean Da Rolt
"""
import math

import numpy as np


COLUMNS = ['sweep', 'metric', 'mean', 'stderr', 'trials']


class MetricRow():
    def __init__(self, sweep, metric, mean, stderr, trials):
        self.sweep = float(sweep)
        self.metric = metric
        self.mean = float(mean)
        self.stderr = float(stderr)
        self.trials = int(trials)

    def key(self):
        return (self.sweep, self.metric)

    def values(self):
        return [self.sweep, self.metric, self.mean, self.stderr, self.trials]

    def __eq__(self, other):
        return isinstance(other, MetricRow) and \
            all(_same(a, b) for a, b in zip(self.values(), other.values()))

    def __repr__(self):
        return f"MetricRow({self.values()})"


class MetricsTable():
    """Rows keyed by (sweep value, metric name), in insertion order."""
    def __init__(self, rows=None):
        self.rows = []
        self._index = {}
        for row in rows or []:
            self.add_row(row)

    def add_row(self, row):
        if row.key() in self._index:
            raise KeyError(f"Duplicated row {row.key()}")
        self._index[row.key()] = len(self.rows)
        self.rows.append(row)

    def add(self, sweep, metric, samples):
        """Aggregates samples into mean, standard error and count. NaN
        samples are ignored, the standard error of fewer than two samples
        is NaN."""
        samples = np.asarray(samples, dtype=float).ravel()
        samples = samples[~np.isnan(samples)]
        count = samples.size
        mean = np.mean(samples) if count else math.nan
        stderr = np.std(samples, ddof=1) / math.sqrt(count) \
            if count > 1 else math.nan
        self.add_row(MetricRow(sweep, metric, mean, stderr, count))

    def get(self, sweep, metric):
        return self.rows[self._index[(float(sweep), metric)]]

    def metrics(self):
        return list(dict.fromkeys(row.metric for row in self.rows))

    def series(self, metric):
        """(sweep values, means) of one metric."""
        rows = [row for row in self.rows if row.metric == metric]
        return np.array([row.sweep for row in rows]), \
            np.array([row.mean for row in rows])

    def __len__(self):
        return len(self.rows)

    def __eq__(self, other):
        return isinstance(other, MetricsTable) and self.rows == other.rows


def _same(a, b):
    if isinstance(a, float) and isinstance(b, float):
        return a == b or (math.isnan(a) and math.isnan(b))
    return a == b
