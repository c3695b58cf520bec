"""
Serialization of experiment results.

CSV tables have the header sweep,metric,mean,stderr,trials and numbers in
shortest round-trip form. JSON tables hold the same columns, NaN written as
null and infinities as the strings "inf" and "-inf".

Licensed under The MIT License
Written by Jean Da Rolt
"""
import csv
import json
import logging
import math
import sys

import yaml

from xlmimo.structs.metrics_table import COLUMNS, MetricRow, MetricsTable


def emit(table, fmt='csv', path=None):
    """Writes a MetricsTable to path, or to standard output without one.

    Raises:
        OSError when the file cannot be written.
    """
    if path is None:
        _write(table, fmt, sys.stdout)
        return
    with open(path, 'w', newline='') as output_file:
        _write(table, fmt, output_file)
    logging.info(f"{len(table)} rows written to {path}")


def _write(table, fmt, stream):
    if fmt == 'csv':
        writer = csv.writer(stream, lineterminator='\n')
        writer.writerow(COLUMNS)
        for row in table.rows:
            writer.writerow(row.values())
    elif fmt == 'json':
        rows = [{column: _json_value(value)
                 for column, value in zip(COLUMNS, row.values())}
                for row in table.rows]
        json.dump({'columns': COLUMNS, 'rows': rows}, stream, indent=1,
                  allow_nan=False)
        stream.write('\n')
    else:
        raise ValueError(f"Unknown output format {fmt}")


def read_table(path, fmt=None):
    """Reads a table written by emit. The format defaults to the file
    extension."""
    if fmt is None:
        fmt = 'json' if path.endswith('.json') else 'csv'
    table = MetricsTable()
    with open(path, newline='') as input_file:
        if fmt == 'json':
            records = json.load(input_file)['rows']
        else:
            records = list(csv.DictReader(input_file))
    for record in records:
        table.add_row(MetricRow(_none_to_nan(record['sweep']),
                                record['metric'],
                                _none_to_nan(record['mean']),
                                _none_to_nan(record['stderr']),
                                int(record['trials'])))
    return table


def write_allocation_report(reports, path):
    """Writes allocation reports (scheduled UEs, pilots, weights, trace) as
    YAML."""
    with open(path, 'w') as output_file:
        yaml.safe_dump(reports, output_file, sort_keys=False)
    logging.info(f"{len(reports)} allocation reports written to {path}")


def _json_value(value):
    if not isinstance(value, float) or math.isfinite(value):
        return value
    if math.isnan(value):
        return None
    return str(value)


def _none_to_nan(value):
    return math.nan if value is None else float(value)
