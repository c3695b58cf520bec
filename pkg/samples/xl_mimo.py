"""
XL-MIMO uplink
Command line launcher of the simulator.

Licensed under The MIT License
Written by Jean Da Rolt

------------------------------------------------------------

Usage:
    # List the bundled scenarios
    python samples/xl_mimo.py list-presets

    # Check a scenario without simulating it
    python samples/xl_mimo.py validate --config=my_scenario.yml

    # Run a preset with fewer trials, CSV written to a file
    python samples/xl_mimo.py run --preset=fig1a --trials=50 --output=fig1a.csv

    # Override a preset with a scenario file, JSON on standard output
    python samples/xl_mimo.py run --preset=fig3-cent --config=mine.yml --format=json

Exit codes: 0 success, 1 configuration error, 2 runtime or I/O error.
"""
import logging
import os
import sys

from xlmimo.actions.emit import emit, write_allocation_report
from xlmimo.actions.run import run_scenario
from xlmimo.actions.validate import validate
from xlmimo.config import xlmimo_config
from xlmimo.utils.exceptions import ConfigError, XLMIMOError
from xlmimo.utils.xlmimo_parser import XLMIMOParser


logging.basicConfig(stream=sys.stderr, level=logging.INFO)

DESCR = 'Monte Carlo simulation of XL-MIMO uplink processing, scheduling ' \
        'and pilot assignment.'
EXIT_OK = 0
EXIT_CONFIG = 1
EXIT_RUNTIME = 2


def main(argv=None):
    try:
        args = XLMIMOParser(DESCR, argv).args
    except SystemExit as err:
        return EXIT_OK if err.code in (0, None) else EXIT_CONFIG

    if args.verbose:
        logging.getLogger().setLevel(logging.DEBUG)
    if 'TIME_PROF' in os.environ:
        logging.info('Using time profiling.')

    try:
        if args.command == 'list-presets':
            for name in xlmimo_config.list_presets():
                print(name)
            return EXIT_OK

        # Configurations
        configs = []
        if args.preset:
            configs.append(xlmimo_config.preset_path(args.preset))
        configs.extend(args.config)
        config = xlmimo_config.init_config(configs, args)

        if args.command == 'validate':
            validate(config)
            logging.info('Scenario is valid.')
            return EXIT_OK

        reports = [] if config.EXPERIMENT.KIND != 'link' else None
        table = run_scenario(config, reports)
        emit(table, config.OUTPUT.FORMAT, config.OUTPUT.PATH)
        if reports and config.OUTPUT.PATH:
            report_fn = os.path.splitext(config.OUTPUT.PATH)[0] + \
                '_allocation.yml'
            write_allocation_report(reports, report_fn)
    except ConfigError as err:
        logging.error(f"Configuration error: {err}")
        return EXIT_CONFIG
    except (XLMIMOError, OSError) as err:
        logging.error(f"{type(err).__name__}: {err}")
        return EXIT_RUNTIME
    return EXIT_OK


if __name__ == '__main__':
    sys.exit(main())
