import argparse
import logging

from xlmimo.config.xlmimo_config import FORMATS


class XLMIMOParser(argparse.ArgumentParser):

    def __init__(self, description, argv=None):
        super().__init__(description=description)

        self.add_argument("command",
                          metavar="<command>",
                          choices=['run', 'list-presets', 'validate'],
                          help="'run', 'list-presets' or 'validate'")
        self.add_argument('--config', required=False, action='append',
                          default=[], metavar="/path/to/scenario.yml",
                          help='Scenario file, may be repeated and is merged '
                               'in order over the preset')
        self.add_argument('--preset', required=False,
                          metavar="NAME",
                          help='Bundled scenario, see list-presets')
        self.add_argument('--trials', required=False, type=int,
                          help='Monte Carlo trials per UE drop')
        self.add_argument('--seed', required=False, type=int,
                          help='Root seed of the random streams')
        self.add_argument('--output', required=False,
                          metavar="/path/to/metrics.csv",
                          help='Output file (default: standard output)')
        self.add_argument('--format', required=False, choices=FORMATS,
                          help="'csv' or 'json'")
        self.add_argument('--threads', required=False, type=int,
                          help='Worker threads of the Monte Carlo trials')
        self.add_argument('--verbose', required=False, action='store_true',
                          help='Debug logs and trial progress bars')
        self.args = self.parse_args(argv)  # pylint: disable=C0103

        self.display()

    def display(self):
        logging.info(f"Command: {self.args.command}")
        logging.info(f"Preset: {self.args.preset}")
        logging.info(f"Config: {self.args.config}")
        logging.info(f"Output: {self.args.output}")
