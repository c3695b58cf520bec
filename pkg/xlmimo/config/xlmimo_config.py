"""Handles ScenarioConfig in configurations that are specific
to the XL-MIMO simulator."""
import math
import os

from scipy.constants import speed_of_light

from tools.config import ScenarioConfig
from xlmimo.utils.exceptions import ConfigError


PRESETS_DIR = os.path.join(os.path.dirname(__file__), 'presets')

# sweep axis -> configuration attribute it overrides
SWEEP_AXES = {
    'M': 'GEOMETRY.M',
    'U': 'GEOMETRY.K',
    'L_K': 'SELECTION.L_K',
    'TAU_C': 'PILOTS.TAU_C',
}

CORRELATIONS = ('uncorrelated', 'local_scattering')
LOS_MODES = ('visibility', 'always', 'probabilistic', 'never')
ASSIGNMENTS = ('random', 'orthogonal', 'nmse')
MODES = ('centralized', 'distributed')
SELECTIONS = ('random', 'lsf', 'sinr')
WEIGHTINGS = ('optimal', 'lsf', 'equal')
ALGORITHMS = ('nmse', 'max_min_ana', 'max_min_num', 'random', 'book')
KINDS = ('link', 'allocation', 'exhaustive')
FORMATS = ('csv', 'json')


def init_config(config_fns, cmd_args=None, overrides=None):
    """Loads configurations from YAML files, then create utilitaire
    configurations. Freeze config and display it.

    Args:
        config_fns: YAML files merged in order over base_config.yml.
        cmd_args: parsed command line, its trials, seed, output, format
            and threads override the files when given.
        overrides: nested dictionary merged after the files.

    Returns:
        Frozen ScenarioConfig.
    """
    config = ScenarioConfig.load_default()
    for filename in config_fns:
        config.merge(filename)
    if overrides:
        config.merge_dict(overrides)

    if cmd_args is not None:
        if getattr(cmd_args, 'trials', None) is not None:
            config.EXPERIMENT.TRIALS = cmd_args.trials
        if getattr(cmd_args, 'seed', None) is not None:
            config.SEED = cmd_args.seed
        if getattr(cmd_args, 'threads', None) is not None:
            config.EXPERIMENT.THREADS = cmd_args.threads
        if getattr(cmd_args, 'output', None) is not None:
            config.OUTPUT.PATH = cmd_args.output
        if getattr(cmd_args, 'format', None) is not None:
            config.OUTPUT.FORMAT = cmd_args.format
        if getattr(cmd_args, 'verbose', False):
            config.EXPERIMENT.VERBOSE = True

    config.GEOMETRY.WAVELENGTH = \
        speed_of_light / float(config.GEOMETRY.CARRIER_FREQUENCY)
    config.POWER.UE_W = dbm_to_watts(config.POWER.UE_DBM)
    config.POWER.NOISE_W = dbm_to_watts(config.POWER.NOISE_DBM)

    check_config(config)
    config.freeze()
    config.display()
    return config


def check_config(config):
    """All configuration checks must be placed here."""
    geometry = config.GEOMETRY
    for name in ('L', 'M', 'K'):
        value = getattr(geometry, name)
        if not isinstance(value, int) or value < 1:
            raise ConfigError(f"GEOMETRY.{name} must be a positive integer, "
                              f"got {value}")
    if math.isqrt(geometry.M) ** 2 != geometry.M:
        raise ConfigError(f"GEOMETRY.M must be a perfect square, "
                          f"got {geometry.M}")
    if len(geometry.AREA) != 2 or min(geometry.AREA) <= 0:
        raise ConfigError(f"GEOMETRY.AREA must hold two positive sizes, "
                          f"got {geometry.AREA}")
    for name in ('SUBARRAY_SPACING', 'CARRIER_FREQUENCY'):
        if getattr(geometry, name) <= 0:
            raise ConfigError(f"GEOMETRY.{name} must be positive")

    _check_choice('CHANNEL.CORRELATION', config.CHANNEL.CORRELATION,
                  CORRELATIONS)
    _check_choice('CHANNEL.LOS', config.CHANNEL.LOS, LOS_MODES)
    _check_choice('PILOTS.ASSIGNMENT', config.PILOTS.ASSIGNMENT, ASSIGNMENTS)
    _check_choices('OPERATION.MODES', config.OPERATION.MODES, MODES)
    _check_choices('SELECTION.STRATEGIES', config.SELECTION.STRATEGIES,
                   SELECTIONS)
    _check_choices('WEIGHTING.STRATEGIES', config.WEIGHTING.STRATEGIES,
                   WEIGHTINGS)
    _check_choices('ALLOCATION.ALGORITHMS', config.ALLOCATION.ALGORITHMS,
                   ALGORITHMS, allow_empty=True)
    _check_choice('ALLOCATION.EXHAUSTIVE_METRIC',
                  config.ALLOCATION.EXHAUSTIVE_METRIC,
                  ('numerical', 'deterministic'))
    _check_choice('EXPERIMENT.KIND', config.EXPERIMENT.KIND, KINDS)
    _check_choice('OUTPUT.FORMAT', config.OUTPUT.FORMAT, FORMATS)

    if not 1 <= config.SELECTION.L_K <= geometry.L:
        raise ConfigError(f"SELECTION.L_K must lie in [1, {geometry.L}], "
                          f"got {config.SELECTION.L_K}")
    if config.ALLOCATION.GAMMA_TH <= 0:
        raise ConfigError('ALLOCATION.GAMMA_TH must be positive')
    if config.ALLOCATION.ETA_TH < 0:
        raise ConfigError('ALLOCATION.ETA_TH must be nonnegative')
    if config.ALLOCATION.NUMERICAL_TRIALS < 1:
        raise ConfigError('ALLOCATION.NUMERICAL_TRIALS must be at least 1')

    experiment = config.EXPERIMENT
    if experiment.TRIALS < 1:
        raise ConfigError(f"EXPERIMENT.TRIALS must be at least 1, "
                          f"got {experiment.TRIALS}")
    if experiment.DROPS < 1:
        raise ConfigError(f"EXPERIMENT.DROPS must be at least 1, "
                          f"got {experiment.DROPS}")
    if experiment.THREADS < 1:
        raise ConfigError('EXPERIMENT.THREADS must be at least 1')
    _check_choice('EXPERIMENT.SWEEP.AXIS', experiment.SWEEP.AXIS,
                  tuple(SWEEP_AXES))
    if not experiment.SWEEP.VALUES:
        raise ConfigError('EXPERIMENT.SWEEP.VALUES must not be empty')
    if experiment.KIND == 'allocation' and experiment.SWEEP.AXIS != 'U':
        raise ConfigError('Allocation experiments sweep the number of '
                          'scheduled UEs, set EXPERIMENT.SWEEP.AXIS to U')

    if config.SEED is None or config.SEED < 0:
        raise ConfigError('SEED must be a nonnegative integer')

    pilots = config.PILOTS
    if pilots.TAU_P_PER_UE is None and pilots.TAU_C_PER_UE is None and \
            pilots.TAU_P > pilots.TAU_C:
        raise ConfigError(f"PILOTS.TAU_P ({pilots.TAU_P}) exceeds "
                          f"PILOTS.TAU_C ({pilots.TAU_C})")
    if pilots.TAU_P_PER_UE is None and pilots.TAU_P < 1:
        raise ConfigError('PILOTS.TAU_P must be at least 1')


def pilot_lengths(config, U):  # pylint: disable=C0103
    """Pilot and coherence block lengths for U UEs."""
    pilots = config.PILOTS
    tau_p = pilots.TAU_P if pilots.TAU_P_PER_UE is None else \
        max(1, int(math.floor(pilots.TAU_P_PER_UE * U)))
    tau_c = pilots.TAU_C if pilots.TAU_C_PER_UE is None else \
        max(1, int(math.floor(pilots.TAU_C_PER_UE * U)))
    return tau_p, tau_c


def dbm_to_watts(dbm):
    return 10 ** ((dbm - 30) / 10)


def list_presets():
    """Names of the bundled preset scenarios."""
    return sorted(os.path.splitext(fn)[0] for fn in os.listdir(PRESETS_DIR)
                  if fn.endswith('.yml'))


def preset_path(name):
    if name not in list_presets():
        raise ConfigError(f"Unknown preset {name}, choose one of "
                          f"{', '.join(list_presets())}")
    return os.path.join(PRESETS_DIR, name + '.yml')


def _check_choice(name, value, choices):
    if value not in choices:
        raise ConfigError(f"{name} must be one of {', '.join(choices)}, "
                          f"got {value}")


def _check_choices(name, values, choices, allow_empty=False):
    if not isinstance(values, list) or (not values and not allow_empty):
        raise ConfigError(f"{name} must be a list of {', '.join(choices)}")
    for value in values:
        _check_choice(name, value, choices)
