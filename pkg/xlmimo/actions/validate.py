"""Checks a scenario without simulating it."""
import logging
import math

from xlmimo.config.xlmimo_config import SWEEP_AXES, pilot_lengths
from xlmimo.utils.exceptions import ConfigError


def validate(config):
    """Static checks that need the merged configuration, beyond the ones of
    check_config: every sweep value must produce a consistent scenario.

    Args:
        config: frozen ScenarioConfig.

    Returns:
        list of human readable lines describing the scenario.
    """
    experiment = config.EXPERIMENT
    axis = experiment.SWEEP.AXIS
    lines = [f"name: {config.NAME}",
             f"kind: {experiment.KIND}",
             f"sweep: {axis} = {list(experiment.SWEEP.VALUES)}",
             f"trials: {experiment.TRIALS} x {experiment.DROPS} drops"]
    for value in experiment.SWEEP.VALUES:
        if experiment.KIND == 'allocation':
            if not 1 <= value <= config.GEOMETRY.K:
                raise ConfigError(f"U = {value} outside [1, "
                                  f"{config.GEOMETRY.K}]")
            continue
        swept = config.with_value(SWEEP_AXES[axis], value)
        if math.isqrt(swept.GEOMETRY.M) ** 2 != swept.GEOMETRY.M:
            raise ConfigError(f"{axis} = {value}: M = {swept.GEOMETRY.M} is "
                              f"not a perfect square")
        if not 1 <= swept.SELECTION.L_K <= swept.GEOMETRY.L:
            raise ConfigError(f"{axis} = {value}: L_K = "
                              f"{swept.SELECTION.L_K} outside [1, "
                              f"{swept.GEOMETRY.L}]")
        tau_p, tau_c = pilot_lengths(swept, swept.GEOMETRY.K)
        if experiment.KIND == 'link' and tau_p > tau_c:
            raise ConfigError(f"{axis} = {value}: tau_p = {tau_p} exceeds "
                              f"tau_c = {tau_c}")
        lines.append(f"{axis} = {value}: tau_p = {tau_p}, tau_c = {tau_c}")
    for line in lines:
        logging.info(line)
    return lines
