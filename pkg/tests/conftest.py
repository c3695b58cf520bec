"""
Fixtures of the test suites.

Set HYPOTHESIS_PROFILE=ci for the longer property runs and pass -m "not slow"
to skip the Monte Carlo oracles.
"""
import logging
import os
import sys

import pytest
from hypothesis import settings

from tests.scenarios import small_config
from xlmimo.models.system_model import build_geometry, \
    compute_channel_statistics


logging.basicConfig(stream=sys.stderr, level=logging.INFO)

settings.register_profile('fast', max_examples=25, deadline=None)
settings.register_profile('ci', max_examples=200, deadline=None)
settings.load_profile(os.environ.get('HYPOTHESIS_PROFILE', 'fast'))


def pytest_configure(config):
    config.addinivalue_line('markers',
                            'slow: Monte Carlo oracles running for minutes')


@pytest.fixture(name='config')
def fixture_config():
    return small_config()


@pytest.fixture(name='stats')
def fixture_stats(config):
    return compute_channel_statistics(build_geometry(config), config)
