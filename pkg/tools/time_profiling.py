"""
This module is used for profiling wall-clock times.

Licensed under The MIT License
Written by Jean Da Rolt
"""
import functools
import logging
import os
from timeit import default_timer as timer


def profilable(func):
    """To be used as a decorator in functions that should be
    time-profiled. Active only when the TIME_PROF environment variable is
    set when the module is imported.
    """
    if 'TIME_PROF' not in os.environ:
        return func

    @functools.wraps(func)
    def wrapper(*args, **kwargs):  # pylint: disable=C0111
        start_time = timer()
        ret = func(*args, **kwargs)
        end_time = timer()
        logging.info(f"{func.__name__}: Timeit: {end_time-start_time:.4f}s")
        return ret
    return wrapper
