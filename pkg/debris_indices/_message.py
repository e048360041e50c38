#
#  Copyright (C) 2026 The debris-indices authors
#
#  This program is free software; you can redistribute it and/or
#  modify it under the terms of the GNU Lesser General Public
#  License as published by the Free Software Foundation; either
#  version 2 of the License, or (at your option) any later version.
#
#  This library is distributed in the hope that it will be useful,
#  but WITHOUT ANY WARRANTY; without even the implied warranty of
#  MERCHANTABILITY or FITNESS FOR A PARTICULAR PURPOSE.  See the GNU
#  Lesser General Public License for more details.
#
#  You should have received a copy of the GNU Lesser General Public
#  License along with this library. If not, see <http://www.gnu.org/licenses/>.

import logging
import time
from contextlib import contextmanager


LOGGER_NAME = 'debris_indices'


# get_logger()
#
# Args:
#    name (str): An optional child logger name
#
# Returns:
#    (logging.Logger): A logger in the debris_indices hierarchy
#
def get_logger(name=None):
    if name is None:
        return logging.getLogger(LOGGER_NAME)
    return logging.getLogger('{}.{}'.format(LOGGER_NAME, name))


# timed_activity()
#
# Context manager for logging the start, the outcome and the
# duration of an activity.
#
# Args:
#    activity_name (str): The name of the activity
#    detail (str): An optional detail logged with the start message
#    logger (logging.Logger): The logger to use, defaults to the package logger
#    silent_nested (bool): Log the start and success at debug level only
#
@contextmanager
def timed_activity(activity_name, *, detail=None, logger=None, silent_nested=False):
    if logger is None:
        logger = get_logger()

    level = logging.DEBUG if silent_nested else logging.INFO
    if detail:
        logger.log(level, "START %s\n%s", activity_name, detail)
    else:
        logger.log(level, "START %s", activity_name)

    start = time.perf_counter()
    try:
        yield
    except Exception:
        elapsed = time.perf_counter() - start
        logger.error("FAILURE %s [%.3fs]", activity_name, elapsed)
        raise

    elapsed = time.perf_counter() - start
    logger.log(level, "SUCCESS %s [%.3fs]", activity_name, elapsed)
