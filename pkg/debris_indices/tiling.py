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

"""Row window parallelism

Per-pixel work is split into horizontal windows processed by a joblib
thread pool. Windows are reassembled in row order, so the output does
not depend on the number of workers.
"""

import os

from joblib import Parallel, delayed

from ._exceptions import ConfigError, ConfigErrorReason


THREADS_ENV = 'DEBRIS_THREADS'

DEFAULT_TILE_ROWS = 64


# thread_count()
#
# Args:
#    requested (int): An explicit worker count, or None to read
#                     the DEBRIS_THREADS environment variable
#
# Returns:
#    (int): The number of workers, at least 1
#
def thread_count(requested=None):
    source = 'threads'
    if requested is None:
        requested = os.environ.get(THREADS_ENV, '1')
        source = THREADS_ENV

    try:
        count = int(requested)
    except (TypeError, ValueError) as e:
        raise ConfigError("{}: Expected a positive integer, got '{}'".format(source, requested),
                          reason=ConfigErrorReason.INVALID_VALUE) from e
    if count < 1:
        raise ConfigError("{}: Expected a positive integer, got {}".format(source, count),
                          reason=ConfigErrorReason.INVALID_VALUE)
    return count


# row_windows()
#
# Args:
#    height (int): Number of rows
#    tile_rows (int): Rows per window
#
# Returns:
#    (list): (start, end) row ranges covering [0, height)
#
def row_windows(height, tile_rows=DEFAULT_TILE_ROWS):
    if tile_rows < 1:
        raise ConfigError("Tile rows must be positive, got {}".format(tile_rows),
                          reason=ConfigErrorReason.INVALID_VALUE)
    return [(start, min(start + tile_rows, height)) for start in range(0, height, tile_rows)]


# map_windows()
#
# Apply a function to row windows of a stack
#
# Args:
#    func (callable): Called with each window BandStack
#    stack (BandStack): A harmonized stack
#    threads (int): Worker count, see thread_count()
#    tile_rows (int): Rows per window
#
# Returns:
#    (list): The results, in row order
#
def map_windows(func, stack, threads=None, tile_rows=DEFAULT_TILE_ROWS):
    threads = thread_count(threads)
    windows = row_windows(stack.height, tile_rows)

    if threads == 1 or len(windows) == 1:
        return [func(stack.window(start, end)) for start, end in windows]

    return Parallel(n_jobs=min(threads, len(windows)), prefer='threads')(
        delayed(func)(stack.window(start, end)) for start, end in windows
    )
