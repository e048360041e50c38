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

"""
wci - Water correlation threshold
=================================

Flags pixels whose spectrum correlates with the water reference less
than the water correlation threshold as debris.

Default Configuration
~~~~~~~~~~~~~~~~~~~~~

The wci detector default configuration:
  .. literalinclude:: ../../../debris_indices/detectors/wci.yaml
     :language: yaml
"""

from debris_indices.plugin import SingleIndexDetector


class WciDetector(SingleIndexDetector):

    INDEX = 'wci'
    INDICES = ('wci',)


def setup():
    return WciDetector
