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
combined - Hierarchical index rules
===================================

Classifies pixels with all three indices, see
:func:`debris_indices.classifier.classify_combined`. Water is
recognised by its correlation with the water reference first, floating
matter by the FDI, and debris within floating matter by the NDVI.

Default Configuration
~~~~~~~~~~~~~~~~~~~~~

The combined detector default configuration:
  .. literalinclude:: ../../../debris_indices/detectors/combined.yaml
     :language: yaml
"""

from debris_indices.plugin import Detector
from debris_indices.classifier import classify_combined
from debris_indices._config import node_validate, node_get_member


class CombinedDetector(Detector):

    INDICES = ('ndvi', 'fdi', 'wci')

    def configure(self, node):
        node_validate(node, ['detect-wakes'], path=self.kind)
        self.detect_wakes = node_get_member(node, bool, 'detect-wakes', path=self.kind)

    def preflight(self):
        pass

    def get_unique_key(self):
        return {
            'indices': list(self.INDICES),
            'detect-wakes': self.detect_wakes
        }

    def detect(self, indices, thresholds):
        with self.timed_activity("Applying index rules", silent_nested=True):
            return classify_combined(indices.ndvi, indices.fdi, indices.wci, thresholds,
                                     detect_wakes=self.detect_wakes)


def setup():
    return CombinedDetector
