#!/usr/bin/env python3
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

import pytest

from debris_indices.synth import SceneObject, SceneSpec, generate


# A 64x64 water scene with an 8x8 square of plastic
# at full cover, shared by several test modules.
@pytest.fixture(scope='session')
def plastic_scene():
    spec = SceneSpec(64, 64, background='water',
                     objects=[SceneObject('plastic', 1.0, x=28, y=28, width=8, height=8)],
                     noise_sigma=0.005, seed=7, scene_id='plastic')
    return generate(spec)
