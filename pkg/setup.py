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

import sys

try:
    from setuptools import setup, find_packages
except ImportError:
    print("debris-indices requires setuptools in order to locate detector plugins. Install "
          "it using your package manager (usually python3-setuptools) or via "
          "pip (pip3 install setuptools).")
    sys.exit(1)

setup(name='debris-indices',
      version="0.1.0",
      description="Floating marine debris detection in Sentinel-2 band stacks with spectral indices.",
      license='LGPL',
      python_requires='>=3.8',
      packages=find_packages(exclude=['tests', 'tests.*']),
      include_package_data=True,
      install_requires=[
          'click >= 7.0',
          'joblib',
          'numpy >= 1.17',
          'Pillow',
          'pytoml',
          'ruamel.yaml',
          'scipy >= 1.6',
          'setuptools',
          'tifffile >= 2020.9.30'
      ],
      package_data={
          'debris_indices': [
              'data/*.yaml',
              'detectors/*.yaml'
          ]
      },
      entry_points={
          'console_scripts': [
              'debris = debris_indices._frontend:cli'
          ],
          'debris_indices.detectors': [
              'ndvi = debris_indices.detectors.ndvi',
              'fdi = debris_indices.detectors.fdi',
              'wci = debris_indices.detectors.wci',
              'combined = debris_indices.detectors.combined'
          ]
      },
      tests_require=['pytest-datafiles',
                     'pytest-env',
                     'pytest-cov',
                     # Provide option to run tests in parallel, less reliable
                     'pytest-xdist',
                     'pytest >= 3.1.0'],
      zip_safe=False
)  #eof setup()
