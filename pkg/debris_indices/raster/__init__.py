"""Raster readers and writers

Band stacks and class masks are read from and written to a declared
subset of GeoTIFF (:mod:`.geotiff`) and to the simple band-sequential BSF
format (:mod:`.bsf`). Masks and index maps go through :mod:`.files`.
"""

from .header import RasterHeader, LabeledScene
