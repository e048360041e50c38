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

from enum import Enum


# ErrorDomain
#
# The domain of a DebrisError, used by the frontend and the
# test harness to tell failures apart.
#
class ErrorDomain(Enum):
    RASTER = 1
    SPECTRAL = 2
    INDEX = 3
    CLASSIFY = 4
    EVALUATION = 5
    SYNTH = 6
    CONFIG = 7


# The last DebrisError created, for the test harness
_last_exception = None


# get_last_exception()
#
# Returns:
#    (DebrisError): The last DebrisError created, or None
#
# Only the frontend test harness should use this.
#
def get_last_exception():
    global _last_exception

    exception = _last_exception
    _last_exception = None
    return exception


# Process exit codes used by the frontend
EXIT_SUCCESS = 0
EXIT_DATA = 2
EXIT_CONFIG = 3
EXIT_INTERNAL = 4


# DebrisError
#
# Base class for all errors raised by debris_indices.
#
# Args:
#    message (str): The brief error message
#    detail (str): An optional, possibly multi-line detail string
#    reason (str): A machine readable identifier for the failure
#
class DebrisError(Exception):

    domain = None
    exit_code = EXIT_DATA

    def __init__(self, message, *, detail=None, reason=None):
        super().__init__(message)
        self.detail = detail
        self.reason = reason

        global _last_exception
        _last_exception = self

    def __str__(self):
        message = super().__str__()
        if self.detail:
            return "{}\n\n{}".format(message, self.detail)
        return message


# RasterErrorReason
#
# Reasons for RasterError
#
class RasterErrorReason():
    UNSUPPORTED_TIFF_FEATURE = 'unsupported-tiff-feature'
    CORRUPT_FILE = 'corrupt-file'
    DTYPE_MISMATCH = 'dtype-mismatch'
    IO_FAILURE = 'io-failure'
    BAD_MAGIC = 'bad-magic'
    TRUNCATED_PAYLOAD = 'truncated-payload'
    NON_INTEGER_MASK = 'non-integer-mask'
    MISSING_WAVELENGTHS = 'missing-wavelengths'


class RasterError(DebrisError):
    domain = ErrorDomain.RASTER


# SpectralErrorReason
#
# Reasons for SpectralError
#
class SpectralErrorReason():
    OUT_OF_BOUNDS = 'out-of-bounds'
    INVALID_PIXEL = 'invalid-pixel'
    ZERO_VARIANCE = 'zero-variance'
    LENGTH_MISMATCH = 'length-mismatch'
    BAD_FACTOR = 'bad-factor'
    INCONSISTENT_DIMS = 'inconsistent-dims'
    NEGATIVE_REFLECTANCE = 'negative-reflectance'
    BAD_WAVELENGTHS = 'bad-wavelengths'
    UNKNOWN_BAND = 'unknown-band'
    NON_FINITE = 'non-finite'


class SpectralError(DebrisError):
    domain = ErrorDomain.SPECTRAL


# IndexErrorReason
#
# Reasons for IndexComputeError
#
class IndexErrorReason():
    MISSING_BAND = 'missing-band'
    ZERO_VARIANCE_REFERENCE = 'zero-variance-reference'
    TOO_FEW_WATER_PIXELS = 'too-few-water-pixels'
    BAD_REFERENCE = 'bad-reference'


class IndexComputeError(DebrisError):
    domain = ErrorDomain.INDEX


# ClassifyErrorReason
#
# Reasons for ClassifyError
#
class ClassifyErrorReason():
    GRID_MISMATCH = 'grid-mismatch'
    DEGENERATE_HISTOGRAM = 'degenerate-histogram'
    INVALID_LABELS = 'invalid-labels'


class ClassifyError(DebrisError):
    domain = ErrorDomain.CLASSIFY


# EvaluationErrorReason
#
# Reasons for EvaluationError
#
class EvaluationErrorReason():
    UNMAPPED_CODE = 'unmapped-code'
    GRID_MISMATCH = 'grid-mismatch'
    NO_EVALUATED_PIXELS = 'no-evaluated-pixels'
    UNMAPPED_TRUTH = 'unmapped-truth'


class EvaluationError(DebrisError):
    domain = ErrorDomain.EVALUATION


# SynthErrorReason
#
# Reasons for SynthError
#
class SynthErrorReason():
    BAD_ALPHA = 'bad-alpha'
    LENGTH_MISMATCH = 'length-mismatch'
    UNKNOWN_ENDMEMBER = 'unknown-endmember'
    OUT_OF_BOUNDS = 'object-out-of-bounds'
    NEGATIVE_REFLECTANCE = 'negative-reflectance'


class SynthError(DebrisError):
    domain = ErrorDomain.SYNTH


# ConfigErrorReason
#
# Reasons for ConfigError
#
class ConfigErrorReason():
    MISSING_FILE = 'missing-file'
    INVALID_DATA = 'invalid-data'
    INVALID_KEY = 'invalid-key'
    INVALID_VALUE = 'invalid-value'
    UNKNOWN_KIND = 'unknown-kind'
    MISSING_BAND_ORDER = 'missing-band-order'


class ConfigError(DebrisError):
    domain = ErrorDomain.CONFIG

    # Unreadable files are I/O failures
    @property
    def exit_code(self):
        if self.reason == ConfigErrorReason.MISSING_FILE:
            return EXIT_DATA
        return EXIT_CONFIG
