# *****************************************************************************
# *
# * Authors:     The scipion-bayesrisk contributors
# *
# * This program is free software; you can redistribute it and/or modify
# * it under the terms of the GNU General Public License as published by
# * the Free Software Foundation; either version 3 of the License, or
# * (at your option) any later version.
# *
# * This program is distributed in the hope that it will be useful,
# * but WITHOUT ANY WARRANTY; without even the implied warranty of
# * MERCHANTABILITY or FITNESS FOR A PARTICULAR PURPOSE.  See the
# * GNU General Public License for more details.
# *
# * You should have received a copy of the GNU General Public License
# * along with this program; if not, write to the Free Software
# * Foundation, Inc., 59 Temple Place, Suite 330, Boston, MA
# * 02111-1307  USA
# *
# *****************************************************************************
"""
Exception hierarchy of the plugin. Every error carries the exit code the
command line reports for it: 1 usage, 2 data, 3 numerical.
"""

from .constants import EXIT_USAGE, EXIT_DATA, EXIT_NUMERIC


class BayesRiskError(Exception):
    exitCode = EXIT_DATA


# ----------------- Usage errors ----------------------------------------------

class UsageError(BayesRiskError):
    exitCode = EXIT_USAGE


class UnknownConfigKey(UsageError):
    def __init__(self, key, validKeys):
        self.key = key
        self.validKeys = sorted(validKeys)
        UsageError.__init__(self, "Unknown configuration key '%s'. Valid keys "
                                  "are: %s" % (key, ", ".join(self.validKeys)))


class InvalidParameter(UsageError, ValueError):
    pass


# ----------------- Data errors -----------------------------------------------

class DataError(BayesRiskError, ValueError):
    exitCode = EXIT_DATA


class MalformedRow(DataError):
    def __init__(self, path, lineNumber, reason):
        self.path = path
        self.lineNumber = lineNumber
        DataError.__init__(self, "%s, line %d: %s" % (path, lineNumber, reason))


class NonMonotoneDates(DataError):
    pass


class EmptyFile(DataError):
    pass


class TooShort(DataError):
    pass


class AllZeroWindow(DataError):
    pass


class Unsorted(DataError):
    pass


class EmptyPartition(DataError):
    pass


class SingleClass(DataError):
    pass


class Empty(DataError):
    pass


class LengthMismatch(DataError):
    pass


class DimensionMismatch(DataError):
    pass


class InconsistentCounts(DataError):
    pass


class SpanNotCovered(DataError):
    pass


class NonFiniteObservation(DataError):
    pass


class MalformedLine(DataError):
    pass


class LeakageDetected(DataError):
    pass


class IoFailure(DataError):
    pass


# ----------------- Numerical errors ------------------------------------------

class NumericalError(BayesRiskError, ArithmeticError):
    exitCode = EXIT_NUMERIC


class ConstraintViolated(NumericalError):
    pass


class NonFiniteLikelihood(NumericalError):
    pass


class OptimizationFailed(NumericalError):
    pass


class DegenerateVariance(NumericalError):
    pass


class ChainDiverged(NumericalError):
    pass


class Diverged(NumericalError):
    pass


class NotPositiveDefinite(NumericalError):
    pass


class WeightCollapse(NumericalError):
    pass


class VersionUpdateFailed(NumericalError):
    pass
