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
Value-at-Risk coverage tests: exceedance series, Kupiec proportion of
failures, Christoffersen first order Markov independence, conditional
coverage and Wilson score intervals.
"""
import logging
import math
from dataclasses import dataclass, asdict

import numpy as np
from scipy.special import erfc, ndtri, xlogy

from .constants import VAR_LEVEL, WILSON_CONF
from .errors import (InvalidParameter, InconsistentCounts, LengthMismatch,
                     TooShort)

logger = logging.getLogger(__name__)


@dataclass(frozen=True)
class ExceedanceSeries:
    dates: np.ndarray
    hits: np.ndarray

    def __len__(self):
        return len(self.hits)

    @property
    def count(self):
        return int(self.hits.sum())


@dataclass(frozen=True)
class VarBacktestReport:
    T: int
    N: int
    p_hat: float
    wilson_lo: float
    wilson_hi: float
    lr_uc: float
    p_uc: float
    lr_ind: float
    p_ind: float
    lr_cc: float
    p_cc: float

    def row(self, model):
        """ model,T,N,p_hat,lr_uc,p_uc,lr_ind,p_ind,lr_cc,p_cc,wilson_lo,
        wilson_hi with statistics and p-values to 3 decimals. """
        return [model, self.T, self.N] + ['%.3f' % v for v in (
            self.p_hat, self.lr_uc, self.p_uc, self.lr_ind, self.p_ind,
            self.lr_cc, self.p_cc, self.wilson_lo, self.wilson_hi)]

    def toDict(self):
        return asdict(self)


def chi2Sf(x, k):
    """ Upper tail probability of a chi-square with k in {1, 2} degrees of
    freedom. """
    if x < 0:
        raise InvalidParameter("chi2Sf needs x >= 0, got %s" % x)
    if k == 1:
        return float(erfc(math.sqrt(x / 2.0)))
    if k == 2:
        return math.exp(-x / 2.0)
    raise InvalidParameter("chi2Sf supports k in {1, 2}, got %s" % k)


def exceedances(dates, returns, var):
    """ hit_t = 1 when r_t < VaR_t. """
    returns = np.asarray(returns, dtype=float)
    var = np.asarray(var, dtype=float)
    if not (len(dates) == len(returns) == len(var)):
        raise LengthMismatch("dates, returns and VaR must be aligned, got "
                             "%d, %d and %d"
                             % (len(dates), len(returns), len(var)))
    return ExceedanceSeries(np.asarray(dates), (returns < var).astype(int))


def kupiec(T, N, level=VAR_LEVEL):
    """ Kupiec proportion of failures likelihood ratio and its chi2(1)
    p-value, with 0 * log(0) = 0. """
    if T <= 0 or not 0 <= N <= T:
        raise InvalidParameter("kupiec needs 0 <= N <= T and T > 0, got "
                               "T=%s N=%s" % (T, N))
    if not 0 < level < 1:
        raise InvalidParameter("level must lie in (0, 1), got %s" % level)

    pHat = N / T
    restricted = xlogy(T - N, 1.0 - level) + xlogy(N, level)
    unrestricted = xlogy(T - N, 1.0 - pHat) + xlogy(N, pHat)
    lr = max(0.0, float(-2.0 * (restricted - unrestricted)))
    return lr, chi2Sf(lr, 1)


def transitionCounts(hits):
    hits = np.asarray(hits, dtype=int)
    prev, curr = hits[:-1], hits[1:]
    n00 = int(np.sum((prev == 0) & (curr == 0)))
    n01 = int(np.sum((prev == 0) & (curr == 1)))
    n10 = int(np.sum((prev == 1) & (curr == 0)))
    n11 = int(np.sum((prev == 1) & (curr == 1)))
    return n00, n01, n10, n11


def christoffersenInd(hits):
    """ Christoffersen independence likelihood ratio against a first order
    Markov alternative, and its chi2(1) p-value. Returns 0 when there are no
    exceedances or no transitions out of an exceedance. """
    hits = np.asarray(hits, dtype=int)
    if len(hits) < 2:
        raise TooShort("Independence test needs 2 or more hits, got %d"
                       % len(hits))

    n00, n01, n10, n11 = transitionCounts(hits)
    if hits.sum() == 0 or n10 + n11 == 0:
        return 0.0, 1.0

    pi01 = n01 / (n00 + n01) if n00 + n01 else 0.0
    pi11 = n11 / (n10 + n11)
    pi = (n01 + n11) / (n00 + n01 + n10 + n11)

    markov = (xlogy(n00, 1.0 - pi01) + xlogy(n01, pi01) +
              xlogy(n10, 1.0 - pi11) + xlogy(n11, pi11))
    restricted = xlogy(n00 + n10, 1.0 - pi) + xlogy(n01 + n11, pi)
    lr = max(0.0, float(-2.0 * (restricted - markov)))
    return lr, chi2Sf(lr, 1)


def wilsonInterval(N, T, conf=WILSON_CONF):
    """ Wilson score interval for the exceedance rate N / T. """
    if T <= 0 or not 0 <= N <= T:
        raise InvalidParameter("wilsonInterval needs 0 <= N <= T and T > 0")
    z = float(ndtri((1.0 + conf) / 2.0))
    pHat = N / T
    denom = 1.0 + z * z / T
    center = (pHat + z * z / (2.0 * T)) / denom
    half = z * math.sqrt(pHat * (1.0 - pHat) / T + z * z / (4.0 * T * T)) / denom
    lo = 0.0 if N == 0 else max(0.0, center - half)
    hi = 1.0 if N == T else min(1.0, center + half)
    return lo, hi


def conditionalCoverage(T, N, hits, level=VAR_LEVEL, conf=WILSON_CONF):
    """ Full report for one model: Kupiec, Christoffersen, their sum with a
    chi2(2) p-value, and the Wilson interval. """
    hits = np.asarray(hits, dtype=int)
    if len(hits) != T or int(hits.sum()) != N:
        raise InconsistentCounts("T=%d and N=%d do not match %d hits summing "
                                 "to %d" % (T, N, len(hits), int(hits.sum())))

    lrUc, pUc = kupiec(T, N, level)
    lrInd, pInd = christoffersenInd(hits)
    lrCc = lrUc + lrInd
    lo, hi = wilsonInterval(N, T, conf)

    return VarBacktestReport(T, N, N / T, lo, hi, lrUc, pUc, lrInd, pInd,
                             lrCc, chi2Sf(lrCc, 2))


def backtest(exceedanceSeries, level=VAR_LEVEL):
    return conditionalCoverage(len(exceedanceSeries), exceedanceSeries.count,
                               exceedanceSeries.hits, level)
