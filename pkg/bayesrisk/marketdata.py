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
This module contains the market and transaction data ingestion: price files,
log returns, realized volatility, monthly refit calendars and chronological
partitions.
"""
import csv
import logging
import math
import os
from dataclasses import dataclass

import numpy as np
import pandas as pd
from numpy.lib.stride_tricks import sliding_window_view

from .constants import RV_WINDOW, TRADING_DAYS, SPLIT_FRACTIONS
from .errors import (MalformedRow, NonMonotoneDates, EmptyFile, TooShort,
                     AllZeroWindow, Unsorted, EmptyPartition, IoFailure,
                     InvalidParameter)

logger = logging.getLogger(__name__)

FEATURE_COLUMNS = ['V%d' % i for i in range(1, 29)]
TRANSACTION_COLUMNS = ['Time'] + FEATURE_COLUMNS + ['Amount', 'Class']


def toDate(value):
    """ Day resolution numpy date from an ISO string, date or datetime64. """
    return np.datetime64(value, 'D')


def _window(dates, start, end):
    mask = np.ones(len(dates), dtype=bool)
    if start is not None:
        mask &= dates >= toDate(start)
    if end is not None:
        mask &= dates <= toDate(end)
    return mask


# ----------------- Series types ----------------------------------------------

@dataclass(frozen=True)
class PriceSeries:
    dates: np.ndarray
    closes: np.ndarray

    def __len__(self):
        return len(self.dates)

    def window(self, start=None, end=None):
        mask = _window(self.dates, start, end)
        return PriceSeries(self.dates[mask], self.closes[mask])


@dataclass(frozen=True)
class ReturnSeries:
    """ Daily log returns, each aligned to the later date of its pair. """
    dates: np.ndarray
    returns: np.ndarray

    def __len__(self):
        return len(self.dates)

    def window(self, start=None, end=None):
        mask = _window(self.dates, start, end)
        return ReturnSeries(self.dates[mask], self.returns[mask])

    def before(self, date):
        """ Returns strictly before the given date. """
        mask = self.dates < toDate(date)
        return ReturnSeries(self.dates[mask], self.returns[mask])


@dataclass(frozen=True)
class VolSeries:
    """ Annualized realized volatility rv and its natural log y. """
    dates: np.ndarray
    rv: np.ndarray
    y: np.ndarray

    def __len__(self):
        return len(self.dates)

    def window(self, start=None, end=None):
        mask = _window(self.dates, start, end)
        return VolSeries(self.dates[mask], self.rv[mask], self.y[mask])

    def before(self, date):
        mask = self.dates < toDate(date)
        return VolSeries(self.dates[mask], self.rv[mask], self.y[mask])


@dataclass(frozen=True)
class RollingOriginPlan:
    """ Expanding window evaluation calendar.

    :param initialEnd: last in-sample date
    :param refitInterval: calendar months between refits
    :param horizon: forecast steps ahead, only 1 is supported
    """
    initialEnd: np.datetime64
    refitInterval: int = 1
    horizon: int = 1

    def __post_init__(self):
        if self.horizon != 1:
            raise InvalidParameter("Only one step ahead forecasts are "
                                   "supported (horizon=%s)" % self.horizon)
        if self.refitInterval < 1:
            raise InvalidParameter("refitInterval must be >= 1 month")

    def targetDates(self, dates):
        """ Out of sample dates, the ones after initialEnd. """
        dates = np.asarray(dates, dtype='datetime64[D]')
        return dates[dates > toDate(self.initialEnd)]

    def refitDates(self, dates):
        """ First out of sample trading day plus the first trading day of
        every refitInterval-th calendar month after it. A model refit on date
        d only sees data strictly before d. """
        targets = self.targetDates(dates)
        if len(targets) == 0:
            return targets

        months = targets.astype('datetime64[M]')
        isMonthStart = np.ones(len(targets), dtype=bool)
        isMonthStart[1:] = months[1:] != months[:-1]

        firstMonth = months[0]
        monthIndex = (months - firstMonth).astype(int)
        keep = isMonthStart & (monthIndex % self.refitInterval == 0)
        keep[0] = True

        return targets[keep]

    def activeRefit(self, refitDates, target):
        """ Most recent refit date on or before target. """
        idx = np.searchsorted(refitDates, toDate(target), side='right') - 1
        if idx < 0:
            raise InvalidParameter("No refit date on or before %s" % target)
        return refitDates[idx]


@dataclass(frozen=True)
class TransactionSet:
    """ Card transactions in file order. features holds V1..V28. """
    times: np.ndarray
    features: np.ndarray
    amounts: np.ndarray
    labels: np.ndarray

    def __len__(self):
        return len(self.times)

    def __getitem__(self, item):
        if not isinstance(item, slice):
            raise TypeError("TransactionSet only supports slicing")
        return TransactionSet(self.times[item], self.features[item],
                              self.amounts[item], self.labels[item])

    @property
    def prevalence(self):
        return float(self.labels.mean()) if len(self) else float('nan')


# ----------------- Ingestion -------------------------------------------------

def loadPrices(path, dateColumn='date', priceColumn='close'):
    """ This method reads a delimited price file with a header line and
    returns a PriceSeries.

    :param path: price file location
    :param dateColumn: name of the ISO date column (case insensitive)
    :param priceColumn: name of the closing price column (case insensitive),
        e.g. 'Adj Close' to use adjusted closes
    """
    if not os.path.exists(path):
        raise IoFailure("Price file not found: %s" % path)

    if os.path.getsize(path) == 0:
        raise EmptyFile("Price file is empty: %s" % path)

    dates = []
    closes = []

    with open(path, newline='', encoding='utf-8') as f:
        reader = csv.reader(f)
        header = next(reader, None)
        if header is None:
            raise EmptyFile("Price file is empty: %s" % path)

        names = [h.strip().lower() for h in header]
        try:
            dateIdx = names.index(dateColumn.lower())
            closeIdx = names.index(priceColumn.lower())
        except ValueError:
            raise MalformedRow(path, 1, "header must contain '%s' and '%s' "
                                        "columns, found %s"
                               % (dateColumn, priceColumn, header))

        lastDate = None
        for lineNumber, row in enumerate(reader, start=2):
            if not row or all(not cell.strip() for cell in row):
                continue
            if len(row) <= max(dateIdx, closeIdx):
                raise MalformedRow(path, lineNumber, "missing columns")

            try:
                day = toDate(row[dateIdx].strip())
            except ValueError:
                raise MalformedRow(path, lineNumber,
                                   "invalid date '%s'" % row[dateIdx])
            try:
                close = float(row[closeIdx])
            except ValueError:
                raise MalformedRow(path, lineNumber,
                                   "invalid close '%s'" % row[closeIdx])

            if not math.isfinite(close) or close <= 0:
                raise MalformedRow(path, lineNumber,
                                   "close must be positive, got %s" % close)

            if lastDate is not None:
                if day < lastDate:
                    raise NonMonotoneDates("%s, line %d: date %s goes back "
                                           "from %s" % (path, lineNumber,
                                                        day, lastDate))
                if day == lastDate:
                    logger.warning("%s, line %d: duplicated date %s dropped, "
                                   "keeping the first row",
                                   path, lineNumber, day)
                    continue

            dates.append(day)
            closes.append(close)
            lastDate = day

    if not dates:
        raise EmptyFile("Price file has no data rows: %s" % path)

    logger.info("Loaded %d prices from %s (%s to %s)",
                len(dates), path, dates[0], dates[-1])

    return PriceSeries(np.array(dates, dtype='datetime64[D]'),
                       np.array(closes, dtype=float))


def logReturns(prices):
    """ r_t = log(P_t / P_t-1), dated with the later day of each pair. """
    if len(prices) < 2:
        raise TooShort("At least 2 prices are needed for returns, got %d"
                       % len(prices))
    closes = prices.closes
    return ReturnSeries(prices.dates[1:], np.log(closes[1:] / closes[:-1]))


def realizedVolatility(returns, window=RV_WINDOW, annualization=TRADING_DAYS):
    """ This method computes the annualized realized volatility
    rv_t = sqrt(annualization / window * sum of the last window squared
    returns) over trading days only, together with y_t = ln(rv_t).
    The first window-1 returns give no value. """
    r = np.asarray(returns.returns, dtype=float)
    if len(r) < window:
        raise TooShort("Realized volatility needs %d returns, got %d"
                       % (window, len(r)))

    sums = sliding_window_view(r * r, window).sum(axis=1)
    dates = returns.dates[window - 1:]

    zeros = np.flatnonzero(sums == 0.0)
    if len(zeros):
        raise AllZeroWindow("All %d returns are zero in the window ending "
                            "%s, log volatility undefined"
                            % (window, dates[zeros[0]]))

    rv = np.sqrt(annualization / window * sums)
    return VolSeries(dates, rv, np.log(rv))


def chronoSplit(records, fractions=SPLIT_FRACTIONS, times=None):
    """ This method partitions time ordered records into contiguous
    (train, valid, test) blocks without shuffling. Train and valid sizes are
    floor(f * n), test takes the remainder.

    :param records: anything supporting len() and slicing
    :param fractions: three fractions summing to one
    :param times: optional timestamps used to check the ordering
    """
    if len(fractions) != 3 or abs(sum(fractions) - 1.0) > 1e-9:
        raise InvalidParameter("Split fractions must be three values summing "
                               "to 1, got %s" % (fractions,))

    if times is None and isinstance(records, TransactionSet):
        times = records.times
    if times is not None:
        times = np.asarray(times)
        if len(times) > 1 and np.any(times[1:] < times[:-1]):
            first = int(np.flatnonzero(times[1:] < times[:-1])[0]) + 1
            raise Unsorted("Records are not in time order at position %d"
                           % first)

    n = len(records)
    nTrain = int(math.floor(fractions[0] * n + 1e-9))
    nValid = int(math.floor(fractions[1] * n + 1e-9))
    sizes = (nTrain, nValid, n - nTrain - nValid)
    if min(sizes) <= 0:
        raise EmptyPartition("Split of %d records gives sizes %s"
                             % (n, sizes))

    logger.info("Chronological split of %d records: %d / %d / %d",
                n, *sizes)

    return (records[:nTrain], records[nTrain:nTrain + nValid],
            records[nTrain + nValid:])


def loadTransactions(path):
    """ This method reads the card transaction file with columns
    Time, V1..V28, Amount, Class and returns a TransactionSet. """
    if not os.path.exists(path):
        raise IoFailure("Transaction file not found: %s" % path)

    try:
        df = pd.read_csv(path)
    except pd.errors.EmptyDataError:
        raise EmptyFile("Transaction file is empty: %s" % path)

    missing = [c for c in TRANSACTION_COLUMNS if c not in df.columns]
    if missing:
        raise MalformedRow(path, 1, "missing columns %s" % missing)
    if len(df) == 0:
        raise EmptyFile("Transaction file has no data rows: %s" % path)

    df = df[TRANSACTION_COLUMNS]
    try:
        df = df.astype(float)
    except ValueError as e:
        raise MalformedRow(path, 2, "non numeric value (%s)" % e)

    bad = df.isnull().any(axis=1).to_numpy()
    bad |= ~df['Class'].isin([0, 1]).to_numpy()
    bad |= (df['Time'] < 0).to_numpy() | (df['Amount'] < 0).to_numpy()
    if bad.any():
        row = int(np.flatnonzero(bad)[0])
        raise MalformedRow(path, row + 2, "missing value, negative time or "
                                          "amount, or label not in {0, 1}")

    logger.info("Loaded %d transactions from %s, %d positives",
                len(df), path, int(df['Class'].sum()))

    return TransactionSet(df['Time'].to_numpy(),
                          df[FEATURE_COLUMNS].to_numpy(),
                          df['Amount'].to_numpy(),
                          df['Class'].to_numpy().astype(int))
