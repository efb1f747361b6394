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
Synthetic fixtures shared by the tests. Nothing here touches the network:
price and transaction files are generated from seeded streams.
"""
import numpy as np
import pandas as pd

from ..garch import simulateGarch
from ..marketdata import FEATURE_COLUMNS, TransactionSet
from ..rng import SeededStream


def businessDays(start, n):
    return pd.bdate_range(start, periods=n).values.astype('datetime64[D]')


def syntheticReturns(n, seed=0, sd=0.01):
    """ GARCH(1,1) returns with volatility clustering and daily sd around
    the given value. """
    alpha, beta = 0.08, 0.90
    return simulateGarch(n, sd ** 2 * (1.0 - alpha - beta), alpha, beta,
                         seed=seed)


def writePriceFile(path, dates, closes, header=('date', 'close')):
    with open(path, 'w') as f:
        f.write(','.join(header) + '\n')
        for d, c in zip(dates, closes):
            f.write('%s,%.6f\n' % (d, c))
    return path


def writeSyntheticPrices(path, start='2015-01-01', n=400, seed=0):
    """ n business days of closes starting at 100. """
    r = syntheticReturns(n - 1, seed)
    closes = 100.0 * np.exp(np.concatenate([[0.0], np.cumsum(r)]))
    return writePriceFile(path, businessDays(start, n), closes)


def syntheticTransactions(n=2000, prevalence=0.05, seed=0, shift=2.0):
    """ Time ordered transactions; positives have V1..V3 shifted by shift
    and larger amounts. """
    stream = SeededStream(seed, 'transactions')
    labels = (stream.uniform(n) < prevalence).astype(int)
    labels[:2] = [0, 1]
    features = stream.normal((n, len(FEATURE_COLUMNS)))
    features[:, :3] += shift * labels[:, None]
    times = np.cumsum(stream.uniform(n) * 10.0)
    amounts = np.exp(3.0 + stream.normal(n) + labels)
    return TransactionSet(times, features, amounts, labels)


def writeTransactionFile(path, transactions):
    df = pd.DataFrame(transactions.features, columns=FEATURE_COLUMNS)
    df.insert(0, 'Time', transactions.times)
    df['Amount'] = transactions.amounts
    df['Class'] = transactions.labels
    df.to_csv(path, index=False)
    return path
