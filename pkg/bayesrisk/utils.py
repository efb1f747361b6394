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
This module contains the writers used by experiments and protocols:
delimited tables, JSON reports, the audit trail and SVG charts.
"""
import csv
import json
import logging
import math
import os

import numpy as np
import matplotlib
matplotlib.use('Agg')
import matplotlib.pyplot as plt

import pyworkflow.utils as pwutils

from .constants import AUDIT_HEADER
from .errors import IoFailure

logger = logging.getLogger(__name__)

# Fixed ids and no creation date so reruns give identical SVG bytes
matplotlib.rcParams['svg.hashsalt'] = 'bayesrisk'
SVG_METADATA = {'Date': None}


def experimentDir(outRoot, experiment):
    """ out/<experiment>, created if needed. """
    path = os.path.join(outRoot, experiment)
    try:
        pwutils.makePath(path)
    except OSError as e:
        raise IoFailure("Cannot create output directory %s: %s" % (path, e))
    return path


def formatCell(value, precision=6):
    if isinstance(value, (float, np.floating)):
        if math.isnan(value):
            return 'nan'
        return '%.*f' % (precision, value)
    if isinstance(value, (np.integer,)):
        return str(int(value))
    return str(value)


def writeTable(path, header, rows, precision=6):
    """ Comma separated file with a header line. Float cells are written
    with a fixed number of decimals, other cells as text. """
    try:
        with open(path, 'w', newline='') as f:
            writer = csv.writer(f, lineterminator='\n')
            writer.writerow(header)
            for row in rows:
                writer.writerow([formatCell(v, precision) for v in row])
    except OSError as e:
        raise IoFailure("Cannot write %s: %s" % (path, e))
    logger.debug("Wrote %s", path)
    return path


def readTable(path):
    """ (header, rows) of a file written by writeTable, cells as text. """
    try:
        with open(path, newline='') as f:
            rows = list(csv.reader(f))
    except OSError as e:
        raise IoFailure("Cannot read %s: %s" % (path, e))
    return (rows[0], rows[1:]) if rows else ([], [])


def _jsonDefault(obj):
    if isinstance(obj, np.integer):
        return int(obj)
    if isinstance(obj, np.floating):
        return float(obj)
    if isinstance(obj, np.ndarray):
        return obj.tolist()
    if isinstance(obj, np.datetime64):
        return str(obj)
    raise TypeError("Cannot serialize %r" % type(obj))


def jsonSafe(value):
    """ Non finite floats become null, containers are walked. """
    if isinstance(value, dict):
        return {str(k): jsonSafe(v) for k, v in value.items()}
    if isinstance(value, (list, tuple)):
        return [jsonSafe(v) for v in value]
    if isinstance(value, np.ndarray):
        return jsonSafe(value.tolist())
    if isinstance(value, (float, np.floating)):
        return float(value) if math.isfinite(value) else None
    return value


def writeJson(path, payload):
    try:
        with open(path, 'w') as f:
            json.dump(jsonSafe(payload), f, indent=2, sort_keys=True,
                      default=_jsonDefault)
            f.write('\n')
    except OSError as e:
        raise IoFailure("Cannot write %s: %s" % (path, e))
    return path


def readJson(path):
    try:
        with open(path) as f:
            return json.load(f)
    except OSError as e:
        raise IoFailure("Cannot read %s: %s" % (path, e))


class AuditLog:
    """ Rows target_date,max_consumed_date,model,refit_date,status kept in
    memory and written once. No wall clock values are recorded. """

    def __init__(self):
        self.rows = []

    def record(self, target, consumed, model, refit, status='ok'):
        self.rows.append([str(target), str(consumed), model, str(refit), status])

    def __len__(self):
        return len(self.rows)

    def write(self, path):
        return writeTable(path, AUDIT_HEADER, self.rows)


# ----------------- Charts ----------------------------------------------------

def _saveFigure(fig, path):
    try:
        fig.savefig(path, format='svg', metadata=SVG_METADATA)
    except OSError as e:
        raise IoFailure("Cannot write %s: %s" % (path, e))
    finally:
        plt.close(fig)
    return path


def _dates(dates):
    return np.asarray(dates, dtype='datetime64[D]').astype('O')


def plotForecastBand(path, dates, mean, lo, hi, actual, title=''):
    """ One band (the central interval) and two lines (forecast mean and
    actual). """
    fig, ax = plt.subplots(figsize=(10, 4))
    x = _dates(dates)
    if len(x):
        ax.fill_between(x, lo, hi, color='tab:blue', alpha=0.25,
                        label='94% interval')
        ax.plot(x, mean, color='tab:blue', linewidth=0.8, label='forecast')
        ax.plot(x, actual, color='black', linewidth=0.6, label='actual')
        ax.legend(loc='upper right')
    ax.set_title(title)
    ax.set_ylabel('log realized volatility')
    return _saveFigure(fig, path)


def plotVarExceedances(path, dates, returns, varSeries):
    """ Returns, one VaR line per model and the exceedance markers. """
    fig, ax = plt.subplots(figsize=(10, 4))
    x = _dates(dates)
    returns = np.asarray(returns)
    ax.plot(x, returns, color='grey', linewidth=0.5, label='return')
    for model, var in varSeries.items():
        var = np.asarray(var)
        ax.plot(x, var, linewidth=0.8, label='VaR %s' % model)
        hits = returns < var
        ax.scatter(x[hits], returns[hits], s=6)
    if len(x):
        ax.legend(loc='lower left')
    ax.set_ylabel('log return')
    return _saveFigure(fig, path)


def plotRoc(path, curves):
    """ curves maps a model name to (fpr, tpr). """
    fig, ax = plt.subplots(figsize=(5, 5))
    ax.plot([0, 1], [0, 1], color='grey', linestyle='--', linewidth=0.6)
    for model, (fpr, tpr) in curves.items():
        ax.plot(fpr, tpr, linewidth=1.0, label=model)
    if curves:
        ax.legend(loc='lower right')
    ax.set_xlabel('false positive rate')
    ax.set_ylabel('true positive rate')
    return _saveFigure(fig, path)


def plotTrajectories(path, dates, alphaMeans, betaMeans, alphaBands=None,
                     betaBands=None):
    fig, (axA, axB) = plt.subplots(2, 1, figsize=(10, 6), sharex=True)
    x = _dates(dates)
    for ax, means, bands, name in ((axA, alphaMeans, alphaBands, 'alpha'),
                                   (axB, betaMeans, betaBands, 'beta')):
        if bands is not None and len(x):
            ax.fill_between(x, bands[:, 0], bands[:, 1], alpha=0.25)
        ax.plot(x, means, linewidth=0.8)
        ax.set_ylabel(name)
    return _saveFigure(fig, path)
