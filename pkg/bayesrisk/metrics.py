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
This module contains the forecast and classification scores: MAE, RMSE,
CRPS, interval coverage, ROC and AUC, precision at a false positive rate cap,
Brier score and rank correlation.
"""
import logging
import math
from dataclasses import dataclass

import numpy as np
from scipy import stats

from .constants import CRPS_SAMPLES, INTERVAL_MASS, FPR_CAP
from .errors import Empty, SingleClass, LengthMismatch, TooShort, InvalidParameter
from .rng import SeededStream

logger = logging.getLogger(__name__)

INV_SQRT_PI = 1.0 / math.sqrt(math.pi)


@dataclass(frozen=True)
class ForecastRecord:
    """ One scored forecast. consumedUntil is the latest data date the
    forecast was allowed to see. """
    date: np.datetime64
    predictive: object
    actual: float
    consumedUntil: np.datetime64 = None
    model: str = ''


@dataclass(frozen=True)
class ScoredCases:
    scores: np.ndarray
    labels: np.ndarray

    def __post_init__(self):
        if len(self.scores) != len(self.labels):
            raise LengthMismatch("%d scores for %d labels"
                                 % (len(self.scores), len(self.labels)))
        if len(self.scores) and (np.min(self.scores) < 0 or
                                 np.max(self.scores) > 1):
            raise InvalidParameter("Scores must lie in [0, 1]")
        if not np.all(np.isin(self.labels, (0, 1))):
            raise InvalidParameter("Labels must be 0 or 1")

    @classmethod
    def of(cls, scores, labels):
        return cls(np.asarray(scores, dtype=float),
                   np.asarray(labels, dtype=int))

    def __len__(self):
        return len(self.scores)

    def requireBothClasses(self):
        positives = int(self.labels.sum())
        if positives == 0 or positives == len(self.labels):
            raise SingleClass("Both classes are needed, got %d positives in "
                              "%d cases" % (positives, len(self.labels)))


# ----------------- Forecast scores -------------------------------------------

def maeRmse(records):
    if len(records) == 0:
        raise Empty("No forecast records to score")
    errors = np.array([r.predictive.mean() - r.actual for r in records])
    return float(np.mean(np.abs(errors))), float(np.sqrt(np.mean(errors ** 2)))


def _energyCrps(samples, y):
    """ E|X - y| - 1/2 E|X - X'| over the empirical law of the samples, the
    pair term computed from the order statistics. """
    x = np.sort(np.asarray(samples, dtype=float))
    n = len(x)
    spread = 2.0 * np.dot(2.0 * np.arange(n) - n + 1.0, x) / (n * n)
    return float(np.mean(np.abs(x - y)) - 0.5 * spread)


def crps(predictive, y, seed=0, nSamples=CRPS_SAMPLES):
    """ Continuous ranked probability score of one predictive at y.

    Gaussians use the closed form. Student-t and mixtures are scored from
    nSamples stratified inverse transform draws of a seeded stream, empirical
    predictives from their stored samples.
    """
    kind = predictive.kind
    if kind == 'gaussian':
        z = (y - predictive.mu) / predictive.sd
        return float(predictive.sd * (z * (2.0 * stats.norm.cdf(z) - 1.0) +
                                      2.0 * stats.norm.pdf(z) - INV_SQRT_PI))
    if kind == 'empirical':
        return _energyCrps(predictive.samples, y)

    stream = seed if isinstance(seed, SeededStream) else SeededStream(seed, 'crps')
    u = (np.arange(nSamples) + stream.uniform(nSamples)) / nSamples
    return _energyCrps(predictive.fromUniforms(u), y)


def intervalCoverage(records, mass=INTERVAL_MASS):
    """ Fraction of actuals inside the central interval of each predictive. """
    if len(records) == 0:
        raise Empty("No forecast records to score")
    inside = 0
    for r in records:
        lo, hi = r.predictive.interval(mass)
        inside += lo <= r.actual <= hi
    return inside / len(records)


def forecastSummary(records, seed=0, mass=INTERVAL_MASS):
    """ MAE, RMSE, mean CRPS and interval coverage of a record list. """
    mae, rmse = maeRmse(records)
    root = SeededStream(seed, 'crps')
    scores = [crps(r.predictive, r.actual, root.derive(str(i)))
              for i, r in enumerate(records)]
    return {'mae': mae, 'rmse': rmse, 'crps': float(np.mean(scores)),
            'coverage94': intervalCoverage(records, mass), 'n': len(records)}


# ----------------- Classification scores -------------------------------------

def _sweep(cases):
    """ Thresholds in decreasing order (every distinct score, then -inf) with
    the true and false positive counts of the rule score > threshold. """
    order = np.argsort(-cases.scores, kind='mergesort')
    s = cases.scores[order]
    lab = cases.labels[order]
    cumTp = np.cumsum(lab)
    cumFp = np.cumsum(1 - lab)
    ends = np.concatenate([np.flatnonzero(np.diff(s) != 0), [len(s) - 1]])

    thresholds = np.concatenate([s[ends], [-np.inf]])
    tp = np.concatenate([[0], cumTp[ends]])
    fp = np.concatenate([[0], cumFp[ends]])
    return thresholds, tp, fp


def rocCurve(cases):
    """ (fpr, tpr, thresholds) over the full threshold sweep. """
    cases.requireBothClasses()
    thresholds, tp, fp = _sweep(cases)
    positives = cases.labels.sum()
    return fp / (len(cases) - positives), tp / positives, thresholds


def rocAuc(cases):
    """ Area under the ROC curve as the rank statistic; tied scores get
    their average rank, which equals the trapezoidal area. """
    cases.requireBothClasses()
    ranks = stats.rankdata(cases.scores)
    nPos = int(cases.labels.sum())
    nNeg = len(cases) - nPos
    return float((ranks[cases.labels == 1].sum() - nPos * (nPos + 1) / 2.0)
                 / (nPos * nNeg))


def precisionAtFpr(cases, fprCap=FPR_CAP):
    """ This method picks the threshold with the highest true positive rate
    among those whose false positive rate on the cases is at most fprCap,
    preferring the largest threshold on ties. Cases are flagged when their
    score is strictly above the threshold.

    :returns: (precision, threshold)
    """
    cases.requireBothClasses()
    thresholds, tp, fp = _sweep(cases)
    nNeg = len(cases) - int(cases.labels.sum())
    feasible = np.flatnonzero(fp / nNeg <= fprCap + 1e-12)
    best = feasible[np.argmax(tp[feasible])]
    flagged = tp[best] + fp[best]
    precision = tp[best] / flagged if flagged else 0.0
    return float(precision), float(thresholds[best])


def confusionAt(cases, threshold):
    """ Recall, false positive rate and precision of score > threshold. """
    flags = cases.scores > threshold
    pos = cases.labels == 1
    tp = int(np.sum(flags & pos))
    fp = int(np.sum(flags & ~pos))
    fn = int(np.sum(~flags & pos))
    tn = int(np.sum(~flags & ~pos))
    return {'tp': tp, 'fp': fp, 'fn': fn, 'tn': tn,
            'recall': tp / (tp + fn) if tp + fn else float('nan'),
            'fpr': fp / (fp + tn) if fp + tn else float('nan'),
            'precision': tp / (tp + fp) if tp + fp else 0.0}


def aucBootstrapInterval(cases, nBoot=1000, conf=0.95, seed=0):
    """ Percentile bootstrap interval of the AUC, resampling positives and
    negatives separately so both classes are always present. """
    cases.requireBothClasses()
    stream = SeededStream(seed, 'auc-bootstrap')
    pos = np.flatnonzero(cases.labels == 1)
    neg = np.flatnonzero(cases.labels == 0)
    aucs = np.empty(nBoot)
    for b in range(nBoot):
        idx = np.concatenate([pos[stream.integers(len(pos), len(pos))],
                              neg[stream.integers(len(neg), len(neg))]])
        aucs[b] = rocAuc(ScoredCases(cases.scores[idx], cases.labels[idx]))
    tail = (1.0 - conf) / 2.0
    lo, hi = np.quantile(aucs, [tail, 1.0 - tail])
    return float(lo), float(hi)


def brier(cases):
    if len(cases) == 0:
        raise Empty("No cases to score")
    return float(np.mean((cases.scores - cases.labels) ** 2))


def rankCorr(a, b):
    """ Spearman rank correlation and its t approximation p-value. """
    a = np.asarray(a, dtype=float)
    b = np.asarray(b, dtype=float)
    if len(a) != len(b):
        raise LengthMismatch("Series lengths differ: %d and %d"
                             % (len(a), len(b)))
    if len(a) < 10:
        raise TooShort("Rank correlation needs 10 or more pairs, got %d"
                       % len(a))
    result = stats.spearmanr(a, b)
    return float(result[0]), float(result[1])
