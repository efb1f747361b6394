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
Bayesian logistic regression for fraud scoring.

The posterior is approximated by a Gaussian centred at the MAP (Laplace
approximation). Scores average the sigmoid over draws of that Gaussian, and
a new batch of labelled data is absorbed by refitting with the previous
Gaussian as prior.
"""
import json
import logging
import math
from dataclasses import dataclass, field, replace

import numpy as np
from scipy.linalg import cho_factor, cho_solve, cholesky, solve_triangular, LinAlgError
from scipy.special import expit, log_expit, ndtri

from .constants import (LOGIT_PRIOR_SD, LOGIT_INTERCEPT_SD, FPR_CAP,
                        FIT_SCOPE_TRAIN, INTERVAL_MASS)
from .errors import (SingleClass, Diverged, NotPositiveDefinite,
                     DimensionMismatch, InvalidParameter, LeakageDetected,
                     IoFailure)
from .marketdata import FEATURE_COLUMNS
from .metrics import ScoredCases, precisionAtFpr
from .rng import SeededStream

logger = logging.getLogger(__name__)

FRAUD_FEATURES = ['Time'] + FEATURE_COLUMNS + ['log1p_Amount']
GRAD_TOL = 1e-8
MAX_NEWTON = 100
MAX_HALVINGS = 50
SCORE_CHUNK = 4096


# ----------------- Features and standardization ------------------------------

@dataclass(frozen=True)
class StandardizerParams:
    """ Column means and sds. keep lists the columns that survive (non zero
    variance); fitScope records which partition the values came from. """
    means: np.ndarray
    sds: np.ndarray
    keep: np.ndarray
    featureNames: tuple = ()
    fitScope: str = FIT_SCOPE_TRAIN

    @property
    def nInput(self):
        return len(self.featureNames) if self.featureNames else \
            int(self.keep.max()) + 1

    @property
    def keptNames(self):
        return tuple(self.featureNames[i] for i in self.keep) \
            if self.featureNames else ()

    def transform(self, X):
        X = np.asarray(X, dtype=float)
        if X.shape[-1] != self.nInput:
            raise DimensionMismatch("Standardizer expects %d columns, got %d"
                                    % (self.nInput, X.shape[-1]))
        return (X[..., self.keep] - self.means) / self.sds

    def toDict(self):
        return {'means': self.means.tolist(), 'sds': self.sds.tolist(),
                'keep': self.keep.tolist(),
                'feature_names': list(self.featureNames),
                'fit_scope': self.fitScope}

    @classmethod
    def fromDict(cls, d):
        return cls(np.array(d['means']), np.array(d['sds']),
                   np.array(d['keep'], dtype=int),
                   tuple(d.get('feature_names', ())),
                   d.get('fit_scope', FIT_SCOPE_TRAIN))


def fitStandardizer(X, featureNames=(), fitScope=FIT_SCOPE_TRAIN):
    """ Means and sds of the given (training) matrix. Zero variance columns
    are dropped with a warning. """
    X = np.asarray(X, dtype=float)
    means = X.mean(axis=0)
    sds = X.std(axis=0)
    keep = np.flatnonzero(sds > 0)
    dropped = np.flatnonzero(~(sds > 0))
    for i in dropped:
        name = featureNames[i] if featureNames else str(i)
        logger.warning("Feature %s has zero variance on the %s partition, "
                       "dropped", name, fitScope)
    return StandardizerParams(means[keep], sds[keep], keep,
                              tuple(featureNames), fitScope)


def assertTrainScope(standardizer):
    if standardizer.fitScope != FIT_SCOPE_TRAIN:
        raise LeakageDetected("Standardizer was fit on '%s', scoring requires "
                              "a train only fit" % standardizer.fitScope)


def buildFraudFeatures(transactions):
    """ Time, V1..V28 and log1p(Amount) as a (n, 30) matrix. """
    return np.column_stack([transactions.times, transactions.features,
                            np.log1p(transactions.amounts)])


# ----------------- Posterior -------------------------------------------------

@dataclass
class LogisticPosterior:
    """ Laplace approximation N(mapWeights, precision^-1). Weight 0 is the
    intercept. """
    mapWeights: np.ndarray
    precision: np.ndarray
    priorMean: np.ndarray
    priorPrecision: np.ndarray
    draws: np.ndarray = None
    featureNames: tuple = ()
    standardizer: StandardizerParams = None
    seed: int = 0
    iterations: int = 0
    nObs: int = 0
    extra: dict = field(default_factory=dict)

    @property
    def dim(self):
        return len(self.mapWeights)

    def covariance(self):
        try:
            return cho_solve(cho_factor(self.precision), np.eye(self.dim))
        except LinAlgError:
            raise NotPositiveDefinite("Posterior precision is not positive "
                                      "definite")


def addIntercept(X):
    X = np.atleast_2d(np.asarray(X, dtype=float))
    return np.column_stack([np.ones(len(X)), X])


def logPosterior(w, X1, y, priorMean, priorPrecision):
    eta = X1 @ w
    d = w - priorMean
    return float(np.sum(y * eta + log_expit(-eta)) - 0.5 * d @ priorPrecision @ d)


def gradLogPosterior(w, X1, y, priorMean, priorPrecision):
    return X1.T @ (y - expit(X1 @ w)) - priorPrecision @ (w - priorMean)


def negHessian(w, X1, priorPrecision):
    p = expit(X1 @ w)
    return (X1 * (p * (1.0 - p))[:, None]).T @ X1 + priorPrecision


def _newton(X1, y, priorMean, priorPrecision):
    """ Damped Newton ascent of the log posterior from the prior mean. """
    w = np.array(priorMean, dtype=float)
    current = logPosterior(w, X1, y, priorMean, priorPrecision)

    for it in range(MAX_NEWTON):
        g = gradLogPosterior(w, X1, y, priorMean, priorPrecision)
        if np.linalg.norm(g) <= GRAD_TOL:
            return w, it
        H = negHessian(w, X1, priorPrecision)
        try:
            step = cho_solve(cho_factor(H), g)
        except LinAlgError:
            raise NotPositiveDefinite("Negative Hessian lost positive "
                                      "definiteness at iteration %d" % it)

        t = 1.0
        for _ in range(MAX_HALVINGS):
            candidate = w + t * step
            value = logPosterior(candidate, X1, y, priorMean, priorPrecision)
            if value >= current - 1e-12 * (1.0 + abs(current)):
                break
            t *= 0.5
        else:
            raise Diverged("Line search failed %d times at iteration %d"
                           % (MAX_HALVINGS, it))

        if np.max(np.abs(candidate - w)) < 1e-15 * (1.0 + np.max(np.abs(w))):
            return candidate, it + 1
        w, current = candidate, value

    g = gradLogPosterior(w, X1, y, priorMean, priorPrecision)
    logger.warning("Newton stopped after %d iterations, gradient norm %.2e",
                   MAX_NEWTON, np.linalg.norm(g))
    return w, MAX_NEWTON


def defaultPrior(nFeatures, priorSd=LOGIT_PRIOR_SD,
                 interceptSd=LOGIT_INTERCEPT_SD):
    sds = np.concatenate([[interceptSd], np.full(nFeatures, priorSd)])
    return np.zeros(nFeatures + 1), np.diag(1.0 / sds ** 2)


def fitMap(X, y, priorSd=LOGIT_PRIOR_SD, interceptSd=LOGIT_INTERCEPT_SD,
           featureNames=(), standardizer=None):
    """ This method finds the MAP of a logistic regression with independent
    Gaussian priors (sd priorSd on standardized coefficients, interceptSd on
    the intercept) and stores the negative Hessian there as precision.

    :param X: standardized (n, d) matrix without intercept column
    :param y: 0/1 labels
    """
    X = np.atleast_2d(np.asarray(X, dtype=float))
    y = np.asarray(y, dtype=float)
    if len(X) != len(y):
        raise DimensionMismatch("%d rows for %d labels" % (len(X), len(y)))
    positives = int(y.sum())
    if positives == 0 or positives == len(y):
        raise SingleClass("fitMap needs both classes, got %d positives in %d"
                          % (positives, len(y)))

    priorMean, priorPrecision = defaultPrior(X.shape[1], priorSd, interceptSd)
    return _fitWithPrior(addIntercept(X), y, priorMean, priorPrecision,
                         featureNames, standardizer)


def _fitWithPrior(X1, y, priorMean, priorPrecision, featureNames=(),
                  standardizer=None, nPrevious=0):
    w, iterations = _newton(X1, y, priorMean, priorPrecision)
    precision = negHessian(w, X1, priorPrecision)
    logger.debug("MAP after %d Newton iterations, |w| = %.4f",
                 iterations, np.linalg.norm(w))
    return LogisticPosterior(w, precision, np.array(priorMean),
                             np.array(priorPrecision),
                             featureNames=tuple(featureNames),
                             standardizer=standardizer,
                             iterations=iterations, nObs=nPrevious + len(y))


def samplePosterior(post, nDraws, seed=0):
    """ Draws of N(map, precision^-1) through the Cholesky factor L of the
    precision: w = map + L^-T z. The seed of the stream used is kept on
    the result so the same draws can be regenerated. """
    try:
        L = cholesky(post.precision, lower=True)
    except LinAlgError:
        raise NotPositiveDefinite("Posterior precision is not positive definite")
    stream = seed if isinstance(seed, SeededStream) else \
        SeededStream(seed, 'logistic-draws')
    z = stream.normal((post.dim, nDraws))
    draws = post.mapWeights[:, None] + solve_triangular(L.T, z, lower=False)
    return replace(post, draws=draws.T, seed=stream.seed)


def _designRows(post, x):
    x = np.asarray(x, dtype=float)
    if x.shape[-1] != post.dim - 1:
        raise DimensionMismatch("Posterior has %d features, got %d"
                                % (post.dim - 1, x.shape[-1]))
    return addIntercept(x)


def predictProba(post, x):
    """ Posterior predictive probability: mean over the draws of
    sigmoid(w . [1, x]). x is a standardized vector or a matrix of rows. """
    if post.draws is None:
        raise InvalidParameter("Posterior has no draws, call samplePosterior "
                               "first")
    single = np.ndim(x) == 1
    X1 = _designRows(post, x)
    out = np.empty(len(X1))
    for start in range(0, len(X1), SCORE_CHUNK):
        block = X1[start:start + SCORE_CHUNK]
        out[start:start + SCORE_CHUNK] = expit(block @ post.draws.T).mean(axis=1)
    return float(out[0]) if single else out


def predictMapProba(post, x):
    """ Plug-in probability at the MAP weights. """
    single = np.ndim(x) == 1
    p = expit(_designRows(post, x) @ post.mapWeights)
    return float(p[0]) if single else p


def sequentialUpdate(post, Xnew, yNew, seed=None):
    """ This method absorbs a new labelled batch: the MAP is refit using the
    current Gaussian approximation as prior. An empty batch leaves the
    posterior unchanged. If the posterior had draws, the same number is drawn
    again from the updated approximation. """
    yNew = np.asarray(yNew, dtype=float)
    if len(yNew) == 0:
        return post
    Xnew = np.atleast_2d(np.asarray(Xnew, dtype=float))
    if Xnew.shape[1] != post.dim - 1:
        raise DimensionMismatch("Posterior has %d features, batch has %d"
                                % (post.dim - 1, Xnew.shape[1]))
    if len(Xnew) != len(yNew):
        raise DimensionMismatch("%d rows for %d labels"
                                % (len(Xnew), len(yNew)))

    updated = _fitWithPrior(addIntercept(Xnew), yNew, post.mapWeights,
                            post.precision, post.featureNames,
                            post.standardizer, post.nObs)
    updated.extra = dict(post.extra)
    if post.draws is not None:
        stream = SeededStream(post.seed if seed is None else seed,
                              'logistic-draws').derive('update-%d' % updated.nObs)
        updated = samplePosterior(updated, len(post.draws), stream)
    return updated


# ----------------- Decisions and summaries -----------------------------------

@dataclass(frozen=True)
class DecisionPolicy:
    """ Flag a case when its score is strictly above threshold. """
    threshold: float
    fprCap: float = FPR_CAP

    def __post_init__(self):
        if not 0 <= self.threshold <= 1:
            raise InvalidParameter("Threshold must lie in [0, 1], got %s"
                                   % self.threshold)

    def flag(self, score):
        return score > self.threshold


def tuneThreshold(scoresValid, labelsValid, fprCap=FPR_CAP):
    """ Threshold with the highest validation recall whose validation false
    positive rate stays within fprCap. Frozen afterwards for the test set. """
    precision, threshold = precisionAtFpr(
        ScoredCases.of(scoresValid, labelsValid), fprCap)
    if not math.isfinite(threshold):
        logger.warning("FPR cap %.3f admits flagging every case, threshold "
                       "set to 0", fprCap)
        threshold = 0.0
    logger.info("Threshold %.6f tuned at FPR <= %.3f (validation precision "
                "%.4f)", threshold, fprCap, precision)
    return DecisionPolicy(threshold, fprCap)


def coefficientSummary(post, mass=INTERVAL_MASS):
    """ Per feature posterior mean, sd and central interval from the Gaussian
    approximation. """
    sds = np.sqrt(np.diag(post.covariance()))
    z = float(ndtri(0.5 + mass / 2.0))
    names = ('intercept',) + tuple(post.featureNames or
                                   ['x%d' % i for i in range(1, post.dim)])
    return [{'feature': name, 'mean': float(m), 'sd': float(s),
             'lo': float(m - z * s), 'hi': float(m + z * s)}
            for name, m, s in zip(names, post.mapWeights, sds)]


def writePosterior(post, path, policy=None):
    """ JSON dump of the approximation. Draws are not stored, they are
    regenerated from the recorded seed. """
    doc = {
        'map_weights': post.mapWeights.tolist(),
        'precision': post.precision.ravel().tolist(),
        'dim': post.dim,
        'metadata': {
            'seed': post.seed,
            'n_draws': 0 if post.draws is None else len(post.draws),
            'n_obs': post.nObs,
            'prior': {'mean': post.priorMean.tolist(),
                      'precision': post.priorPrecision.ravel().tolist()},
            'feature_names': list(post.featureNames),
            'standardizer': None if post.standardizer is None
            else post.standardizer.toDict(),
            'threshold': None if policy is None else policy.threshold,
            'fpr_cap': None if policy is None else policy.fprCap,
        }
    }
    try:
        with open(path, 'w') as f:
            json.dump(doc, f, indent=1, sort_keys=True)
    except OSError as e:
        raise IoFailure("Cannot write posterior %s: %s" % (path, e))


def readPosterior(path):
    """ :returns: (LogisticPosterior with draws, DecisionPolicy or None) """
    try:
        with open(path) as f:
            doc = json.load(f)
    except OSError as e:
        raise IoFailure("Cannot read posterior %s: %s" % (path, e))

    dim = doc['dim']
    meta = doc['metadata']
    standardizer = None if meta.get('standardizer') is None else \
        StandardizerParams.fromDict(meta['standardizer'])
    post = LogisticPosterior(
        np.array(doc['map_weights']),
        np.array(doc['precision']).reshape(dim, dim),
        np.array(meta['prior']['mean']),
        np.array(meta['prior']['precision']).reshape(dim, dim),
        featureNames=tuple(meta.get('feature_names', ())),
        standardizer=standardizer, seed=meta.get('seed', 0),
        nObs=meta.get('n_obs', 0))
    if meta.get('n_draws'):
        post = samplePosterior(post, meta['n_draws'], SeededStream(post.seed))

    policy = None if meta.get('threshold') is None else \
        DecisionPolicy(meta['threshold'], meta.get('fpr_cap', FPR_CAP))
    return post, policy
