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
Dynamic compliance risk.

A binary proxy label y_t follows Bernoulli(sigmoid(alpha_t + beta_t * x_t))
where x_t is the standardized log realized volatility of the previous trading
day and (alpha_t, beta_t) follow independent Gaussian random walks. The
filter is a bootstrap particle filter with systematic resampling. The static
logistic and constant frequency baselines live here too.
"""
import logging
from dataclasses import dataclass

import numpy as np
from numpy.lib.stride_tricks import sliding_window_view
from scipy.special import expit, log_expit, logsumexp, polygamma, psi

from .constants import (PARTICLES, MIN_PARTICLES, RW_SD_ALPHA, RW_SD_BETA,
                        RESAMPLE_TRIGGER, PROXY_QUANTILE, PROXY_LOOKBACK,
                        HOLDOUT_FRACTION, RISK_PRIOR_A, RISK_PRIOR_B)
from .errors import (TooShort, Empty, InvalidParameter, WeightCollapse,
                     LengthMismatch)
from .fraud import fitMap, predictMapProba
from .metrics import ScoredCases
from .rng import SeededStream, asStream

logger = logging.getLogger(__name__)

BAND_MASS = 0.90


# ----------------- Observations ----------------------------------------------

@dataclass(frozen=True)
class ProxyLabels:
    dates: np.ndarray
    labels: np.ndarray

    def __len__(self):
        return len(self.labels)


@dataclass(frozen=True)
class ComplianceObs:
    """ Aligned observation series: x is the standardized covariate and y
    the 0/1 proxy label of each date. """
    dates: np.ndarray
    x: np.ndarray
    y: np.ndarray

    def __post_init__(self):
        if not (len(self.dates) == len(self.x) == len(self.y)):
            raise LengthMismatch("dates, x and y differ in length: %d, %d, %d"
                                 % (len(self.dates), len(self.x), len(self.y)))
        if len(self.y) and not np.all(np.isin(self.y, (0, 1))):
            raise InvalidParameter("Compliance labels must be 0 or 1")

    def __len__(self):
        return len(self.y)

    def __getitem__(self, item):
        if not isinstance(item, slice):
            raise TypeError("ComplianceObs only supports slicing")
        return ComplianceObs(self.dates[item], self.x[item], self.y[item])

    def split(self, holdoutFraction=HOLDOUT_FRACTION):
        """ (train, holdout) with the final holdoutFraction of the timeline
        held out. """
        nTrain = len(self) - int(np.floor(holdoutFraction * len(self) + 1e-9))
        return self[:nTrain], self[nTrain:]


def makeProxyLabels(vol, quantile=PROXY_QUANTILE, lookback=PROXY_LOOKBACK):
    """ label_t = 1 iff rv_t is strictly above the quantile of the lookback
    values before t. The first lookback dates get no label. """
    rv = np.asarray(vol.rv, dtype=float)
    if len(rv) <= lookback:
        raise TooShort("Proxy labels need more than %d volatility values, "
                       "got %d" % (lookback, len(rv)))
    if not 0 < quantile < 1:
        raise InvalidParameter("quantile must lie in (0, 1), got %s" % quantile)

    past = sliding_window_view(rv[:-1], lookback)
    thresholds = np.quantile(past, quantile, axis=1)
    labels = (rv[lookback:] > thresholds).astype(int)
    logger.debug("Proxy labels: %d of %d dates elevated", labels.sum(),
                 len(labels))
    return ProxyLabels(np.asarray(vol.dates)[lookback:], labels)


def buildComplianceObs(vol, labels, holdoutFraction=HOLDOUT_FRACTION):
    """ Pair every labelled date with the log volatility of the trading day
    before it. Mean and sd of the covariate come from the training span only
    (everything but the final holdoutFraction). """
    index = np.searchsorted(vol.dates, labels.dates)
    if np.any(index == 0) or np.any(vol.dates[np.minimum(index, len(vol) - 1)]
                                    != labels.dates):
        raise InvalidParameter("Every label date needs a volatility value and "
                               "a previous one")
    raw = np.asarray(vol.y, dtype=float)[index - 1]
    if len(raw) < 2:
        raise TooShort("Need 2 or more labelled dates, got %d" % len(raw))

    nTrain = len(raw) - int(np.floor(holdoutFraction * len(raw) + 1e-9))
    mean = raw[:nTrain].mean()
    sd = raw[:nTrain].std()
    if not sd > 0:
        raise InvalidParameter("Covariate has zero variance on the training "
                               "span")
    return ComplianceObs(labels.dates, (raw - mean) / sd,
                         np.asarray(labels.labels, dtype=int))


# ----------------- Particle filter -------------------------------------------

@dataclass(frozen=True)
class ComplianceModelSpec:
    nParticles: int = PARTICLES
    rwSdAlpha: float = RW_SD_ALPHA
    rwSdBeta: float = RW_SD_BETA
    resampleTrigger: float = RESAMPLE_TRIGGER

    def __post_init__(self):
        if self.nParticles < MIN_PARTICLES:
            raise InvalidParameter("nParticles must be at least %d, got %s"
                                   % (MIN_PARTICLES, self.nParticles))
        if not (self.rwSdAlpha > 0 and self.rwSdBeta > 0):
            raise InvalidParameter("Random walk sds must be positive")
        if not 0 < self.resampleTrigger <= 1:
            raise InvalidParameter("resampleTrigger must lie in (0, 1], got %s"
                                   % self.resampleTrigger)


@dataclass(frozen=True)
class ComplianceInitPrior:
    """ Independent Gaussians over (alpha, beta) at time zero. """
    alphaMean: float
    alphaSd: float
    betaMean: float = 0.0
    betaSd: float = 1.0

    @classmethod
    def fromBeta(cls, a=RISK_PRIOR_A, b=RISK_PRIOR_B, betaMean=0.0, betaSd=1.0):
        """ alpha matched to the logit of a Beta(a, b) risk: the logit of a
        Beta variable has mean psi(a) - psi(b) and variance
        psi'(a) + psi'(b). """
        mean = float(psi(a) - psi(b))
        sd = float(np.sqrt(polygamma(1, a) + polygamma(1, b)))
        return cls(mean, sd, betaMean, betaSd)


@dataclass(frozen=True)
class ComplianceState:
    """ particles is (n, 2) with columns alpha and beta. ess is the
    effective sample size after reweighting, before any resampling. """
    particles: np.ndarray
    weights: np.ndarray
    ess: float
    resampled: bool = False

    def __len__(self):
        return len(self.weights)

    def means(self):
        return self.weights @ self.particles


def initialState(spec, prior=None, seed=0):
    prior = prior or ComplianceInitPrior.fromBeta()
    stream = asStream(seed, 'particle-init')
    z = stream.normal((spec.nParticles, 2))
    particles = np.column_stack([prior.alphaMean + prior.alphaSd * z[:, 0],
                                 prior.betaMean + prior.betaSd * z[:, 1]])
    n = spec.nParticles
    return ComplianceState(particles, np.full(n, 1.0 / n), float(n))


def systematicResample(weights, u):
    """ Indices of the systematic scheme with a single offset u in (0, 1). """
    n = len(weights)
    positions = (np.arange(n) + u) / n
    cumulative = np.cumsum(weights)
    cumulative[-1] = 1.0
    return np.searchsorted(cumulative, positions, side='left')


def predictiveRisk(particles, weights, x):
    return float(weights @ expit(particles[:, 0] + particles[:, 1] * x))


def pfStep(state, spec, x, y, seed=0):
    """ One filter step for the observation (x, y).

    The particles are moved by the random walk, the risk is computed from
    the moved particles before y is looked at, and only then are the weights
    updated with the Bernoulli likelihood of y.

    :returns: (risk, new state)
    """
    stream = asStream(seed, 'particle-step')
    n = len(state)
    noise = stream.normal((n, 2)) * np.array([spec.rwSdAlpha, spec.rwSdBeta])
    particles = state.particles + noise

    eta = particles[:, 0] + particles[:, 1] * x
    risk = float(state.weights @ expit(eta))

    loglik = log_expit(eta) if y == 1 else log_expit(-eta)
    with np.errstate(divide='ignore'):
        logw = np.log(state.weights) + loglik
    if not np.any(np.isfinite(logw)):
        raise WeightCollapse("All particle likelihoods vanished")
    weights = np.exp(logw - logsumexp(logw))
    weights /= weights.sum()
    ess = float(1.0 / np.sum(weights ** 2))

    resampled = ess < spec.resampleTrigger * n
    if resampled:
        idx = systematicResample(weights, float(stream.uniform()))
        particles = particles[idx]
        weights = np.full(n, 1.0 / n)
    return risk, ComplianceState(particles, weights, ess, resampled)


def _weightedQuantiles(values, weights, probs):
    order = np.argsort(values, kind='mergesort')
    cumulative = np.cumsum(weights[order])
    idx = np.searchsorted(cumulative, np.asarray(probs) * cumulative[-1])
    return values[order][np.minimum(idx, len(values) - 1)]


@dataclass(frozen=True)
class ComplianceRun:
    """ Per step one step ahead risk, filtered means and central bands of
    alpha and beta, and the effective sample size. """
    dates: np.ndarray
    risks: np.ndarray
    alphaMeans: np.ndarray
    betaMeans: np.ndarray
    alphaBands: np.ndarray
    betaBands: np.ndarray
    ess: np.ndarray
    y: np.ndarray
    nResampled: int = 0

    def __len__(self):
        return len(self.risks)

    def rows(self):
        """ date,risk,alpha_mean,beta_mean,ess,y """
        return [[str(d), '%.6f' % r, '%.6f' % a, '%.6f' % b, '%.1f' % e, int(y)]
                for d, r, a, b, e, y in zip(self.dates, self.risks,
                                            self.alphaMeans, self.betaMeans,
                                            self.ess, self.y)]


def pfRun(obs, spec=None, prior=None, seed=0, bandMass=BAND_MASS):
    """ This method filters a whole observation series. All randomness comes
    from one stream per run: initialization from a derived child, steps from
    the run stream in time order. """
    if len(obs) == 0:
        raise Empty("No compliance observations to filter")
    spec = spec or ComplianceModelSpec()
    root = asStream(seed, 'particle-filter')
    state = initialState(spec, prior, root.derive('init'))

    T = len(obs)
    risks = np.empty(T)
    means = np.empty((T, 2))
    alphaBands = np.empty((T, 2))
    betaBands = np.empty((T, 2))
    ess = np.empty(T)
    tail = (1.0 - bandMass) / 2.0
    nResampled = 0

    for t in range(T):
        risks[t], state = pfStep(state, spec, obs.x[t], obs.y[t], root)
        means[t] = state.means()
        alphaBands[t] = _weightedQuantiles(state.particles[:, 0], state.weights,
                                           [tail, 1.0 - tail])
        betaBands[t] = _weightedQuantiles(state.particles[:, 1], state.weights,
                                          [tail, 1.0 - tail])
        ess[t] = state.ess
        nResampled += state.resampled

    logger.info("Particle filter: %d steps, %d resamplings, min ESS %.1f",
                T, nResampled, ess.min())
    return ComplianceRun(np.asarray(obs.dates), risks, means[:, 0],
                         means[:, 1], alphaBands, betaBands, ess,
                         np.asarray(obs.y), nResampled)


# ----------------- Baselines -------------------------------------------------

def baselineLogistic(trainObs, testObs):
    """ Static logistic regression on the same covariate, fit once on the
    training span and scored with plug-in MAP probabilities. """
    post = fitMap(trainObs.x[:, None], trainObs.y, featureNames=('x',))
    scores = predictMapProba(post, np.asarray(testObs.x)[:, None])
    return ScoredCases.of(scores, testObs.y)


def baselineFrequency(trainLabels):
    """ Training prevalence, used as the score of every test case. """
    trainLabels = np.asarray(trainLabels)
    if len(trainLabels) == 0:
        raise Empty("Frequency baseline needs at least one training label")
    return float(trainLabels.mean())


def frequencyCases(trainLabels, testLabels):
    score = baselineFrequency(trainLabels)
    return ScoredCases.of(np.full(len(testLabels), score), testLabels)


def simulateCompliance(T, alpha, beta, seed=0, dates=None):
    """ Synthetic observations from a fixed (alpha, beta) with standard
    normal covariates. """
    stream = SeededStream(seed, 'compliance-sim')
    x = stream.normal(T)
    y = (stream.uniform(T) < expit(alpha + beta * x)).astype(int)
    if dates is None:
        dates = np.datetime64('2000-01-03') + np.arange(T)
    return ComplianceObs(np.asarray(dates), x, y)
