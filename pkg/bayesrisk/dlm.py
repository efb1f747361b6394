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
Local level dynamic linear model.

Two inference modes are provided:
  - a closed form variance discount filter whose one step predictives are
    Student-t (used for Value-at-Risk)
  - a random walk Metropolis sampler over (tau, sigmaObs) with Half-Cauchy
    priors, the states being integrated out by a Kalman filter (used for
    volatility forecasting)

The predictive distribution classes defined here are shared by every model
and by the scoring metrics.
"""
import logging
import math
from dataclasses import dataclass, field

import numpy as np
from scipy import stats
from scipy.optimize import brentq
from scipy.signal import lfilter
from scipy.special import ndtri

from .constants import (DISCOUNT_DELTA, DISCOUNT_BETA, DISCOUNT_C0,
                        DISCOUNT_N0, HALF_CAUCHY_SCALE, STUDENT_T_OBS_DF,
                        MIN_MCMC_DRAWS, MIN_EMPIRICAL_SAMPLES, INTERVAL_MASS,
                        LIKELIHOOD_GAUSSIAN, LIKELIHOOD_STUDENT_T)
from .errors import (InvalidParameter, NonFiniteObservation, DegenerateVariance,
                     ChainDiverged, TooShort, Empty)
from .rng import asStream

logger = logging.getLogger(__name__)

LOG_2PI = math.log(2.0 * math.pi)


# ----------------- Predictive distributions ----------------------------------

class PredictiveDistribution:
    """ One step ahead forecast density. Subclasses implement mean, cdf,
    pdf, quantile and the inverse transform used for sampling. """
    kind = None

    def mean(self):
        raise NotImplementedError

    def cdf(self, x):
        raise NotImplementedError

    def pdf(self, x):
        raise NotImplementedError

    def quantile(self, q):
        raise NotImplementedError

    def fromUniforms(self, u):
        """ Map uniforms on (0, 1) to draws by inverse transform. """
        return self.quantile(u)

    def sample(self, n, stream):
        return self.fromUniforms(stream.uniform(n))

    def interval(self, mass=INTERVAL_MASS):
        """ Central interval holding the given probability mass. """
        tail = (1.0 - mass) / 2.0
        return float(self.quantile(tail)), float(self.quantile(1.0 - tail))

    def median(self):
        return float(self.quantile(0.5))


class GaussianPredictive(PredictiveDistribution):
    kind = 'gaussian'

    def __init__(self, mean, sd):
        if not sd > 0:
            raise InvalidParameter("Gaussian predictive needs sd > 0, got %s"
                                   % sd)
        self.mu = float(mean)
        self.sd = float(sd)

    def __repr__(self):
        return "GaussianPredictive(mean=%g, sd=%g)" % (self.mu, self.sd)

    def mean(self):
        return self.mu

    def cdf(self, x):
        return stats.norm.cdf(x, self.mu, self.sd)

    def pdf(self, x):
        return stats.norm.pdf(x, self.mu, self.sd)

    def quantile(self, q):
        return self.mu + self.sd * ndtri(q)


class StudentTPredictive(PredictiveDistribution):
    kind = 'student_t'

    def __init__(self, df, loc, scale):
        if not df > 0 or not scale > 0:
            raise InvalidParameter("Student-t predictive needs df > 0 and "
                                   "scale > 0, got df=%s scale=%s"
                                   % (df, scale))
        self.df = float(df)
        self.loc = float(loc)
        self.scale = float(scale)

    def __repr__(self):
        return "StudentTPredictive(df=%g, loc=%g, scale=%g)" % (
            self.df, self.loc, self.scale)

    def mean(self):
        return self.loc

    def cdf(self, x):
        return stats.t.cdf(x, self.df, self.loc, self.scale)

    def pdf(self, x):
        return stats.t.pdf(x, self.df, self.loc, self.scale)

    def quantile(self, q):
        return stats.t.ppf(q, self.df, self.loc, self.scale)


class EmpiricalPredictive(PredictiveDistribution):
    kind = 'empirical'

    def __init__(self, samples):
        samples = np.sort(np.asarray(samples, dtype=float))
        if len(samples) < MIN_EMPIRICAL_SAMPLES:
            raise InvalidParameter("Empirical predictive needs at least %d "
                                   "samples, got %d"
                                   % (MIN_EMPIRICAL_SAMPLES, len(samples)))
        if not np.all(np.isfinite(samples)):
            raise InvalidParameter("Empirical predictive samples must be "
                                   "finite")
        self.samples = samples

    def __repr__(self):
        return "EmpiricalPredictive(n=%d)" % len(self.samples)

    def mean(self):
        return float(self.samples.mean())

    def cdf(self, x):
        return np.searchsorted(self.samples, x, side='right') / len(self.samples)

    def pdf(self, x):
        return stats.gaussian_kde(self.samples)(x)

    def quantile(self, q):
        return np.quantile(self.samples, q)

    def sample(self, n, stream):
        return self.samples[stream.integers(len(self.samples), n)]


class MixturePredictive(PredictiveDistribution):
    """ Finite mixture. When every component is Gaussian the component
    means and sds are kept as arrays and all evaluations are vectorized. """
    kind = 'mixture'

    def __init__(self, components, weights=None):
        if len(components) == 0:
            raise InvalidParameter("Mixture needs at least one component")
        n = len(components)
        weights = np.full(n, 1.0 / n) if weights is None else \
            np.asarray(weights, dtype=float)
        if len(weights) != n or np.any(weights < 0) or \
                abs(weights.sum() - 1.0) > 1e-9:
            raise InvalidParameter("Mixture weights must be non negative and "
                                   "sum to 1")
        self.components = list(components)
        self.weights = weights
        self._gaussian = all(c.kind == 'gaussian' for c in self.components)
        if self._gaussian:
            self.means = np.array([c.mu for c in self.components])
            self.sds = np.array([c.sd for c in self.components])

    @classmethod
    def gaussian(cls, means, sds, weights=None):
        return cls([GaussianPredictive(m, s) for m, s in zip(means, sds)],
                   weights)

    def __repr__(self):
        return "MixturePredictive(components=%d)" % len(self.components)

    def __len__(self):
        return len(self.components)

    def mean(self):
        if self._gaussian:
            return float(np.dot(self.weights, self.means))
        return float(sum(w * c.mean() for w, c in
                         zip(self.weights, self.components)))

    def cdf(self, x):
        x = np.asarray(x, dtype=float)
        if self._gaussian:
            z = (x[..., None] - self.means) / self.sds
            return stats.norm.cdf(z) @ self.weights
        return sum(w * c.cdf(x) for w, c in zip(self.weights, self.components))

    def pdf(self, x):
        x = np.asarray(x, dtype=float)
        if self._gaussian:
            z = (x[..., None] - self.means) / self.sds
            return (stats.norm.pdf(z) / self.sds) @ self.weights
        return sum(w * c.pdf(x) for w, c in zip(self.weights, self.components))

    def _bracket(self, q):
        if self._gaussian:
            qs = self.means + self.sds * ndtri(q)
        else:
            qs = np.array([float(c.quantile(q)) for c in self.components])
        return float(qs.min()), float(qs.max())

    def quantile(self, q):
        if np.ndim(q) > 0:
            return np.array([self.quantile(qi) for qi in np.ravel(q)]).reshape(
                np.shape(q))
        if len(self.components) == 1:
            return float(self.components[0].quantile(q))
        lo, hi = self._bracket(q)
        if hi - lo <= 1e-15 * max(1.0, abs(hi)):
            return lo
        return brentq(lambda x: float(self.cdf(x)) - q, lo, hi, xtol=1e-12)

    def fromUniforms(self, u):
        """ Stratified inverse transform: the uniform picks the component
        through the cumulative weights and is then rescaled inside it. """
        u = np.asarray(u, dtype=float)
        cum = np.cumsum(self.weights)
        cum[-1] = 1.0
        idx = np.searchsorted(cum, u, side='right').clip(0, len(cum) - 1)
        start = np.concatenate([[0.0], cum[:-1]])[idx]
        inner = ((u - start) / self.weights[idx]).clip(1e-16, 1.0 - 1e-16)
        if self._gaussian:
            return self.means[idx] + self.sds[idx] * ndtri(inner)
        out = np.empty_like(u)
        for k in np.unique(idx):
            sel = idx == k
            out[sel] = self.components[k].quantile(inner[sel])
        return out


# ----------------- Variance discount filter ----------------------------------

@dataclass(frozen=True)
class DiscountDlmState:
    """ Sufficient statistics of the variance discount local level filter.
    C is expressed in units of S. """
    m: float
    C: float
    n: float
    S: float
    delta: float = DISCOUNT_DELTA
    betaDisc: float = DISCOUNT_BETA

    def __post_init__(self):
        if not (self.C > 0 and self.S > 0 and self.n >= 1):
            raise InvalidParameter("Discount state needs C > 0, S > 0 and "
                                   "n >= 1, got C=%s S=%s n=%s"
                                   % (self.C, self.S, self.n))
        if not (0 < self.delta <= 1 and 0 < self.betaDisc <= 1):
            raise InvalidParameter("Discount factors must lie in (0, 1]")


def initialDiscountState(train, delta=DISCOUNT_DELTA, betaDisc=DISCOUNT_BETA,
                         C0=DISCOUNT_C0, n0=DISCOUNT_N0):
    """ Moment matched starting point: m0 the training mean, S0 the training
    variance. """
    train = np.asarray(train, dtype=float)
    if len(train) < 2:
        raise TooShort("Discount filter initialization needs 2 or more "
                       "observations")
    S0 = float(np.var(train, ddof=1))
    if not S0 > 0:
        raise DegenerateVariance("Training series has zero variance")
    return DiscountDlmState(float(train.mean()), C0, n0, S0, delta, betaDisc)


def discountFilterStep(state, y):
    """ One step of the variance discount local level recursion.

    :returns: (Student-t predictive of y made before seeing it, updated state)
    """
    if not math.isfinite(y):
        raise NonFiniteObservation("Observation must be finite, got %s" % y)

    m, C, n, S = state.m, state.C, state.n, state.S
    R = C / state.delta
    Q = R + 1.0
    predictive = StudentTPredictive(n, m, math.sqrt(Q * S))

    e = y - m
    A = R / Q
    nNew = state.betaDisc * n + 1.0
    SNew = S * (1.0 + (e * e / (Q * S) - 1.0) / nNew)
    mNew = m + A * e
    CNew = (SNew / S) * (R - A * A * Q)

    return predictive, DiscountDlmState(mNew, CNew, nNew, SNew,
                                        state.delta, state.betaDisc)


def discountFilterRun(y, init, returnState=False):
    """ Run the discount filter over y. The predictive at index t only uses
    y[:t]; the first one comes from init alone. """
    if len(y) == 0:
        raise Empty("Discount filter needs a non empty series")

    predictives = []
    state = init
    for value in y:
        predictive, state = discountFilterStep(state, float(value))
        predictives.append(predictive)

    return (predictives, state) if returnState else predictives


# ----------------- Kalman filter marginal likelihood -------------------------

@dataclass(frozen=True)
class DlmHyper:
    tau: float
    sigmaObs: float

    def __post_init__(self):
        if not (self.tau > 0 and self.sigmaObs > 0):
            raise InvalidParameter("tau and sigmaObs must be positive")


def kalmanInnovations(y, h, initMean, initVar, tol=1e-14):
    """ This method runs the local level Kalman filter and returns the
    prediction errors v and their variances F.

    The state variance recursion does not depend on the data, so once it has
    converged the mean recursion is a fixed first order filter and the rest
    of the series is processed with scipy.signal.lfilter.
    """
    y = np.asarray(y, dtype=float)
    T = len(y)
    if T == 0:
        raise Empty("Kalman filter needs a non empty series")
    if h.tau < 1e-12 and h.sigmaObs < 1e-12:
        raise DegenerateVariance("Both tau and sigmaObs are below 1e-12")
    if not initVar > 0:
        raise InvalidParameter("initVar must be positive")

    tau2 = h.tau ** 2
    sig2 = h.sigmaObs ** 2
    v = np.empty(T)
    F = np.empty(T)

    a = initMean
    P = initVar + tau2
    t = 0
    while t < T:
        Ft = P + sig2
        K = P / Ft
        v[t] = y[t] - a
        F[t] = Ft
        a = a + K * v[t]
        PNew = P * sig2 / Ft + tau2
        t += 1
        if abs(PNew - P) <= tol * P:
            P = PNew
            break
        P = PNew

    if t < T:
        Ft = P + sig2
        K = P / Ft
        rest = y[t:]
        zi = [(1.0 - K) * a]
        filtered = lfilter([K], [1.0, -(1.0 - K)], rest, zi=zi)[0]
        means = np.concatenate([[a], filtered[:-1]])
        v[t:] = rest - means
        F[t:] = Ft

    return v, F


def kalmanLoglik(y, h, initMean, initVar):
    """ Exact Gaussian log likelihood of the local level model through the
    prediction error decomposition. """
    v, F = kalmanInnovations(y, h, initMean, initVar)
    return float(-0.5 * np.sum(LOG_2PI + np.log(F) + v * v / F))


def studentTLoglik(y, h, initMean, initVar, df=STUDENT_T_OBS_DF):
    """ Quasi likelihood of the robust variant: Kalman prediction errors
    scored with a unit variance Student-t of df degrees of freedom. """
    v, F = kalmanInnovations(y, h, initMean, initVar)
    scale = np.sqrt(F * (df - 2.0) / df)
    return float(np.sum(stats.t.logpdf(v / scale, df) - np.log(scale)))


def defaultInit(y):
    """ Initial state prior used for the sampler and the forecasts. """
    y = np.asarray(y, dtype=float)
    return float(y[0]), float(max(np.var(y), 1e-8))


# ----------------- Metropolis over the hyperparameters -----------------------

@dataclass
class HyperDraws:
    taus: np.ndarray
    sigmas: np.ndarray
    acceptanceRate: float
    stepScales: np.ndarray = field(default_factory=lambda: np.ones(2))

    def __len__(self):
        return len(self.taus)

    def hypers(self):
        return [DlmHyper(t, s) for t, s in zip(self.taus, self.sigmas)]

    def median(self):
        return DlmHyper(float(np.median(self.taus)),
                        float(np.median(self.sigmas)))

    def iqr(self):
        """ ((tau q25, tau q75), (sigma q25, sigma q75)) """
        return (tuple(np.quantile(self.taus, [0.25, 0.75])),
                tuple(np.quantile(self.sigmas, [0.25, 0.75])))


def halfCauchyLogpdf(x, scale=HALF_CAUCHY_SCALE):
    return math.log(2.0 / (math.pi * scale)) - math.log1p((x / scale) ** 2)


def metropolisHyper(y, priorScale=HALF_CAUCHY_SCALE, nDraws=1000, seed=0,
                    likelihood=LIKELIHOOD_GAUSSIAN, init=None,
                    adaptEvery=50, targetAcceptance=(0.25, 0.40)):
    """ This method samples the posterior of (tau, sigmaObs) of the local
    level model with a random walk Metropolis on their logarithms.

    The target is the Kalman marginal likelihood plus Half-Cauchy(0,
    priorScale) log priors and the log Jacobian of the transform. A warm up
    of nDraws iterations adapts the step sizes towards the target acceptance
    window and is discarded.

    :param y: observed series
    :param nDraws: kept draws, at least 500
    :param seed: integer seed or SeededStream
    :param likelihood: 'gaussian' or 'student_t' (df fixed to 5)
    :param init: optional (tau, sigmaObs) starting point
    """
    y = np.asarray(y, dtype=float)
    if nDraws < MIN_MCMC_DRAWS:
        raise InvalidParameter("metropolisHyper needs nDraws >= %d, got %s"
                               % (MIN_MCMC_DRAWS, nDraws))
    if len(y) < 10:
        raise TooShort("metropolisHyper needs 10 or more observations, got %d"
                       % len(y))
    if not np.all(np.isfinite(y)):
        raise NonFiniteObservation("Series contains non finite values")
    if likelihood not in (LIKELIHOOD_GAUSSIAN, LIKELIHOOD_STUDENT_T):
        raise InvalidParameter("Unknown likelihood '%s'" % likelihood)

    loglik = kalmanLoglik if likelihood == LIKELIHOOD_GAUSSIAN else studentTLoglik
    initMean, initVar = defaultInit(y)

    def logTarget(theta):
        tau, sigma = math.exp(theta[0]), math.exp(theta[1])
        if tau <= 0 or sigma <= 0 or (tau < 1e-12 and sigma < 1e-12):
            return -np.inf
        value = loglik(y, DlmHyper(tau, sigma), initMean, initVar)
        return (value + halfCauchyLogpdf(tau, priorScale) +
                halfCauchyLogpdf(sigma, priorScale) + theta[0] + theta[1])

    if init is None:
        s = float(np.std(np.diff(y)))
        start = max(s / 2.0, 1e-4)
        init = (start, start)
    theta = np.log(np.asarray(init, dtype=float))
    current = logTarget(theta)
    if not np.isfinite(current):
        raise ChainDiverged("Log posterior is not finite at the starting "
                            "point %s" % (init,))

    stream = asStream(seed, 'metropolis')
    total = 2 * nDraws
    steps = stream.normal((total, 2))
    logU = np.log(stream.uniform(total))
    scales = np.full(2, 0.1)

    taus = np.empty(nDraws)
    sigmas = np.empty(nDraws)
    accepted = 0
    batchAccepted = 0

    for it in range(total):
        proposal = theta + scales * steps[it]
        candidate = logTarget(proposal)
        if np.isfinite(candidate) and logU[it] < candidate - current:
            theta, current = proposal, candidate
            if it < nDraws:
                batchAccepted += 1
            else:
                accepted += 1

        if it < nDraws:
            if (it + 1) % adaptEvery == 0:
                rate = batchAccepted / adaptEvery
                if rate < targetAcceptance[0]:
                    scales *= 0.7
                elif rate > targetAcceptance[1]:
                    scales *= 1.3
                batchAccepted = 0
        else:
            k = it - nDraws
            taus[k] = math.exp(theta[0])
            sigmas[k] = math.exp(theta[1])

    acceptanceRate = accepted / nDraws
    logger.debug("Metropolis: acceptance %.3f, step scales %s",
                 acceptanceRate, scales)
    if acceptanceRate < 0.01:
        raise ChainDiverged("Metropolis acceptance rate %.4f is below 1%%"
                            % acceptanceRate)

    return HyperDraws(taus, sigmas, acceptanceRate, scales)


# ----------------- Mixture forecasts -----------------------------------------

class DlmMixtureFilter:
    """ One Kalman filter per posterior draw, vectorized over the draws.
    a and P always hold the one step ahead state mean and variance. """

    def __init__(self, draws, initMean, initVar):
        if isinstance(draws, HyperDraws):
            taus, sigmas = draws.taus, draws.sigmas
        else:
            draws = list(draws)
            if not draws:
                raise InvalidParameter("At least one hyperparameter draw is "
                                       "needed")
            taus = np.array([d.tau for d in draws])
            sigmas = np.array([d.sigmaObs for d in draws])
        self.tau2 = np.asarray(taus, dtype=float) ** 2
        self.sig2 = np.asarray(sigmas, dtype=float) ** 2
        self.a = np.full(len(self.tau2), float(initMean))
        self.P = initVar + self.tau2

    def __len__(self):
        return len(self.a)

    def update(self, y):
        if not math.isfinite(y):
            raise NonFiniteObservation("Observation must be finite, got %s" % y)
        F = self.P + self.sig2
        K = self.P / F
        self.a = self.a + K * (y - self.a)
        self.P = self.P * self.sig2 / F + self.tau2
        return self

    def filter(self, ys):
        for value in ys:
            self.update(float(value))
        return self

    def predictive(self):
        sds = np.sqrt(self.P + self.sig2)
        if len(self.a) == 1:
            return GaussianPredictive(self.a[0], sds[0])
        return MixturePredictive.gaussian(self.a, sds)


def dlmForecast(y, draws, initMean=None, initVar=None):
    """ Equal weight mixture of the per draw Gaussian one step predictives
    of the observation following y. """
    if initMean is None or initVar is None:
        initMean, initVar = defaultInit(y)
    return DlmMixtureFilter(draws, initMean, initVar).filter(y).predictive()


def simulateLocalLevel(T, tau, sigmaObs, seed=0, x0=0.0):
    """ Synthetic local level path, returns (states, observations). """
    stream = asStream(seed, 'local-level')
    x = x0 + np.cumsum(tau * stream.normal(T))
    return x, x + sigmaObs * stream.normal(T)
