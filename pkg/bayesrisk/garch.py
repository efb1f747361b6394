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
GARCH(p, q) baselines: maximum likelihood with Gaussian or unit variance
Student-t innovations, BIC selection over p, q in {1, 2} and one step
variance, Value-at-Risk and log realized volatility forecasts.

Parameter vectors are laid out as
    [mu, omega, alpha_1..alpha_q, beta_1..beta_p, (nu)]
with alpha the ARCH and beta the GARCH coefficients.
"""
import itertools
import logging
import math
from dataclasses import dataclass

import numpy as np
from scipy import stats
from scipy.optimize import minimize
from scipy.signal import lfilter, lfiltic
from scipy.special import gammaln, ndtri

from .constants import (GARCH_ORDERS, GARCH_STARTS, INNOVATIONS, MIN_FIT_OBS,
                        LIKELIHOOD_GAUSSIAN, LIKELIHOOD_STUDENT_T, VAR_LEVEL,
                        RV_WINDOW, TRADING_DAYS, CRPS_SAMPLES)
from .dlm import EmpiricalPredictive
from .errors import (ConstraintViolated, NonFiniteLikelihood,
                     OptimizationFailed, TooShort, InvalidParameter)
from .rng import asStream

logger = logging.getLogger(__name__)

NU_FLOOR = 2.05
PENALTY = 1e12


@dataclass(frozen=True)
class GarchSpec:
    p: int = 1
    q: int = 1
    innovation: str = LIKELIHOOD_GAUSSIAN

    def __post_init__(self):
        if self.p not in GARCH_ORDERS or self.q not in GARCH_ORDERS:
            raise InvalidParameter("GARCH orders must be in %s, got p=%s q=%s"
                                   % (GARCH_ORDERS, self.p, self.q))
        if self.innovation not in INNOVATIONS:
            raise InvalidParameter("Unknown innovation '%s'" % self.innovation)

    @property
    def isStudent(self):
        return self.innovation == LIKELIHOOD_STUDENT_T

    @property
    def nParams(self):
        return 2 + self.p + self.q + (1 if self.isStudent else 0)

    @property
    def label(self):
        return "garch(%d,%d)-%s" % (self.p, self.q, self.innovation)

    def unpack(self, params):
        """ (mu, omega, alpha, beta, nu) from a parameter vector. """
        params = np.asarray(params, dtype=float)
        if len(params) != self.nParams:
            raise InvalidParameter("%s expects %d parameters, got %d"
                                   % (self.label, self.nParams, len(params)))
        alpha = params[2:2 + self.q]
        beta = params[2 + self.q:2 + self.q + self.p]
        nu = params[-1] if self.isStudent else None
        return params[0], params[1], alpha, beta, nu


@dataclass(frozen=True)
class GarchFit:
    spec: GarchSpec
    mu: float
    omega: float
    alpha: tuple
    betaG: tuple
    nu: float
    loglik: float
    bic: float
    nObs: int
    presampleVariance: float

    @property
    def params(self):
        values = [self.mu, self.omega, *self.alpha, *self.betaG]
        if self.spec.isStudent:
            values.append(self.nu)
        return np.array(values)

    @property
    def persistence(self):
        return float(sum(self.alpha) + sum(self.betaG))

    def row(self):
        """ Fit report row: p,q,dist,mu,omega,alphas,betas,nu,loglik,bic """
        return [self.spec.p, self.spec.q, self.spec.innovation,
                '%.6g' % self.mu, '%.6g' % self.omega,
                ';'.join('%.6f' % a for a in self.alpha),
                ';'.join('%.6f' % b for b in self.betaG),
                '' if self.nu is None else '%.4f' % self.nu,
                '%.4f' % self.loglik, '%.4f' % self.bic]


# ----------------- Likelihood ------------------------------------------------

def checkConstraints(spec, params):
    mu, omega, alpha, beta, nu = spec.unpack(params)
    if not omega > 0:
        raise ConstraintViolated("omega must be positive, got %s" % omega)
    if np.any(alpha < 0) or np.any(beta < 0):
        raise ConstraintViolated("alpha and beta must be non negative")
    if alpha.sum() + beta.sum() >= 1.0:
        raise ConstraintViolated("Stationarity requires sum(alpha) + "
                                 "sum(beta) < 1, got %.4f"
                                 % (alpha.sum() + beta.sum()))
    if spec.isStudent and not nu > 2:
        raise ConstraintViolated("Student-t innovations need nu > 2, got %s"
                                 % nu)


def garchConditionalVariance(r, spec, params, presample=None):
    """ This method runs the variance recursion
        s2_t = omega + sum_i alpha_i e2_t-i + sum_j beta_j s2_t-j
    with e_t = r_t - mu and every pre-sample e2 and s2 set to presample
    (default: the sample variance of r).

    :returns: array of length len(r) + 1, the last entry being the one step
        ahead variance
    """
    r = np.asarray(r, dtype=float)
    mu, omega, alpha, beta, _ = spec.unpack(params)
    if presample is None:
        presample = float(np.var(r))

    m = max(spec.p, spec.q)
    e2 = (r - mu) ** 2
    extended = np.concatenate([np.full(m, presample), e2, [0.0]])
    arch = lfilter(np.concatenate([[0.0], alpha]), [1.0], extended)
    drive = omega + arch[m:]

    a = np.concatenate([[1.0], -beta])
    zi = lfiltic([1.0], a, y=np.full(spec.p, presample))
    return lfilter([1.0], a, drive, zi=zi)[0]


def _standardizedTLogpdf(z, nu):
    return (gammaln((nu + 1.0) / 2.0) - gammaln(nu / 2.0)
            - 0.5 * math.log(math.pi * (nu - 2.0))
            - (nu + 1.0) / 2.0 * np.log1p(z * z / (nu - 2.0)))


def garchLoglik(r, spec, params, presample=None):
    """ Conditional log likelihood of the returns. Student-t densities use
    the unit variance standardization. """
    r = np.asarray(r, dtype=float)
    if len(r) <= 10 * (spec.p + spec.q):
        raise TooShort("%s likelihood needs more than %d returns, got %d"
                       % (spec.label, 10 * (spec.p + spec.q), len(r)))
    checkConstraints(spec, params)
    mu, _, _, _, nu = spec.unpack(params)

    sig2 = garchConditionalVariance(r, spec, params, presample)[:-1]
    e = r - mu
    if spec.isStudent:
        z = e / np.sqrt(sig2)
        value = np.sum(_standardizedTLogpdf(z, nu) - 0.5 * np.log(sig2))
    else:
        value = -0.5 * np.sum(np.log(2.0 * np.pi) + np.log(sig2) + e * e / sig2)

    if not np.isfinite(value):
        raise NonFiniteLikelihood("%s log likelihood is not finite"
                                  % spec.label)
    return float(value)


# ----------------- Estimation ------------------------------------------------

def _toNatural(spec, theta):
    """ Unconstrained vector to parameters: omega = exp, (alpha, beta) from a
    softmax with a slack term so that their sum stays below one,
    nu = 2.05 + exp. """
    k = spec.p + spec.q
    z = np.exp(np.clip(theta[2:2 + k], -50, 50))
    weights = z / (1.0 + z.sum())
    values = [theta[0], math.exp(min(theta[1], 50.0)), *weights]
    if spec.isStudent:
        values.append(NU_FLOOR + math.exp(min(theta[-1], 10.0)))
    return np.array(values)


def _toUnconstrained(spec, params):
    mu, omega, alpha, beta, nu = spec.unpack(params)
    weights = np.concatenate([alpha, beta])
    slack = 1.0 - weights.sum()
    theta = [mu, math.log(omega), *np.log(weights / slack)]
    if spec.isStudent:
        theta.append(math.log(nu - NU_FLOOR))
    return np.array(theta)


def _startingPoints(r, spec, stream):
    """ Three fixed persistence profiles plus seeded random ones. """
    variance = float(np.var(r))
    profiles = [(0.05, 0.90), (0.10, 0.80), (0.20, 0.50)]
    while len(profiles) < GARCH_STARTS:
        a = float(0.01 + 0.29 * stream.uniform())
        b = float(0.30 + (0.94 - a - 0.30) * stream.uniform())
        profiles.append((a, b))

    starts = []
    for archTotal, garchTotal in profiles:
        alpha = np.full(spec.q, archTotal / spec.q)
        beta = np.full(spec.p, garchTotal / spec.p)
        omega = variance * (1.0 - archTotal - garchTotal)
        params = [float(np.mean(r)), omega, *alpha, *beta]
        if spec.isStudent:
            params.append(8.0)
        starts.append(np.array(params))
    return starts


def garchFit(r, spec, seed=0):
    """ This method estimates a GARCH model by maximum likelihood. A Nelder
    Mead simplex search runs from 5 deterministic starting points on the
    unconstrained transform and the best optimum is kept.

    :param r: training returns, at least 250
    :param spec: GarchSpec
    :param seed: integer seed or SeededStream for the random starts
    """
    r = np.asarray(r, dtype=float)
    if len(r) < MIN_FIT_OBS:
        raise TooShort("GARCH fit needs %d or more returns, got %d"
                       % (MIN_FIT_OBS, len(r)))
    presample = float(np.var(r))
    if not presample > 0:
        raise OptimizationFailed("Returns have zero variance, %s cannot be "
                                 "estimated" % spec.label)

    stream = asStream(seed, 'garch').derive(spec.label)

    def objective(theta):
        try:
            return -garchLoglik(r, spec, _toNatural(spec, theta), presample)
        except (ConstraintViolated, NonFiniteLikelihood):
            return PENALTY

    best = None
    for start in _startingPoints(r, spec, stream):
        theta0 = _toUnconstrained(spec, start)
        result = minimize(objective, theta0, method='Nelder-Mead',
                          options={'maxiter': 400 * spec.nParams,
                                   'maxfev': 600 * spec.nParams,
                                   'xatol': 1e-7, 'fatol': 1e-9,
                                   'adaptive': True})
        logger.debug("%s start %s: -loglik %.4f", spec.label,
                     np.round(start, 4), result.fun)
        if result.fun < PENALTY and (best is None or result.fun < best.fun):
            best = result

    if best is None:
        raise OptimizationFailed("All starting points of %s violate the "
                                 "constraints" % spec.label)

    params = _toNatural(spec, best.x)
    mu, omega, alpha, beta, nu = spec.unpack(params)
    loglik = -float(best.fun)
    T = len(r)

    return GarchFit(spec, float(mu), float(omega), tuple(map(float, alpha)),
                    tuple(map(float, beta)),
                    None if nu is None else float(nu), loglik,
                    spec.nParams * math.log(T) - 2.0 * loglik, T, presample)


def garchSpecs():
    return [GarchSpec(p, q, innovation) for p, q, innovation in
            itertools.product(GARCH_ORDERS, GARCH_ORDERS, INNOVATIONS)]


def garchFitAll(r, seed=0):
    """ Fit the 8 candidate specifications. """
    return [garchFit(r, spec, seed) for spec in garchSpecs()]


def pickByBic(fits):
    """ Minimum BIC; ties go to smaller p + q, then Gaussian. """
    return min(fits, key=lambda f: (f.bic, f.spec.p + f.spec.q,
                                    f.spec.innovation != LIKELIHOOD_GAUSSIAN))


def garchSelect(r, seed=0):
    fit = pickByBic(garchFitAll(r, seed))
    logger.info("Selected %s by BIC (%.2f)", fit.spec.label, fit.bic)
    return fit


# ----------------- Forecasts -------------------------------------------------

def innovationQuantile(fit, level):
    """ Quantile of the unit variance innovation law. """
    if fit.spec.isStudent:
        return float(stats.t.ppf(level, fit.nu) *
                     math.sqrt((fit.nu - 2.0) / fit.nu))
    return float(ndtri(level))


def garchNextVariance(fit, rRecent):
    rRecent = np.asarray(rRecent, dtype=float)
    lags = max(fit.spec.p, fit.spec.q)
    if len(rRecent) < lags:
        raise TooShort("%s forecast needs %d recent returns, got %d"
                       % (fit.spec.label, lags, len(rRecent)))
    return float(garchConditionalVariance(rRecent, fit.spec, fit.params,
                                          fit.presampleVariance)[-1])


def garchVar(fit, rRecent, level=VAR_LEVEL):
    """ VaR = mu + sigma_t * q_level, sigma_t from the variance recursion over
    rRecent (started from the training variance). """
    sigma = math.sqrt(garchNextVariance(fit, rRecent))
    return fit.mu + sigma * innovationQuantile(fit, level)


def garchLogRvPredictive(fit, rRecent, window=RV_WINDOW,
                         annualization=TRADING_DAYS, nSamples=CRPS_SAMPLES):
    """ Predictive of the next log realized volatility. The next return is
    drawn at nSamples stratified quantiles of the fitted innovation law and
    combined with the window-1 squared returns already observed. """
    rRecent = np.asarray(rRecent, dtype=float)
    if len(rRecent) < window - 1:
        raise TooShort("Need %d recent returns, got %d"
                       % (window - 1, len(rRecent)))
    known = float(np.sum(rRecent[len(rRecent) - (window - 1):] ** 2))
    sigma = math.sqrt(garchNextVariance(fit, rRecent))

    u = (np.arange(nSamples) + 0.5) / nSamples
    if fit.spec.isStudent:
        z = stats.t.ppf(u, fit.nu) * math.sqrt((fit.nu - 2.0) / fit.nu)
    else:
        z = ndtri(u)
    rNext = fit.mu + sigma * z
    rv = np.sqrt(annualization / window * (known + rNext ** 2))
    return EmpiricalPredictive(np.log(rv))


def simulateGarch(T, omega, alpha, beta, mu=0.0, innovation=LIKELIHOOD_GAUSSIAN,
                  nu=None, seed=0, burn=500):
    """ Simulated GARCH returns, started from the unconditional variance. """
    alpha = np.atleast_1d(np.asarray(alpha, dtype=float))
    beta = np.atleast_1d(np.asarray(beta, dtype=float))
    stream = asStream(seed, 'garch-sim')
    u = stream.uniform(T + burn)
    if innovation == LIKELIHOOD_STUDENT_T:
        z = stats.t.ppf(u, nu) * math.sqrt((nu - 2.0) / nu)
    else:
        z = ndtri(u)

    longRun = omega / (1.0 - alpha.sum() - beta.sum())
    q, p = len(alpha), len(beta)
    e2 = [longRun] * q
    s2 = [longRun] * p
    out = np.empty(T + burn)
    for t in range(T + burn):
        var = omega + np.dot(alpha, e2[::-1][:q]) + np.dot(beta, s2[::-1][:p])
        eps = math.sqrt(var) * z[t]
        out[t] = mu + eps
        e2 = (e2 + [eps * eps])[-q:]
        s2 = (s2 + [var])[-p:]
    return out[burn:]
