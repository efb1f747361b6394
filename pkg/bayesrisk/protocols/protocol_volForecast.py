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

import os
import pickle

import pyworkflow.protocol.params as params
from pyworkflow.protocol import STEPS_PARALLEL
import pyworkflow.utils.path as path

from .. import harness
from ..garch import pickByBic
from ..marketdata import toDate
from ..constants import *
from .protocol_base import ProtBayesRiskBase


class ProtBayesRiskVolForecast(ProtBayesRiskBase):
    """
    Rolling origin forecasts of the next day log realized volatility with a
    Bayesian local level DLM and the BIC selected GARCH model, refit at the
    start of every month. Each refit date is one step, so refits run in
    parallel when the protocol is given several threads.
    """

    _label = 'Volatility forecast'
    _experiment = EXP_VOL

    def __init__(self, **args):
        ProtBayesRiskBase.__init__(self, **args)
        self.stepsExecutionMode = STEPS_PARALLEL

    # -------------------------- DEFINE param functions -----------------------
    def _defineDataParams(self, form):
        ProtBayesRiskBase._defineDataParams(self, form)

        form.addParam('initialEnd',
                      params.StringParam,
                      default=INITIAL_END,
                      label='Last in-sample date',
                      help='Forecasts start the following trading day.')

        form.addParam('refitInterval',
                      params.IntParam,
                      default=1,
                      label='Months between refits')

    def _defineModelParams(self, form):
        form.addParam('useDlm', params.BooleanParam, default=True,
                      label='Bayesian DLM?')

        form.addParam('dlmLikelihood',
                      params.EnumParam,
                      choices=INNOVATIONS,
                      default=0,
                      condition='useDlm',
                      label='DLM observation law',
                      display=params.EnumParam.DISPLAY_HLIST)

        form.addParam('mcmcDraws',
                      params.IntParam,
                      default=DEFAULT_MCMC_DRAWS,
                      condition='useDlm',
                      label='Posterior draws per refit',
                      help='Kept Metropolis draws, at least %d. The same number '
                           'of warm-up iterations is discarded.'
                           % MIN_MCMC_DRAWS)

        form.addParam('useGarch', params.BooleanParam, default=True,
                      label='GARCH?',
                      help='Orders (1,1), (1,2), (2,1), (2,2) with Gaussian and '
                           'Student-t innovations are fit on the initial '
                           'window and the lowest BIC is kept.')

    def getConfigValues(self):
        values = ProtBayesRiskBase.getConfigValues(self)
        values.update({'initialEnd': self.initialEnd.get(),
                       'refitInterval': self.refitInterval.get(),
                       'useDlm': self.useDlm.get(),
                       'useGarch': self.useGarch.get(),
                       'dlmLikelihood': INNOVATIONS[self.dlmLikelihood.get()],
                       'mcmcDraws': self.mcmcDraws.get()})
        return values

    # -------------------------- INSERT steps functions -----------------------
    def _insertAllSteps(self):
        self._failedRefits = []
        plan = harness.volPlan(self.getConfig())

        selectId = self._insertFunctionStep(self.selectGarchStep,
                                            prerequisites=[])
        fitIds = [self._insertFunctionStep(self.fitRefitStep, str(d),
                                           prerequisites=[selectId])
                  for d in plan.refitDates]
        foldId = self._insertFunctionStep(self.forecastStep,
                                          prerequisites=fitIds)
        self._insertFunctionStep(self.createOutputStep, prerequisites=[foldId])

    # --------------------------- STEPS functions -----------------------------
    def _getRefitPath(self, *paths):
        return self._getExtraPath('refits', *paths)

    def selectGarchStep(self):
        path.makePath(self._getRefitPath())
        cfg = self.getConfig()
        if not cfg.useGarch:
            return
        plan = harness.volPlan(cfg)
        best, fits = harness.selectGarchSpec(
            cfg, plan.returns.before(plan.refitDates[0]).returns, EXP_VOL)
        self.info("GARCH selected by BIC: %s" % best.spec.label)
        with open(self._getRefitPath('garch_selection.pkl'), 'wb') as f:
            pickle.dump(fits, f)

    def _loadGarchFits(self):
        fn = self._getRefitPath('garch_selection.pkl')
        if not os.path.exists(fn):
            return []
        with open(fn, 'rb') as f:
            return pickle.load(f)

    def tryExceptDecorator(func):
        """ This decorator wraps the step in a try/except module which adds
        the refit date to the failed refits in case the step fails. The
        forecast fold then carries the previous fit forward. """

        def wrapper(self, refitDate):
            try:
                func(self, refitDate)
            except Exception as e:
                self.error("%s has failed for refit date %s: %s"
                           % (func.__name__, refitDate, e))
                self._failedRefits.append(refitDate)

        return wrapper

    @tryExceptDecorator
    def fitRefitStep(self, refitDate):
        cfg = self.getConfig()
        plan = harness.volPlan(cfg)
        fits = self._loadGarchFits()
        spec = pickByBic(fits).spec if fits else None
        jobs = harness.volRefitJobs(cfg, plan, toDate(refitDate),
                                    spec)
        outcomes = [harness.executeRefit(job) for job in jobs]
        for outcome in outcomes:
            if outcome.ok:
                self.info("%s refit on %s done" % (outcome.model, refitDate))
            else:
                self.error("%s refit on %s: %s" % (outcome.model, refitDate,
                                                   outcome.error))
        with open(self._getRefitPath('%s.pkl' % refitDate), 'wb') as f:
            pickle.dump(outcomes, f)

    def forecastStep(self):
        cfg = self.getConfig()
        plan = harness.volPlan(cfg)
        outcomes = []
        for d in plan.refitDates:
            fn = self._getRefitPath('%s.pkl' % d)
            if str(d) in self._failedRefits or not os.path.exists(fn):
                self.info("No fit for refit date %s, carrying forward" % d)
                continue
            with open(fn, 'rb') as f:
                outcomes.extend(pickle.load(f))
        result = harness.foldVolForecasts(cfg, plan, outcomes,
                                          self._loadGarchFits())
        self.emit(result)

    # --------------------------- INFO functions ------------------------------
    def _validate(self):
        validateMsgs = ProtBayesRiskBase._validate(self)
        if not (self.useDlm.get() or self.useGarch.get()):
            validateMsgs.append("Select at least one model.")
        if self.mcmcDraws.get() < MIN_MCMC_DRAWS:
            validateMsgs.append("At least %d posterior draws are needed."
                                % MIN_MCMC_DRAWS)
        return validateMsgs

    def _methods(self):
        methods = []
        if self.RiskReport:
            methods.append("Next day log realized volatility (%d day window) "
                           "was forecast after %s with models refit every %d "
                           "month(s) on all data available before the refit "
                           "date." % (RV_WINDOW, self.initialEnd.get(),
                                      self.refitInterval.get()))
        return methods

    def _citations(self):
        return ['West1997', 'Bollerslev1986', 'Gneiting2007']
