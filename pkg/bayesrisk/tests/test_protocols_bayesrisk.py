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

from pyworkflow.tests import *

from ..constants import *
from ..protocols import *
from . import writeSyntheticPrices, syntheticTransactions, writeTransactionFile


class TestBayesRiskBase(BaseTest):
    @classmethod
    def setUpClass(cls):
        setupTestProject(cls)
        setupTestOutput(cls)
        cls.pricesPath = writeSyntheticPrices(cls.getOutputPath('prices.csv'),
                                              n=700, seed=41)
        cls.transactionsPath = writeTransactionFile(
            cls.getOutputPath('transactions.csv'),
            syntheticTransactions(2000, prevalence=0.1, seed=42))

    @classmethod
    def _runVolForecast(cls, initialEnd, mcmcDraws, useGarch=True):
        cls.protVol = cls.newProtocol(ProtBayesRiskVolForecast,
                                      pricesPath=cls.pricesPath,
                                      initialEnd=initialEnd,
                                      mcmcDraws=mcmcDraws,
                                      useGarch=useGarch,
                                      charts=False)
        cls.launchProtocol(cls.protVol)
        return cls.protVol

    @classmethod
    def _runVarBacktest(cls, varTestStart, varTestEnd, varLevel):
        cls.protVar = cls.newProtocol(ProtBayesRiskVarBacktest,
                                      pricesPath=cls.pricesPath,
                                      varTestStart=varTestStart,
                                      varTestEnd=varTestEnd,
                                      varLevel=varLevel)
        cls.launchProtocol(cls.protVar)
        return cls.protVar

    @classmethod
    def _runFraud(cls, logitDraws, fprCap):
        cls.protFraud = cls.newProtocol(ProtBayesRiskFraud,
                                        transactionsPath=cls.transactionsPath,
                                        logitDraws=logitDraws,
                                        fprCap=fprCap)
        cls.launchProtocol(cls.protFraud)
        return cls.protFraud

    @classmethod
    def _runCompliance(cls, nParticles, holdoutFraction):
        cls.protCompliance = cls.newProtocol(ProtBayesRiskCompliance,
                                             pricesPath=cls.pricesPath,
                                             nParticles=nParticles,
                                             holdoutFraction=holdoutFraction)
        cls.launchProtocol(cls.protCompliance)
        return cls.protCompliance


class TestBayesRiskWorkflow(TestBayesRiskBase):
    @classmethod
    def setUpClass(cls):
        TestBayesRiskBase.setUpClass()

        cls.protVol = cls._runVolForecast(initialEnd='2017-07-31',
                                          mcmcDraws=MIN_MCMC_DRAWS)

        cls.protVar = cls._runVarBacktest(varTestStart='2017-03-01',
                                          varTestEnd='2017-08-31',
                                          varLevel=0.05)

        cls.protFraud = cls._runFraud(logitDraws=200, fprCap=0.02)

        cls.protCompliance = cls._runCompliance(nParticles=MIN_PARTICLES,
                                                holdoutFraction=0.2)

    def _checkReport(self, prot, experiment, models):
        report = getattr(prot, 'RiskReport', None)
        self.assertIsNotNone(report)
        self.assertEqual(report.getExperiment(), experiment)
        self.assertTrue(os.path.exists(report.getReportFile()))
        self.assertEqual(set(report.getMetrics()), set(models))
        return report

    def test_volForecastOutput(self):
        report = self._checkReport(self.protVol, EXP_VOL,
                                   [MODEL_DLM, MODEL_GARCH])
        self.assertGreater(report.getMetric(MODEL_DLM, 'n'), 0)
        for fn in (FORECASTS_FILE, AUDIT_FILE, GARCH_FITS_FILE, DRAWS_FILE):
            self.assertTrue(os.path.exists(self.protVol.getExperimentPath(fn)))

    def test_varBacktestOutput(self):
        report = self._checkReport(self.protVar, EXP_VAR,
                                   [MODEL_DLM, MODEL_GARCH])
        T = report.getMetric(MODEL_DLM, 'T')
        self.assertEqual(T, report.getMetric(MODEL_GARCH, 'T'))
        self.assertTrue(0 <= report.getMetric(MODEL_DLM, 'N') <= T)
        self.assertTrue(os.path.exists(self.protVar.getExperimentPath(VAR_CHART)))

    def test_fraudOutput(self):
        report = self._checkReport(self.protFraud, EXP_FRAUD,
                                   [MODEL_BAYES_LOGIT, MODEL_LOGISTIC])
        self.assertGreater(report.getMetric(MODEL_BAYES_LOGIT, 'auc'), 0.9)
        self.assertTrue(os.path.exists(
            self.protFraud.getExperimentPath(POSTERIOR_FILE)))

    def test_complianceOutput(self):
        report = self._checkReport(self.protCompliance, EXP_COMPLIANCE,
                                   [MODEL_PARTICLE, MODEL_LOGISTIC,
                                    MODEL_FREQUENCY])
        self.assertLessEqual(report.getMetric(MODEL_PARTICLE, 'brier'), 1.0)
        self.assertTrue(os.path.exists(
            self.protCompliance.getExperimentPath(TRAJECTORY_FILE)))
