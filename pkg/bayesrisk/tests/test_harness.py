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

import io
import os
import unittest

import numpy as np
import pandas as pd

from pyworkflow.tests import BaseTest, setupTestOutput

from ..constants import *
from ..errors import (InvalidParameter, UnknownConfigKey, LeakageDetected,
                      SpanNotCovered, TooShort)
from ..harness import (ExperimentConfig, loadConfig, parseOverrides,
                       carryForward, checkLeakage, checkAuditLeakage,
                       RefitOutcome, runExperiment, volPlan)
from ..marketdata import loadTransactions, chronoSplit
from ..metrics import ForecastRecord
from ..stream import replayFile, writeReplayFile
from ..utils import AuditLog
from . import writeSyntheticPrices, syntheticTransactions, writeTransactionFile


class TestConfig(BaseTest):

    @classmethod
    def setUpClass(cls):
        setupTestOutput(cls)

    def _write(self, name, text):
        path = self.getOutputPath(name)
        with open(path, 'w') as f:
            f.write(text)
        return path

    def test_fileThenOverrides(self):
        path = self._write('good.ini', "[bayesrisk]\nseed = 7\n"
                                       "charts = no\nvarLevel = 0.01\n")
        cfg = loadConfig(path, ['seed=9'], experiment=EXP_VAR)
        self.assertEqual(cfg.experiment, EXP_VAR)
        self.assertEqual(cfg.seed, 9)
        self.assertFalse(cfg.charts)
        self.assertEqual(cfg.varLevel, 0.01)
        self.assertEqual(cfg.rvWindow, RV_WINDOW)

    def test_unknownKey(self):
        path = self._write('typo.ini', "[bayesrisk]\nsed = 7\n")
        with self.assertRaises(UnknownConfigKey) as ctx:
            loadConfig(path)
        self.assertEqual(ctx.exception.key, 'sed')
        self.assertIn('seed', ctx.exception.validKeys)
        with self.assertRaises(UnknownConfigKey):
            loadConfig(overrides=['particles=10'])

    def test_unknownSection(self):
        path = self._write('section.ini', "[other]\nseed = 7\n")
        with self.assertRaises(UnknownConfigKey):
            loadConfig(path)

    def test_badValues(self):
        with self.assertRaises(InvalidParameter):
            loadConfig(overrides=['seed=seven'])
        with self.assertRaises(InvalidParameter):
            loadConfig(overrides=['charts=maybe'])
        with self.assertRaises(InvalidParameter):
            parseOverrides(['seed'])
        with self.assertRaises(InvalidParameter):
            ExperimentConfig(trainStart='2020-01-01', initialEnd='2019-01-01')
        with self.assertRaises(InvalidParameter):
            ExperimentConfig(varTestStart='2020-01-01', varTestEnd='2019-01-01')
        with self.assertRaises(InvalidParameter):
            runExperiment(ExperimentConfig(experiment='nope'))

    def test_parseOverrides(self):
        self.assertEqual(parseOverrides(['a=1', ' b = x=y']),
                         {'a': '1', 'b': ' x=y'})


class TestRefitBookkeeping(BaseTest):

    def test_carryForward(self):
        d = np.array(['2021-01-01', '2021-02-01', '2021-03-01', '2021-04-01'],
                     dtype='datetime64[D]')
        outcomes = [RefitOutcome(MODEL_GARCH, d[0], None, 'failed'),
                    RefitOutcome(MODEL_GARCH, d[1], 'fitB'),
                    RefitOutcome(MODEL_GARCH, d[2], None, 'failed'),
                    RefitOutcome(MODEL_GARCH, d[3], 'fitD')]
        active = carryForward(outcomes)
        self.assertEqual(active[d[0]], (None, 'no_fit'))
        self.assertEqual(active[d[1]], ('fitB', 'ok'))
        self.assertEqual(active[d[2]], ('fitB', 'carried_forward'))
        self.assertEqual(active[d[3]], ('fitD', 'ok'))

    def test_checkLeakage(self):
        day = np.datetime64('2021-03-01')
        checkLeakage([ForecastRecord(day, None, 0.0, day - 1)])
        for consumed in (day, None):
            with self.assertRaises(LeakageDetected):
                checkLeakage([ForecastRecord(day, None, 0.0, consumed)])

    def test_checkAuditLeakage(self):
        audit = AuditLog()
        audit.record('2021-03-01', '2021-02-26', MODEL_DLM, '2021-03-01')
        checkAuditLeakage(audit)
        for consumed in ('2021-03-01', '2021-03-02', None):
            bad = AuditLog()
            bad.record('2021-03-01', consumed, MODEL_GARCH, '2021-03-01')
            with self.assertRaises(LeakageDetected):
                checkAuditLeakage(bad)


class TestExperiments(BaseTest):
    """ End to end runs on a synthetic price history of 400 business days
    from 2015-01-01 and on synthetic card transactions. """

    @classmethod
    def setUpClass(cls):
        setupTestOutput(cls)
        cls.prices = writeSyntheticPrices(cls.getOutputPath('prices.csv'),
                                          seed=21)
        cls.transactions = writeTransactionFile(
            cls.getOutputPath('transactions.csv'),
            syntheticTransactions(2000, prevalence=0.1, seed=22))

    def _config(self, experiment, **kwargs):
        values = dict(experiment=experiment, pricesPath=self.prices,
                      transactionsPath=self.transactions, charts=False,
                      trainStart='2015-01-01', initialEnd='2016-03-31',
                      varTestStart='2016-03-01', varTestEnd='2016-06-30',
                      mcmcDraws=300, crpsSamples=500, seed=5)
        values.update(kwargs)
        return ExperimentConfig(**values)

    def test_ingest(self):
        result = runExperiment(self._config(EXP_INGEST))
        self.assertEqual(result.extra['n_returns'], 399)
        self.assertEqual(result.extra['n_vol'], 399 - RV_WINDOW + 1)
        self.assertEqual(result.extra['first_date'], '2015-01-02')

    def test_volForecast(self):
        result = runExperiment(self._config(EXP_VOL))
        n = result.extra['n_targets']
        self.assertEqual(result.extra['refit_dates'][0], '2016-04-01')
        self.assertEqual(len(result.extra['refit_dates']), 4)
        for model in (MODEL_DLM, MODEL_GARCH):
            self.assertEqual(len(result.records[model]), n)
            self.assertEqual(result.metrics[model]['n'], n)
            for key in ('mae', 'rmse', 'crps', 'coverage94'):
                self.assertTrue(np.isfinite(result.metrics[model][key]))
        self.assertEqual(len(result.audit), 2 * n)
        for target, consumed, _, refit, status in result.audit.rows:
            self.assertLess(consumed, target)
            self.assertLessEqual(refit, target)
            self.assertIn(status, ('ok', 'carried_forward'))
        self.assertIn('garch_spec', result.extra)

    def test_volShortInitialWindow(self):
        with self.assertRaises(TooShort):
            volPlan(self._config(EXP_VOL, initialEnd='2015-06-30'))

    def test_varBacktest(self):
        result = runExperiment(self._config(EXP_VAR))
        T = len(pd.bdate_range('2016-03-01', '2016-06-30'))
        self.assertEqual(result.extra['T'], T)
        for model in (MODEL_DLM, MODEL_GARCH):
            self.assertEqual(len(result.var[model]), T)
            self.assertTrue(np.all(result.var[model] < 0))
            report = result.reports[model]
            self.assertEqual(report.T, T)
            self.assertTrue(0 <= report.N <= T)
        self.assertEqual(len(result.audit), 2 * T)

    def test_varSpanNotCovered(self):
        with self.assertRaises(SpanNotCovered):
            runExperiment(self._config(EXP_VAR, varTestEnd='2017-12-29'))
        with self.assertRaises(SpanNotCovered):
            runExperiment(self._config(EXP_VAR, trainStart='2014-01-01',
                                       varTestStart='2015-01-01'))

    def test_fraud(self):
        result = runExperiment(self._config(EXP_FRAUD, logitDraws=200,
                                            bootstrap=100))
        self.assertEqual(result.extra['sizes'], [1400, 300, 300])
        self.assertEqual(result.rowIds.tolist(), list(range(1700, 2000)))
        bayes = result.metrics[MODEL_BAYES_LOGIT]
        self.assertGreater(bayes['auc'], 0.9)
        self.assertTrue(0 < bayes['auc_lo'] < bayes['auc_hi'] <= 1)
        self.assertTrue(0 <= result.policy.threshold <= 1)
        self.assertEqual(result.posterior.draws.shape, (200, 31))
        self.assertEqual(result.coefficients[0]['feature'], 'intercept')

    def test_compliance(self):
        cfg = self._config(EXP_COMPLIANCE, proxyLookback=60, nParticles=1000)
        first, second = runExperiment(cfg), runExperiment(cfg)
        self.assertTrue(np.array_equal(first.run.risks, second.run.risks))
        n = first.extra['n_obs']
        self.assertEqual(n, 399 - RV_WINDOW + 1 - 60)
        self.assertEqual(first.nTrain + first.extra['n_holdout'], n)
        self.assertTrue(np.all((first.run.risks > 0) & (first.run.risks < 1)))
        for model in (MODEL_PARTICLE, MODEL_LOGISTIC, MODEL_FREQUENCY):
            self.assertIn('brier', first.metrics[model])


@unittest.skipUnless(os.environ.get(BAYESRISK_PRICES),
                     "%s does not point to a price file" % BAYESRISK_PRICES)
class TestPublicPrices(BaseTest):
    """ VaR backtest on daily S&P 500 closes over the default test span,
    2020-01-02 to 2024-12-30. """

    def test_varBacktest(self):
        result = runExperiment(ExperimentConfig(
            experiment=EXP_VAR, pricesPath=os.environ[BAYESRISK_PRICES],
            charts=False))
        self.assertEqual(result.extra['T'], 1257)
        dlm, garch = result.reports[MODEL_DLM], result.reports[MODEL_GARCH]
        self.assertEqual((dlm.T, garch.T), (1257, 1257))
        self.assertLessEqual(abs(dlm.p_hat - 0.060), 0.015)
        self.assertLessEqual(abs(garch.p_hat - 0.103), 0.02)


@unittest.skipUnless(os.environ.get(BAYESRISK_TRANSACTIONS),
                     "%s does not point to a transaction file"
                     % BAYESRISK_TRANSACTIONS)
class TestPublicTransactions(BaseTest):
    """ Fraud scoring and stream replay on the public card transaction
    dataset. """

    @classmethod
    def setUpClass(cls):
        setupTestOutput(cls)
        cls.cfg = ExperimentConfig(
            experiment=EXP_FRAUD,
            transactionsPath=os.environ[BAYESRISK_TRANSACTIONS], charts=False)
        cls.result = runExperiment(cls.cfg)

    def test_fraudScores(self):
        scores = self.result.metrics[MODEL_BAYES_LOGIT]
        self.assertGreaterEqual(scores['auc'], 0.93)
        self.assertGreaterEqual(scores['recall'], 0.75)

    def test_replayLatency(self):
        tx = loadTransactions(self.cfg.transactionsPath)
        _, _, test = chronoSplit(tx, self.cfg.fractions)
        path = writeReplayFile(test[:10000], self.getOutputPath('test.jsonl'))
        summary = replayFile(path, io.StringIO(), self.result.posterior,
                             self.result.policy, seed=self.cfg.seed)
        self.assertEqual((summary.processed, summary.malformed), (10000, 0))
        self.assertLess(summary.p99Us, 10000)
