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

import itertools
import math

import numpy as np
from scipy import integrate, stats

from pyworkflow.tests import BaseTest

from ..dlm import (GaussianPredictive, StudentTPredictive, MixturePredictive,
                   EmpiricalPredictive)
from ..errors import Empty, SingleClass, TooShort, InvalidParameter
from ..metrics import (ForecastRecord, ScoredCases, maeRmse, crps,
                       intervalCoverage, forecastSummary, rocCurve, rocAuc,
                       precisionAtFpr, confusionAt, aucBootstrapInterval,
                       brier, rankCorr)


def _records(means, actuals, sd=1.0):
    dates = np.datetime64('2020-01-01') + np.arange(len(means))
    return [ForecastRecord(d, GaussianPredictive(m, sd), a)
            for d, m, a in zip(dates, means, actuals)]


class TestForecastScores(BaseTest):

    def test_maeRmse(self):
        mae, rmse = maeRmse(_records([1, 2, 3, 4, 5], [1, 1, 4, 4, 7]))
        self.assertAlmostEqual(mae, 0.8)
        self.assertAlmostEqual(rmse, math.sqrt(6 / 5))
        with self.assertRaises(Empty):
            maeRmse([])

    def test_gaussianCrps(self):
        self.assertAlmostEqual(crps(GaussianPredictive(0, 1), 0.0),
                               2 * stats.norm.pdf(0) - 1 / math.sqrt(math.pi),
                               places=12)
        self.assertAlmostEqual(crps(GaussianPredictive(0, 1), 0.0), 0.23370,
                               places=5)

    def test_studentCrpsAgainstQuadrature(self):
        t = StudentTPredictive(10, 0, 1)
        below = integrate.quad(lambda x: t.cdf(x) ** 2, -np.inf, 0)[0]
        above = integrate.quad(lambda x: (1 - t.cdf(x)) ** 2, 0, np.inf)[0]
        oracle = below + above
        self.assertLess(abs(crps(t, 0.0, seed=1) / oracle - 1), 0.02)

    def test_mixtureCrps(self):
        mix = MixturePredictive.gaussian([0.0, 0.0], [1.0, 1.0])
        self.assertLess(abs(crps(mix, 0.5, seed=2) /
                            crps(GaussianPredictive(0, 1), 0.5) - 1), 0.01)

    def test_empiricalCrpsPairTerm(self):
        samples = np.random.default_rng(3).normal(size=200)
        y = 0.3
        direct = (np.mean(np.abs(samples - y)) -
                  0.5 * np.mean(np.abs(samples[:, None] - samples[None, :])))
        self.assertAlmostEqual(crps(EmpiricalPredictive(samples), y), direct,
                               places=10)

    def test_crpsMinimizedAtMedian(self):
        grid = np.arange(-2.0, 2.0, 0.01)
        g = GaussianPredictive(0.3, 1.0)
        scores = np.array([crps(g, y) for y in grid])
        self.assertTrue(np.all(scores >= 0))
        self.assertAlmostEqual(grid[np.argmin(scores)], 0.3, delta=0.01)

        samples = np.random.default_rng(8).lognormal(0.0, 0.5, 201)
        e = EmpiricalPredictive(samples)
        grid = np.arange(0.2, 3.0, 0.01)
        scores = np.array([crps(e, y) for y in grid])
        self.assertTrue(np.all(scores >= 0))
        self.assertAlmostEqual(grid[np.argmin(scores)], np.median(samples),
                               delta=0.01)

    def test_coverage(self):
        rng = np.random.default_rng(4)
        means = rng.normal(size=10000)
        actuals = means + rng.normal(size=10000)
        coverage = intervalCoverage(_records(means, actuals), 0.94)
        self.assertTrue(0.93 <= coverage <= 0.95)

    def test_summaryIsSeeded(self):
        records = [ForecastRecord(np.datetime64('2020-01-01'),
                                  StudentTPredictive(5, 0, 1), 0.2)] * 3
        a = forecastSummary(records, seed=9)
        b = forecastSummary(records, seed=9)
        self.assertEqual(a, b)
        self.assertEqual(a['n'], 3)
        self.assertEqual(sorted(a), ['coverage94', 'crps', 'mae', 'n', 'rmse'])


class TestClassificationScores(BaseTest):

    def setUp(self):
        self.cases = ScoredCases.of([0.1, 0.4, 0.35, 0.8, 0.7, 0.2],
                                    [0, 0, 1, 1, 0, 1])

    def test_aucBruteForce(self):
        pos = self.cases.scores[self.cases.labels == 1]
        neg = self.cases.scores[self.cases.labels == 0]
        pairs = [1.0 if p > n else 0.5 if p == n else 0.0
                 for p, n in itertools.product(pos, neg)]
        self.assertAlmostEqual(rocAuc(self.cases), np.mean(pairs))
        self.assertAlmostEqual(rocAuc(self.cases), 5 / 9)

    def test_aucTiesAndSeparable(self):
        self.assertEqual(rocAuc(ScoredCases.of([0.5] * 4, [0, 1, 0, 1])), 0.5)
        self.assertEqual(rocAuc(ScoredCases.of([0.1, 0.2, 0.8, 0.9],
                                               [0, 0, 1, 1])), 1.0)

    def test_rocEnds(self):
        fpr, tpr, thresholds = rocCurve(self.cases)
        self.assertEqual((fpr[0], tpr[0]), (0.0, 0.0))
        self.assertEqual((fpr[-1], tpr[-1]), (1.0, 1.0))
        self.assertTrue(np.all(np.diff(thresholds) < 0))
        area = np.sum(np.diff(fpr) * (tpr[1:] + tpr[:-1]) / 2)
        self.assertAlmostEqual(area, rocAuc(self.cases))

    def test_precisionAtFpr(self):
        cases = ScoredCases.of([0.1, 0.2, 0.3, 0.8, 0.9], [0, 0, 0, 1, 1])
        precision, threshold = precisionAtFpr(cases, 0.05)
        self.assertEqual(precision, 1.0)
        self.assertEqual(threshold, 0.3)
        confusion = confusionAt(cases, threshold)
        self.assertEqual((confusion['tp'], confusion['fp'], confusion['fn'],
                          confusion['tn']), (2, 0, 0, 3))

    def test_randomScoresPrecisionNearPrevalence(self):
        rng = np.random.default_rng(5)
        labels = (rng.uniform(size=20000) < 0.1).astype(int)
        cases = ScoredCases.of(rng.uniform(size=20000), labels)
        precision, _ = precisionAtFpr(cases, 0.05)
        self.assertLess(abs(precision - labels.mean()), 0.05)

    def test_bootstrapInterval(self):
        rng = np.random.default_rng(6)
        labels = np.repeat([0, 1], 100)
        cases = ScoredCases.of(np.clip(rng.normal(0.4 + 0.2 * labels, 0.2),
                                       0, 1), labels)
        lo, hi = aucBootstrapInterval(cases, 200, seed=1)
        self.assertTrue(lo <= rocAuc(cases) <= hi)
        self.assertEqual((lo, hi), aucBootstrapInterval(cases, 200, seed=1))

    def test_brier(self):
        self.assertAlmostEqual(brier(ScoredCases.of([0.2] * 4, [1, 1, 0, 0])),
                               0.34)

    def test_aucMonotoneInvariance(self):
        rng = np.random.default_rng(9)
        labels = (rng.uniform(size=500) < 0.3).astype(int)
        scores = np.clip(rng.normal(0.4 + 0.2 * labels, 0.15), 0, 1)
        auc = rocAuc(ScoredCases.of(scores, labels))
        for transformed in (scores ** 3, np.sqrt(scores),
                            1 / (1 + np.exp(-10 * (scores - 0.5)))):
            self.assertAlmostEqual(rocAuc(ScoredCases.of(transformed, labels)),
                                   auc, places=12)

    def test_brierConstantPredictor(self):
        labels = np.array([1, 0, 0, 1, 0, 0, 0, 1, 0, 0])
        prevalence = labels.mean()
        for p in (0.0, 0.1, 0.3, 0.5, 0.9):
            cases = ScoredCases.of(np.full(len(labels), p), labels)
            self.assertAlmostEqual(brier(cases), prevalence * (1 - p) ** 2 +
                                   (1 - prevalence) * p ** 2, places=12)

    def test_singleClass(self):
        with self.assertRaises(SingleClass):
            rocAuc(ScoredCases.of([0.1, 0.2], [0, 0]))

    def test_scoresOutsideUnitInterval(self):
        with self.assertRaises(InvalidParameter):
            ScoredCases.of([1.5], [1])


class TestRankCorrelation(BaseTest):

    def test_spearmanBruteForce(self):
        rng = np.random.default_rng(7)
        a = rng.normal(size=20)
        b = a + rng.normal(size=20)
        d = np.argsort(np.argsort(a)) - np.argsort(np.argsort(b))
        expected = 1 - 6 * np.sum(d ** 2) / (20 * (20 ** 2 - 1))
        rho, p = rankCorr(a, b)
        self.assertAlmostEqual(rho, expected, places=12)
        self.assertTrue(0 <= p <= 1)

    def test_tooShort(self):
        with self.assertRaises(TooShort):
            rankCorr(np.arange(5), np.arange(5))
