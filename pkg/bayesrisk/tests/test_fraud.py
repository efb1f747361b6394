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

import numpy as np
from scipy import integrate, optimize
from scipy.special import expit

from pyworkflow.tests import BaseTest, setupTestOutput

from ..errors import (SingleClass, DimensionMismatch, LeakageDetected,
                      InvalidParameter)
from ..fraud import (fitMap, samplePosterior, predictProba, predictMapProba,
                     addIntercept, logPosterior, gradLogPosterior,
                     sequentialUpdate, tuneThreshold, DecisionPolicy,
                     fitStandardizer, assertTrainScope, buildFraudFeatures,
                     coefficientSummary, writePosterior, readPosterior,
                     FRAUD_FEATURES)
from ..rng import SeededStream
from . import syntheticTransactions


def _logisticData(n, weights, seed):
    stream = SeededStream(seed, 'logistic-data')
    X = stream.normal((n, len(weights) - 1))
    p = expit(weights[0] + X @ np.asarray(weights[1:]))
    return X, (stream.uniform(n) < p).astype(int)


class TestLogisticPosterior(BaseTest):

    @classmethod
    def setUpClass(cls):
        cls.X, cls.y = _logisticData(200, [-1.0, 2.0], seed=1)
        cls.post = fitMap(cls.X, cls.y)

    def test_gradientAgainstFiniteDifferences(self):
        X, y = _logisticData(40, [0.3, 1.0, -0.5, 2.0], seed=12)
        X1 = addIntercept(X)
        priorMean = np.zeros(4)
        priorPrecision = np.diag([0.01, 0.16, 0.16, 0.16])
        w = SeededStream(13, 'beta').normal(4)
        h = 1e-5
        numeric = np.array([
            (logPosterior(w + h * e, X1, y, priorMean, priorPrecision) -
             logPosterior(w - h * e, X1, y, priorMean, priorPrecision)) / (2 * h)
            for e in np.eye(4)])
        exact = gradLogPosterior(w, X1, y, priorMean, priorPrecision)
        self.assertLessEqual(np.linalg.norm(exact - numeric) /
                             np.linalg.norm(exact), 1e-5)

    def test_mapAgainstOptimizer(self):
        x, y = self.X[:, 0], self.y

        def negLogPost(w):
            eta = w[0] + w[1] * x
            return (np.sum(np.logaddexp(0, eta) - y * eta) +
                    0.5 * (w[0] ** 2 / 10.0 ** 2 + w[1] ** 2 / 2.5 ** 2))

        oracle = optimize.minimize(negLogPost, [0.0, 0.0], method='BFGS',
                                   options={'gtol': 1e-10}).x
        self.assertTrue(np.allclose(self.post.mapWeights, oracle, atol=1e-3))

    def test_drawsMatchGaussian(self):
        post = samplePosterior(self.post, 10000, seed=2)
        cov = self.post.covariance()
        se = np.sqrt(np.diag(cov) / 10000)
        self.assertTrue(np.all(np.abs(post.draws.mean(axis=0) -
                                      self.post.mapWeights) < 3 * se))
        empirical = np.cov(post.draws.T)
        self.assertLess(np.linalg.norm(empirical - cov) / np.linalg.norm(cov),
                        0.10)

    def test_predictiveAgainstQuadrature(self):
        post = samplePosterior(self.post, 20000, seed=3)
        x = np.array([0.7])
        row = np.array([1.0, 0.7])
        mu = row @ post.mapWeights
        sd = np.sqrt(row @ post.covariance() @ row)
        oracle = integrate.quad(lambda z: expit(mu + sd * z) *
                                np.exp(-z * z / 2) / np.sqrt(2 * np.pi),
                                -10, 10)[0]
        self.assertLess(abs(predictProba(post, x) - oracle), 1e-2)
        self.assertEqual(predictProba(post, np.array([[0.7], [0.1]])).shape,
                         (2,))

    def test_mapProbability(self):
        p = predictMapProba(self.post, np.array([0.0]))
        self.assertAlmostEqual(p, expit(self.post.mapWeights[0]))

    def test_singleClass(self):
        with self.assertRaises(SingleClass):
            fitMap(self.X, np.zeros(len(self.X)))

    def test_noDraws(self):
        with self.assertRaises(InvalidParameter):
            predictProba(self.post, np.array([0.0]))

    def test_dimensionChecks(self):
        post = samplePosterior(self.post, 100, seed=1)
        with self.assertRaises(DimensionMismatch):
            predictProba(post, np.array([0.0, 1.0]))
        with self.assertRaises(DimensionMismatch):
            sequentialUpdate(post, np.zeros((3, 2)), [0, 1, 0])

    def test_coefficientSummary(self):
        rows = coefficientSummary(self.post)
        self.assertEqual([r['feature'] for r in rows], ['intercept', 'x1'])
        for r in rows:
            self.assertTrue(r['lo'] < r['mean'] < r['hi'])


class TestSequentialUpdate(BaseTest):

    def test_twoBatchesMatchJointFit(self):
        X, y = _logisticData(2000, [-0.5, 1.0, -1.0, 0.5], seed=4)
        joint = fitMap(X, y)
        first = fitMap(X[:1000], y[:1000])
        updated = sequentialUpdate(first, X[1000:], y[1000:])
        self.assertLess(np.linalg.norm(updated.mapWeights - joint.mapWeights),
                        0.05)
        self.assertEqual(updated.nObs, 2000)

    def test_emptyBatch(self):
        X, y = _logisticData(300, [0.0, 1.0], seed=5)
        post = fitMap(X, y)
        self.assertIs(sequentialUpdate(post, np.zeros((0, 1)), []), post)

    def test_drawsAreRenewed(self):
        X, y = _logisticData(300, [0.0, 1.0], seed=6)
        post = samplePosterior(fitMap(X[:200], y[:200]), 500, seed=7)
        updated = sequentialUpdate(post, X[200:], y[200:])
        self.assertEqual(updated.draws.shape, (500, 2))
        again = sequentialUpdate(post, X[200:], y[200:])
        self.assertTrue(np.array_equal(updated.draws, again.draws))


class TestDecisions(BaseTest):

    def test_separable(self):
        policy = tuneThreshold([0.1, 0.2, 0.3, 0.8, 0.9], [0, 0, 0, 1, 1], 0.05)
        self.assertTrue(0.3 <= policy.threshold < 0.8)
        self.assertFalse(policy.flag(0.3))
        self.assertTrue(policy.flag(0.8))

    def test_randomScores(self):
        rng = np.random.default_rng(8)
        scores = rng.uniform(size=5000)
        labels = (rng.uniform(size=5000) < 0.2).astype(int)
        policy = tuneThreshold(scores, labels, 0.05)
        negatives = scores[labels == 0]
        self.assertLess(abs(policy.threshold - np.quantile(negatives, 0.95)),
                        0.01)
        self.assertLessEqual(np.mean(negatives > policy.threshold), 0.05)

    def test_thresholdRange(self):
        with self.assertRaises(InvalidParameter):
            DecisionPolicy(1.5)


class TestFeaturesAndPersistence(BaseTest):

    @classmethod
    def setUpClass(cls):
        setupTestOutput(cls)

    def test_features(self):
        tx = syntheticTransactions(100)
        X = buildFraudFeatures(tx)
        self.assertEqual(X.shape, (100, len(FRAUD_FEATURES)))
        self.assertTrue(np.allclose(X[:, -1], np.log1p(tx.amounts)))

    def test_standardizerDropsConstantColumns(self):
        X = np.column_stack([np.arange(10.0), np.ones(10), np.arange(10.0) ** 2])
        with self.assertLogs('bayesrisk.fraud', level='WARNING'):
            std = fitStandardizer(X, ('a', 'b', 'c'))
        self.assertEqual(std.keptNames, ('a', 'c'))
        Z = std.transform(X)
        self.assertTrue(np.allclose(Z.mean(axis=0), 0))
        self.assertTrue(np.allclose(Z.std(axis=0), 1))
        with self.assertRaises(DimensionMismatch):
            std.transform(np.zeros((2, 2)))

    def test_trainScope(self):
        std = fitStandardizer(np.arange(10.0)[:, None], ('a',),
                              fitScope='valid')
        with self.assertRaises(LeakageDetected):
            assertTrainScope(std)

    def test_posteriorFile(self):
        X, y = _logisticData(300, [0.0, 1.0, -1.0], seed=9)
        std = fitStandardizer(X, ('a', 'b'))
        post = fitMap(std.transform(X), y, featureNames=std.keptNames,
                      standardizer=std)
        post = samplePosterior(post, 200, SeededStream(10).derive('draws'))
        path = self.getOutputPath('posterior.json')
        writePosterior(post, path, DecisionPolicy(0.25, 0.05))
        loaded, policy = readPosterior(path)
        self.assertEqual(policy.threshold, 0.25)
        self.assertTrue(np.allclose(loaded.mapWeights, post.mapWeights))
        self.assertTrue(np.allclose(loaded.draws, post.draws))
        self.assertEqual(loaded.standardizer.keptNames, ('a', 'b'))
