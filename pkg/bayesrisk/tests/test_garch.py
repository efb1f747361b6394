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

import math

import numpy as np
from scipy import stats

from pyworkflow.tests import BaseTest

from ..constants import LIKELIHOOD_GAUSSIAN, LIKELIHOOD_STUDENT_T
from ..errors import (ConstraintViolated, TooShort, InvalidParameter,
                      OptimizationFailed)
from ..garch import (GarchSpec, GarchFit, garchFit, garchLoglik, garchVar,
                     garchConditionalVariance, garchLogRvPredictive,
                     garchSpecs, garchSelect, pickByBic, simulateGarch,
                     checkConstraints, _startingPoints)
from ..rng import asStream


def _fit(spec, omega, alpha, beta, nu=None, presample=1.0, bic=0.0):
    return GarchFit(spec, 0.0, omega, tuple(alpha), tuple(beta), nu, 0.0, bic,
                    1000, presample)


class TestGarchRecursion(BaseTest):

    def test_varianceRecursion(self):
        r = np.array([0.01, -0.02, 0.015, 0.0, -0.005])
        spec = GarchSpec(1, 1)
        params = [0.0, 1e-5, 0.1, 0.8]
        s2 = garchConditionalVariance(r, spec, params, presample=1e-4)
        # pre-sample squared residual and variance both equal presample
        expected = [1e-5 + 0.1 * 1e-4 + 0.8 * 1e-4]
        for value in r:
            expected.append(1e-5 + 0.1 * value ** 2 + 0.8 * expected[-1])
        self.assertEqual(len(s2), len(r) + 1)
        self.assertTrue(np.allclose(s2, expected, rtol=1e-12, atol=0))

    def test_noDynamicsIsIidGaussian(self):
        r = np.random.default_rng(11).normal(0.001, 0.02, 300)
        spec = GarchSpec(1, 1)
        expected = np.sum(stats.norm.logpdf(r, 0.001, math.sqrt(4e-4)))
        self.assertAlmostEqual(garchLoglik(r, spec, [0.001, 4e-4, 0.0, 0.0]),
                               expected, places=8)
        self.assertAlmostEqual(garchLoglik(r, GarchSpec(2, 2),
                                           [0.001, 4e-4, 0, 0, 0, 0]),
                               expected, places=8)

    def test_constraints(self):
        spec = GarchSpec(1, 1)
        with self.assertRaises(ConstraintViolated):
            checkConstraints(spec, [0.0, 1e-5, 0.5, 0.6])
        with self.assertRaises(ConstraintViolated):
            checkConstraints(spec, [0.0, -1e-5, 0.1, 0.8])
        with self.assertRaises(ConstraintViolated):
            checkConstraints(GarchSpec(1, 1, LIKELIHOOD_STUDENT_T),
                             [0.0, 1e-5, 0.1, 0.8, 1.5])
        with self.assertRaises(InvalidParameter):
            GarchSpec(3, 1)

    def test_eightCandidates(self):
        specs = garchSpecs()
        self.assertEqual(len(specs), 8)
        self.assertEqual(len(set(s.label for s in specs)), 8)

    def test_shortSeries(self):
        with self.assertRaises(TooShort):
            garchLoglik(np.ones(15) * 0.01, GarchSpec(1, 1),
                        [0.0, 1e-5, 0.1, 0.8])
        with self.assertRaises(TooShort):
            garchFit(np.random.default_rng(0).normal(size=100), GarchSpec())

    def test_zeroVariance(self):
        with self.assertRaises(OptimizationFailed):
            garchFit(np.zeros(300), GarchSpec())


class TestGarchForecasts(BaseTest):

    def test_gaussianVar(self):
        fit = _fit(GarchSpec(1, 1), 4e-5, [0.1], [0.8], presample=4e-4)
        self.assertAlmostEqual(garchVar(fit, [0.02], 0.05), -0.032897, places=5)

    def test_studentVar(self):
        fit = _fit(GarchSpec(1, 1, LIKELIHOOD_STUDENT_T), 0.1, [0.1], [0.8],
                   nu=5.0, presample=1.0)
        self.assertAlmostEqual(garchVar(fit, [1.0], 0.05), -1.5608, places=3)

    def test_logRvPredictive(self):
        fit = _fit(GarchSpec(1, 1), 4e-5, [0.1], [0.8], presample=4e-4)
        recent = np.full(29, 0.02)
        predictive = garchLogRvPredictive(fit, recent, nSamples=2000)
        # thirty returns of 2% give rv = 0.02 sqrt(252)
        self.assertAlmostEqual(predictive.median(),
                               math.log(0.02 * math.sqrt(252)), delta=0.05)
        with self.assertRaises(TooShort):
            garchLogRvPredictive(fit, recent[:10])

    def test_rowFormat(self):
        row = _fit(GarchSpec(2, 1), 1e-6, [0.05], [0.5, 0.4]).row()
        self.assertEqual(row[:3], [2, 1, LIKELIHOOD_GAUSSIAN])
        self.assertEqual(row[6], '0.500000;0.400000')
        self.assertEqual(row[7], '')

    def test_bicTies(self):
        simple = _fit(GarchSpec(1, 1), 1e-6, [0.1], [0.8], bic=10.0)
        student = _fit(GarchSpec(1, 1, LIKELIHOOD_STUDENT_T), 1e-6, [0.1],
                       [0.8], nu=8.0, bic=10.0)
        bigger = _fit(GarchSpec(2, 2), 1e-6, [0.05, 0.05], [0.4, 0.4], bic=10.0)
        self.assertIs(pickByBic([bigger, student, simple]), simple)


class TestGarchEstimation(BaseTest):

    def test_recoversGarch11(self):
        v = 1e-4
        r = simulateGarch(20000, 0.1 * v, 0.1, 0.8, seed=1)
        fit = garchFit(r, GarchSpec(1, 1), seed=2)
        self.assertTrue(0.05 <= fit.alpha[0] <= 0.15)
        self.assertTrue(0.72 <= fit.betaG[0] <= 0.88)
        self.assertAlmostEqual(fit.bic, 4 * math.log(20000) - 2 * fit.loglik)

    def test_deterministic(self):
        r = simulateGarch(1000, 1e-5, 0.1, 0.8, seed=3)
        a = garchFit(r, GarchSpec(1, 1, LIKELIHOOD_STUDENT_T), seed=4)
        b = garchFit(r, GarchSpec(1, 1, LIKELIHOOD_STUDENT_T), seed=4)
        self.assertEqual(a.params.tolist(), b.params.tolist())

    def test_fitBeatsEveryStart(self):
        r = simulateGarch(1500, 1e-5, 0.1, 0.8, seed=7)
        for spec in (GarchSpec(1, 1), GarchSpec(1, 2, LIKELIHOOD_STUDENT_T)):
            fit = garchFit(r, spec, seed=8)
            stream = asStream(8, 'garch').derive(spec.label)
            for start in _startingPoints(r, spec, stream):
                self.assertGreaterEqual(fit.loglik + 1e-6,
                                        garchLoglik(r, spec, start))

    def test_bicPenalizesLargerOrders(self):
        wins = 0
        for seed in range(10):
            r = simulateGarch(2000, 1e-5, 0.1, 0.8, seed=100 + seed)
            small = garchFit(r, GarchSpec(1, 1), seed=seed)
            large = garchFit(r, GarchSpec(2, 2), seed=seed)
            wins += large.bic >= small.bic
        self.assertGreaterEqual(wins, 8)

    def test_simulatedVarianceIsLongRun(self):
        omega, alpha, beta = 1e-5, [0.1], [0.8]
        r = simulateGarch(100000, omega, alpha, beta, seed=9)
        longRun = omega / (1 - sum(alpha) - sum(beta))
        self.assertLess(abs(np.var(r) / longRun - 1), 0.05)
        r = simulateGarch(100000, omega, [0.05, 0.05], [0.6], seed=10)
        self.assertLess(abs(np.var(r) / (omega / 0.3) - 1), 0.05)

    def test_heavyTailsSelectStudent(self):
        r = simulateGarch(3000, 1e-5, 0.08, 0.9,
                          innovation=LIKELIHOOD_STUDENT_T, nu=4.0, seed=5)
        self.assertTrue(garchSelect(r, seed=6).spec.isStudent)
