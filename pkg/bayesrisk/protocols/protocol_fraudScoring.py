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

import pyworkflow.protocol.params as params

from .. import Plugin
from ..constants import *
from .protocol_base import ProtBayesRiskBase


class ProtBayesRiskFraud(ProtBayesRiskBase):
    """
    Bayesian logistic regression (Laplace approximation) for card fraud,
    trained on the first 70% of the transactions in time order, threshold
    tuned on the next 15% at a false positive rate cap and scored on the
    last 15%.
    """

    _label = 'Fraud scoring'
    _experiment = EXP_FRAUD

    # -------------------------- DEFINE param functions -----------------------
    def _defineDataParams(self, form):
        form.addParam('transactionsPath',
                      params.PathParam,
                      default=Plugin.getTransactionsPath(),
                      important=True,
                      label='Transaction file',
                      help='Columns Time, V1..V28, Amount, Class in time '
                           'order.')

    def _defineModelParams(self, form):
        form.addParam('logitPriorSd',
                      params.FloatParam,
                      default=LOGIT_PRIOR_SD,
                      label='Coefficient prior sd',
                      help='Gaussian prior sd of the standardized '
                           'coefficients. The intercept prior sd is %s.'
                           % LOGIT_INTERCEPT_SD)

        form.addParam('logitDraws',
                      params.IntParam,
                      default=1000,
                      label='Posterior draws')

        form.addParam('fprCap',
                      params.FloatParam,
                      default=FPR_CAP,
                      label='False positive rate cap')

    def getConfigValues(self):
        return {'transactionsPath': self.transactionsPath.get(),
                'seed': self.seed.get(),
                'charts': self.charts.get(),
                'logitPriorSd': self.logitPriorSd.get(),
                'logitDraws': self.logitDraws.get(),
                'fprCap': self.fprCap.get()}

    # --------------------------- INFO functions ------------------------------
    def _validate(self):
        validateMsgs = []
        if not os.path.exists(self.transactionsPath.get()):
            validateMsgs.append("Transaction file %s not found"
                                % self.transactionsPath.get())
        if not 0 < self.fprCap.get() < 1:
            validateMsgs.append("The false positive rate cap must lie in "
                                "(0, 1).")
        return validateMsgs

    def _methods(self):
        methods = []
        if self.RiskReport:
            methods.append("Fraud probabilities were averaged over %d draws "
                           "of a Laplace approximated logistic posterior; the "
                           "decision threshold was frozen on the validation "
                           "block at %.0f%% false positive rate."
                           % (self.logitDraws.get(), 100 * self.fprCap.get()))
        return methods
