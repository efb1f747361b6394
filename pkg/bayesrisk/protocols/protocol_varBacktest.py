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

import pyworkflow.protocol.params as params

from ..constants import *
from .protocol_base import ProtBayesRiskBase


class ProtBayesRiskVarBacktest(ProtBayesRiskBase):
    """
    One day Value-at-Risk backtest of the discount factor DLM and the BIC
    selected GARCH model with Kupiec, Christoffersen and conditional
    coverage tests and Wilson intervals of the exceedance rate.
    """

    _label = 'VaR backtest'
    _experiment = EXP_VAR

    # -------------------------- DEFINE param functions -----------------------
    def _defineDataParams(self, form):
        ProtBayesRiskBase._defineDataParams(self, form)

        form.addParam('varTestStart',
                      params.StringParam,
                      default=VAR_TEST_START,
                      label='First test date',
                      help='Trading days from this date on are scored; '
                           'everything before it is training data.')

        form.addParam('varTestEnd',
                      params.StringParam,
                      default=VAR_TEST_END,
                      label='Last test date')

    def _defineModelParams(self, form):
        form.addParam('varLevel',
                      params.FloatParam,
                      default=VAR_LEVEL,
                      label='VaR level',
                      help='Lower tail probability, 0.05 for a 95% VaR.')

        form.addParam('discountDelta',
                      params.FloatParam,
                      default=DISCOUNT_DELTA,
                      expertLevel=params.LEVEL_ADVANCED,
                      label='State discount factor')

        form.addParam('discountBeta',
                      params.FloatParam,
                      default=DISCOUNT_BETA,
                      expertLevel=params.LEVEL_ADVANCED,
                      label='Variance discount factor')

    def getConfigValues(self):
        values = ProtBayesRiskBase.getConfigValues(self)
        values.update({'varTestStart': self.varTestStart.get(),
                       'varTestEnd': self.varTestEnd.get(),
                       'varLevel': self.varLevel.get(),
                       'discountDelta': self.discountDelta.get(),
                       'discountBeta': self.discountBeta.get()})
        return values

    # --------------------------- INFO functions ------------------------------
    def _validate(self):
        validateMsgs = ProtBayesRiskBase._validate(self)
        if not 0 < self.varLevel.get() < 0.5:
            validateMsgs.append("VaR level must lie in (0, 0.5).")
        for name in ('discountDelta', 'discountBeta'):
            if not 0 < getattr(self, name).get() <= 1:
                validateMsgs.append("Discount factors must lie in (0, 1].")
        return validateMsgs

    def _methods(self):
        methods = []
        if self.RiskReport:
            methods.append("%d%% one day VaR was backtested from %s to %s."
                           % (round(100 * (1 - self.varLevel.get())),
                              self.varTestStart.get(), self.varTestEnd.get()))
        return methods

    def _citations(self):
        return ['West1997', 'Bollerslev1986', 'Kupiec1995',
                'Christoffersen1998', 'Wilson1927']
