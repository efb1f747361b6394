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


class ProtBayesRiskCompliance(ProtBayesRiskBase):
    """
    Dynamic compliance risk: a particle filter over a time varying logistic
    link between volatility and proxy labels of elevated volatility, compared
    with a static logistic fit and the historical frequency on the final part
    of the timeline.
    """

    _label = 'Compliance risk'
    _experiment = EXP_COMPLIANCE

    # -------------------------- DEFINE param functions -----------------------
    def _defineModelParams(self, form):
        form.addParam('nParticles',
                      params.IntParam,
                      default=PARTICLES,
                      label='Particles')

        form.addParam('rwSdAlpha',
                      params.FloatParam,
                      default=RW_SD_ALPHA,
                      expertLevel=params.LEVEL_ADVANCED,
                      label='Random walk sd of alpha',
                      help='Daily innovation sd of the intercept.')

        form.addParam('rwSdBeta',
                      params.FloatParam,
                      default=RW_SD_BETA,
                      expertLevel=params.LEVEL_ADVANCED,
                      label='Random walk sd of beta',
                      help='Daily innovation sd of the volatility '
                           'coefficient.')

        form.addParam('proxyQuantile',
                      params.FloatParam,
                      default=PROXY_QUANTILE,
                      label='Proxy label quantile',
                      help='A day is labelled when its realized volatility '
                           'exceeds this quantile of the previous %d days.'
                           % PROXY_LOOKBACK)

        form.addParam('holdoutFraction',
                      params.FloatParam,
                      default=HOLDOUT_FRACTION,
                      label='Held out fraction')

    def getConfigValues(self):
        values = ProtBayesRiskBase.getConfigValues(self)
        values.update({'nParticles': self.nParticles.get(),
                       'rwSdAlpha': self.rwSdAlpha.get(),
                       'rwSdBeta': self.rwSdBeta.get(),
                       'proxyQuantile': self.proxyQuantile.get(),
                       'holdoutFraction': self.holdoutFraction.get()})
        return values

    # --------------------------- INFO functions ------------------------------
    def _validate(self):
        validateMsgs = ProtBayesRiskBase._validate(self)
        if self.nParticles.get() < MIN_PARTICLES:
            validateMsgs.append("At least %d particles are needed."
                                % MIN_PARTICLES)
        return validateMsgs

    def _methods(self):
        methods = []
        if self.RiskReport:
            methods.append("Compliance risk was filtered with %d particles and "
                           "evaluated on the final %.0f%% of the timeline."
                           % (self.nParticles.get(),
                              100 * self.holdoutFraction.get()))
        return methods

    def _citations(self):
        return ['Gordon1993']
