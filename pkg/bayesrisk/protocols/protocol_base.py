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

from pyworkflow import BETA
import pyworkflow.protocol.params as params
from pwem.protocols import EMProtocol

from .. import Plugin, harness, utils
from ..cli import emitReport
from ..constants import *
from ..objects import RiskReport

OUTPUT_REPORT_NAME = "RiskReport"


class ProtBayesRiskBase(EMProtocol):
    """
    Base class with the form sections and output handling shared by the
    bayesrisk experiment protocols.
    """
    _experiment = None
    _devStatus = BETA
    _possibleOutputs = {OUTPUT_REPORT_NAME: RiskReport}

    def __init__(self, **args):
        EMProtocol.__init__(self, **args)
        self.RiskReport = None

    # -------------------------- DEFINE param functions -----------------------
    def _defineParams(self, form):
        form.addSection('Input')
        self._defineDataParams(form)

        form.addParam('seed',
                      params.IntParam,
                      default=DEFAULT_SEED,
                      label='Random seed',
                      help='Master seed. Every sampler, refit and bootstrap '
                           'draws from a stream derived from it, so a rerun '
                           'reproduces the output files.')

        form.addSection('Model')
        self._defineModelParams(form)

        form.addParam('charts',
                      params.BooleanParam,
                      default=True,
                      expertLevel=params.LEVEL_ADVANCED,
                      label='Write SVG charts?')

    def _defineDataParams(self, form):
        form.addParam('pricesPath',
                      params.PathParam,
                      default=Plugin.getPricesPath(),
                      important=True,
                      label='Daily price file',
                      help='Delimited file with a header line, one row per '
                           'trading day, with date and close columns.')

        form.addParam('priceColumn',
                      params.StringParam,
                      default='close',
                      expertLevel=params.LEVEL_ADVANCED,
                      label='Price column',
                      help='Use adj_close for adjusted prices when the file '
                           'has that column.')

        form.addParam('trainStart',
                      params.StringParam,
                      default=TRAIN_START,
                      label='First date used')

    def _defineModelParams(self, form):
        pass

    def getConfigValues(self):
        """ Form values as ExperimentConfig fields. Subclasses extend it. """
        return {'pricesPath': self.pricesPath.get(),
                'priceColumn': self.priceColumn.get(),
                'trainStart': self.trainStart.get(),
                'seed': self.seed.get(),
                'charts': self.charts.get()}

    def getConfig(self):
        values = self.getConfigValues()
        values.update({'experiment': self._experiment,
                       'outDir': self._getExtraPath()})
        return harness.ExperimentConfig(**values)

    def getExperimentPath(self, *paths):
        return self._getExtraPath(self._experiment, *paths)

    # -------------------------- INSERT steps functions -----------------------
    def _insertAllSteps(self):
        self._insertFunctionStep(self.runExperimentStep)
        self._insertFunctionStep(self.createOutputStep)

    # --------------------------- STEPS functions -----------------------------
    def runExperimentStep(self):
        cfg = self.getConfig()
        self.info("Running %s with seed %d" % (self._experiment, cfg.seed))
        self.emit(harness.runExperiment(cfg))

    def emit(self, result):
        for path in emitReport(result, self._getExtraPath()):
            self.info("Written %s" % path)

    def createOutputStep(self):
        reportFile = self.getExperimentPath(REPORT_FILE)
        report = utils.readJson(reportFile)
        output = RiskReport(experiment=self._experiment, reportFile=reportFile,
                            metrics=report.get('metrics', {}))
        self._defineOutputs(**{OUTPUT_REPORT_NAME: output})

    # --------------------------- INFO functions ------------------------------
    def _validate(self):
        validateMsgs = []
        if hasattr(self, 'pricesPath') and not os.path.exists(self.pricesPath.get()):
            validateMsgs.append("Price file %s not found" % self.pricesPath.get())
        return validateMsgs

    def _summary(self):
        summary = []
        if self.RiskReport:
            for model, values in sorted(self.RiskReport.getMetrics().items()):
                summary.append("%s: %s" % (model, ", ".join(
                    "%s=%s" % (k, self._format(v))
                    for k, v in sorted(values.items()))))
        else:
            summary.append("Output not ready yet.")
        return summary

    @staticmethod
    def _format(value):
        return "%.4f" % value if isinstance(value, float) else str(value)

    def _citations(self):
        return ['West1997']
