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

import json

import pyworkflow.object as pwobj
from pwem.objects import EMObject


class RiskReport(EMObject):
    """ Output of an experiment protocol: where its report.json lives and
    the headline metrics (model -> metric -> value). """

    def __init__(self, experiment=None, reportFile=None, metrics=None, **kwargs):
        EMObject.__init__(self, **kwargs)
        self._experiment = pwobj.String(experiment)
        self._reportFile = pwobj.String(reportFile)
        self._metrics = pwobj.String(json.dumps(metrics or {}, sort_keys=True))

    def getExperiment(self):
        return self._experiment.get()

    def setExperiment(self, experiment):
        self._experiment.set(experiment)

    def getReportFile(self):
        return self._reportFile.get()

    def setReportFile(self, path):
        self._reportFile.set(path)

    def getMetrics(self):
        return json.loads(self._metrics.get() or '{}')

    def setMetrics(self, metrics):
        self._metrics.set(json.dumps(metrics, sort_keys=True))

    def getMetric(self, model, metric):
        return self.getMetrics().get(model, {}).get(metric)

    def __str__(self):
        return "RiskReport (%s, %d models)" % (self.getExperiment(),
                                               len(self.getMetrics()))
