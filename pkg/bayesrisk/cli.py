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
"""
Command line entry point.

    bayesrisk <subcommand> [--config FILE] [--out DIR] [--seed N]
                           [--set key=value ...] [-v]

Exit codes: 0 success, 1 usage error, 2 data error, 3 numerical failure.
Diagnostics go to standard error, results to files under <out>/<experiment>.
"""
import argparse
import glob
import json
import logging
import math
import os
import signal
import sys

import numpy as np

from . import Plugin, __version__
from .constants import *
from .errors import BayesRiskError, UsageError, InvalidParameter
from . import harness
from . import metrics
from . import marketdata as md
from . import fraud
from . import stream
from . import utils

logger = logging.getLogger(__name__)

LOG_FORMAT = '%(levelname)s %(name)s: %(message)s'
SUMMARY_HEADER = ['experiment', 'model', 'metric', 'value']
COEFFICIENTS_HEADER = ['feature', 'mean', 'sd', 'lo94', 'hi94']
ROC_HEADER = ['model', 'fpr', 'tpr', 'threshold']


class _ArgumentParser(argparse.ArgumentParser):
    """ Usage problems become UsageError instead of exiting. """

    def error(self, message):
        raise UsageError("%s\n%s" % (message, self.format_usage().strip()))


def buildParser():
    parser = _ArgumentParser(prog='bayesrisk',
                             description='Bayesian financial risk experiments')
    parser.add_argument('--version', action='version',
                        version='%(prog)s ' + __version__)

    common = argparse.ArgumentParser(add_help=False)
    common.add_argument('--config', help='key=value config file with a '
                                         '[bayesrisk] section')
    common.add_argument('--out', help='output root (default $%s)'
                                      % BAYESRISK_OUT)
    common.add_argument('--seed', type=int, help='master seed')
    common.add_argument('--set', action='append', default=[], metavar='KEY=VALUE',
                        dest='overrides', help='override one config key')
    common.add_argument('-v', '--verbose', action='store_true',
                        help='debug logging')

    sub = parser.add_subparsers(dest='command', metavar='subcommand',
                                parser_class=_ArgumentParser)
    sub.required = True
    for name, text in ((EXP_INGEST, 'load prices, write returns and '
                                     'realized volatility'),
                       (EXP_VOL, 'rolling origin volatility forecasts'),
                       (EXP_VAR, 'VaR backtest over the test span'),
                       (EXP_FRAUD, 'chronological fraud experiment'),
                       (EXP_COMPLIANCE, 'compliance risk particle filter'),
                       (EXP_REPORT, 'collect every report.json into a summary')):
        sub.add_parser(name, parents=[common], help=text)

    p = sub.add_parser(EXP_STREAM, parents=[common],
                       help='score newline delimited JSON records')
    p.add_argument('--posterior', help='posterior.json written by the fraud '
                                       'experiment (default <out>/fraud/)')
    p.add_argument('--threshold', type=float,
                   help='decision threshold when the posterior has none')
    p.add_argument('--input', default='-', help='record file, - for stdin')
    p.add_argument('--output', default='-', help='event file, - for stdout')
    p.add_argument('--batch-size', type=int, default=STREAM_BATCH)
    p.add_argument('--replay', action='store_true',
                   help='deterministic replay of --input')
    p.add_argument('--speedup', type=float, default=math.inf,
                   help='replay pacing divisor, inf for no pacing')
    p.add_argument('--socket', metavar='HOST:PORT',
                   help='serve one TCP connection instead of stdin/stdout')
    p.add_argument('--make-replay', metavar='PATH',
                   help='write the test partition of the transaction file as '
                        'stream records and exit')
    return parser


def setupLogging(verbose=False):
    logging.basicConfig(stream=sys.stderr, format=LOG_FORMAT, force=True,
                        level=logging.DEBUG if verbose else logging.INFO)


def configFromArgs(args):
    defaults = {'experiment': args.command,
                'outDir': Plugin.getOutputRoot(),
                'pricesPath': Plugin.getPricesPath(),
                'transactionsPath': Plugin.getTransactionsPath()}
    cfg = harness.loadConfig(args.config, args.overrides, **defaults)
    cfg.experiment = args.command
    if args.out:
        cfg.outDir = args.out
    if args.seed is not None:
        cfg.seed = args.seed
    return cfg


# ----------------- Report emission -------------------------------------------

def metricRows(result):
    rows = []
    for model, values in result.metrics.items():
        for metric, value in values.items():
            if isinstance(value, (int, float, np.integer, np.floating)):
                rows.append([model, metric, float(value)])
    return rows


def _emitIngest(result, outDir):
    r, v = result.returns, result.vol
    return [utils.writeTable(os.path.join(outDir, RETURNS_FILE),
                             ['date', 'r'], zip(map(str, r.dates), r.returns),
                             precision=10),
            utils.writeTable(os.path.join(outDir, VOL_FILE), ['date', 'rv', 'y'],
                             zip(map(str, v.dates), v.rv, v.y), precision=8)]


def _emitVol(result, outDir):
    cfg = result.config
    rows = []
    for model, records in result.records.items():
        for rec in records:
            lo, hi = rec.predictive.interval(cfg.intervalMass)
            rows.append([str(rec.date), float(rec.predictive.mean()), float(lo),
                         float(hi), rec.actual, model])
    files = [utils.writeTable(os.path.join(outDir, FORECASTS_FILE),
                              FORECAST_HEADER, rows),
             result.audit.write(os.path.join(outDir, AUDIT_FILE)),
             utils.writeTable(os.path.join(outDir, GARCH_FITS_FILE),
                              GARCH_FITS_HEADER,
                              [f.row() for f in result.garchFits])]
    draws = result.draws
    files.append(utils.writeTable(os.path.join(outDir, DRAWS_FILE), DRAWS_HEADER,
                                  [] if draws is None else
                                  zip(draws.taus, draws.sigmas), precision=8))
    if cfg.charts:
        dlmRows = [row for row in rows if row[-1] == MODEL_DLM]
        columns = list(zip(*dlmRows)) if dlmRows else [[]] * 5
        files.append(utils.plotForecastBand(
            os.path.join(outDir, FORECAST_CHART), columns[0], columns[1],
            columns[2], columns[3], columns[4], 'DLM one step ahead log RV'))
    return files


def _emitVar(result, outDir):
    files = [utils.writeTable(os.path.join(outDir, BACKTEST_FILE),
                              BACKTEST_HEADER,
                              [rep.row(model) for model, rep in
                               result.reports.items()]),
             result.audit.write(os.path.join(outDir, AUDIT_FILE))]
    if result.config.charts and result.dates is not None:
        files.append(utils.plotVarExceedances(
            os.path.join(outDir, VAR_CHART), result.dates, result.returns,
            result.var))
    return files


def _emitFraud(result, outDir):
    policy = result.policy
    cases = result.testCases
    files = [utils.writeTable(os.path.join(outDir, SCORES_FILE), SCORES_HEADER,
                              [[int(i), float(s), int(policy.flag(s))]
                               for i, s in zip(result.rowIds, cases.scores)],
                              precision=8),
             utils.writeTable(os.path.join(outDir, COEFFICIENTS_FILE),
                              COEFFICIENTS_HEADER,
                              [[c['feature'], c['mean'], c['sd'], c['lo'],
                                c['hi']] for c in result.coefficients])]
    curves = {}
    rocRows = []
    for model, c in ((MODEL_BAYES_LOGIT, cases),
                     (MODEL_LOGISTIC, result.baselineCases)):
        fpr, tpr, thresholds = metrics.rocCurve(c)
        curves[model] = (fpr, tpr)
        rocRows.extend([model, a, b, t] for a, b, t in zip(fpr, tpr, thresholds))
    files.append(utils.writeTable(os.path.join(outDir, ROC_FILE), ROC_HEADER,
                                  rocRows))
    path = os.path.join(outDir, POSTERIOR_FILE)
    fraud.writePosterior(result.posterior, path, policy)
    files.append(path)
    if result.config.charts:
        files.append(utils.plotRoc(os.path.join(outDir, ROC_CHART), curves))
    return files


def _emitCompliance(result, outDir):
    run = result.run
    files = [utils.writeTable(os.path.join(outDir, TRAJECTORY_FILE),
                              TRAJECTORY_HEADER, run.rows())]
    if result.config.charts:
        files.append(utils.plotTrajectories(
            os.path.join(outDir, TRAJECTORY_CHART), run.dates, run.alphaMeans,
            run.betaMeans, run.alphaBands, run.betaBands))
    return files


EMITTERS = {
    harness.IngestResult: _emitIngest,
    harness.VolResult: _emitVol,
    harness.VarResult: _emitVar,
    harness.FraudResult: _emitFraud,
    harness.ComplianceResult: _emitCompliance,
}


def emitReport(result, outRoot):
    """ This method writes every file of an experiment result under
    outRoot/<experiment>: the per table delimited files, metrics.csv,
    report.json and, unless disabled, the SVG charts.

    :returns: list of written paths
    """
    outDir = utils.experimentDir(outRoot, result.experiment)
    files = EMITTERS[type(result)](result, outDir)
    files.append(utils.writeTable(os.path.join(outDir, METRICS_FILE),
                                  METRICS_HEADER, metricRows(result)))
    files.append(utils.writeJson(os.path.join(outDir, REPORT_FILE),
                                 result.toReport()))
    logger.info("%s: wrote %d files to %s", result.experiment, len(files),
                outDir)
    return files


def collectReports(outRoot):
    """ Gather the metrics of every <outRoot>/*/report.json into
    summary.csv and summary.json at outRoot. """
    reports = {}
    rows = []
    for path in sorted(glob.glob(os.path.join(outRoot, '*', REPORT_FILE))):
        report = utils.readJson(path)
        experiment = report.get('experiment',
                                os.path.basename(os.path.dirname(path)))
        reports[experiment] = report.get('metrics', {})
        for model, values in sorted(reports[experiment].items()):
            for metric, value in sorted(values.items()):
                if isinstance(value, (int, float)) and not isinstance(value, bool):
                    rows.append([experiment, model, metric, float(value)])
    utils.experimentDir(outRoot, '')
    return [utils.writeTable(os.path.join(outRoot, SUMMARY_FILE),
                             SUMMARY_HEADER, rows),
            utils.writeJson(os.path.join(outRoot, SUMMARY_JSON), reports)]


# ----------------- Subcommands -----------------------------------------------

def _terminate(signum, frame):
    raise KeyboardInterrupt


def runStream(args, cfg):
    if args.make_replay:
        tx = md.loadTransactions(cfg.transactionsPath)
        train, valid, test = md.chronoSplit(tx, cfg.fractions)
        stream.writeReplayFile(test, args.make_replay,
                               firstId=len(train) + len(valid))
        print(args.make_replay)
        return

    postPath = args.posterior or os.path.join(cfg.outDir, EXP_FRAUD,
                                              POSTERIOR_FILE)
    posterior, policy = fraud.readPosterior(postPath)
    if args.threshold is not None:
        policy = fraud.DecisionPolicy(args.threshold, cfg.fprCap)
    if policy is None:
        raise InvalidParameter("%s holds no threshold, pass --threshold"
                               % postPath)

    signal.signal(signal.SIGTERM, _terminate)
    sink = sys.stdout if args.output == '-' else open(args.output, 'w')
    try:
        if args.socket:
            host, _, port = args.socket.rpartition(':')
            summary = stream.serveSocket(host or '127.0.0.1', int(port),
                                         posterior, policy, args.batch_size,
                                         cfg.seed)
        elif args.replay:
            if args.input == '-':
                raise InvalidParameter("--replay needs an --input file")
            summary = stream.replayFile(args.input, sink, posterior, policy,
                                        args.speedup, args.batch_size, cfg.seed)
        else:
            source = sys.stdin if args.input == '-' else open(args.input)
            with source:
                summary = stream.serve(source, sink, posterior, policy,
                                       args.batch_size, seed=cfg.seed)
    finally:
        if sink is not sys.stdout:
            sink.close()
    sys.stderr.write(json.dumps(utils.jsonSafe(summary.toDict())) + '\n')


def dispatch(argv):
    """ Run one subcommand and map failures to exit codes. """
    try:
        args = buildParser().parse_args(argv)
    except UsageError as e:
        sys.stderr.write("bayesrisk: %s\n" % e)
        return EXIT_USAGE

    setupLogging(args.verbose)
    try:
        cfg = configFromArgs(args)
        if args.command == EXP_REPORT:
            for path in collectReports(cfg.outDir):
                print(path)
        elif args.command == EXP_STREAM:
            runStream(args, cfg)
        else:
            result = harness.runExperiment(cfg)
            for path in emitReport(result, cfg.outDir):
                print(path)
    except BayesRiskError as e:
        logger.error("%s: %s", type(e).__name__, e)
        return e.exitCode
    except KeyboardInterrupt:
        logger.error("Interrupted")
        return EXIT_USAGE
    return EXIT_OK


def main():
    sys.exit(dispatch(sys.argv[1:]))


if __name__ == '__main__':
    main()
