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
Experiment orchestration: configuration, the expanding window volatility
evaluation with monthly refits, the VaR backtest, the chronological fraud
experiment and the compliance run.

Experiments return result objects; files are written by cli.emitReport.
"""
import configparser
import logging
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field, fields, asdict

import numpy as np

from .constants import *
from .errors import (BayesRiskError, UnknownConfigKey, InvalidParameter,
                     TooShort, SpanNotCovered, LeakageDetected, SingleClass,
                     IoFailure, OptimizationFailed)
from . import marketdata as md
from . import dlm
from . import garch
from . import varbacktest as vb
from . import metrics
from . import fraud
from . import compliance as comp
from .rng import SeededStream
from .utils import AuditLog

logger = logging.getLogger(__name__)

CONFIG_SECTION = 'bayesrisk'


# ----------------- Configuration ---------------------------------------------

@dataclass
class ExperimentConfig:
    """ Every knob of every experiment. Keys of the config file are these
    field names. """
    experiment: str = EXP_VOL
    pricesPath: str = DEFAULT_PRICES
    transactionsPath: str = DEFAULT_TRANSACTIONS
    outDir: str = DEFAULT_OUT
    dateColumn: str = 'date'
    priceColumn: str = 'close'
    trainStart: str = TRAIN_START
    initialEnd: str = INITIAL_END
    varTestStart: str = VAR_TEST_START
    varTestEnd: str = VAR_TEST_END
    refitInterval: int = 1
    seed: int = DEFAULT_SEED
    workers: int = 1
    charts: bool = True
    # models
    useDlm: bool = True
    useGarch: bool = True
    dlmLikelihood: str = LIKELIHOOD_GAUSSIAN
    mcmcDraws: int = DEFAULT_MCMC_DRAWS
    priorScale: float = HALF_CAUCHY_SCALE
    discountDelta: float = DISCOUNT_DELTA
    discountBeta: float = DISCOUNT_BETA
    rvWindow: int = RV_WINDOW
    varLevel: float = VAR_LEVEL
    intervalMass: float = INTERVAL_MASS
    crpsSamples: int = CRPS_SAMPLES
    # fraud
    splitTrain: float = SPLIT_FRACTIONS[0]
    splitValid: float = SPLIT_FRACTIONS[1]
    splitTest: float = SPLIT_FRACTIONS[2]
    logitPriorSd: float = LOGIT_PRIOR_SD
    logitInterceptSd: float = LOGIT_INTERCEPT_SD
    logitDraws: int = 1000
    fprCap: float = FPR_CAP
    bootstrap: int = 1000
    # compliance
    nParticles: int = PARTICLES
    rwSdAlpha: float = RW_SD_ALPHA
    rwSdBeta: float = RW_SD_BETA
    resampleTrigger: float = RESAMPLE_TRIGGER
    proxyQuantile: float = PROXY_QUANTILE
    proxyLookback: int = PROXY_LOOKBACK
    holdoutFraction: float = HOLDOUT_FRACTION

    def __post_init__(self):
        self.validate()

    def validate(self):
        try:
            start, end = md.toDate(self.trainStart), md.toDate(self.initialEnd)
            varStart, varEnd = (md.toDate(self.varTestStart),
                                md.toDate(self.varTestEnd))
        except ValueError as e:
            raise InvalidParameter("Bad date in config: %s" % e)
        if self.experiment == EXP_VOL and not start < end:
            raise InvalidParameter("trainStart %s must precede initialEnd %s"
                                   % (start, end))
        if not varStart <= varEnd:
            raise InvalidParameter("varTestStart %s is after varTestEnd %s"
                                   % (varStart, varEnd))
        if self.dlmLikelihood not in INNOVATIONS:
            raise InvalidParameter("dlmLikelihood must be one of %s"
                                   % INNOVATIONS)
        if self.workers < 1:
            raise InvalidParameter("workers must be >= 1")

    @property
    def fractions(self):
        return self.splitTrain, self.splitValid, self.splitTest

    def stream(self, label):
        return SeededStream(self.seed, label)

    def toDict(self):
        return asdict(self)


def configKeys():
    return [f.name for f in fields(ExperimentConfig)]


def _coerce(name, kind, text):
    text = text.strip()
    try:
        if kind is bool:
            states = configparser.ConfigParser.BOOLEAN_STATES
            if text.lower() not in states:
                raise ValueError("not a boolean")
            return states[text.lower()]
        if kind is int:
            return int(text)
        if kind is float:
            return float(text)
    except ValueError as e:
        raise InvalidParameter("Bad value '%s' for %s: %s" % (text, name, e))
    return text


def parseOverrides(overrides):
    """ ['key=value', ...] to a dict, keys checked later. """
    values = {}
    for item in overrides or ():
        key, sep, value = item.partition('=')
        if not sep or not key.strip():
            raise InvalidParameter("Override '%s' is not of the form "
                                   "key=value" % item)
        values[key.strip()] = value
    return values


def loadConfig(path=None, overrides=(), **defaults):
    """ This method builds an ExperimentConfig from defaults, then the
    [bayesrisk] section of the file at path, then the key=value overrides.
    Unknown keys raise UnknownConfigKey. """
    kinds = {f.name: f.type for f in fields(ExperimentConfig)}
    raw = {}

    if path:
        parser = configparser.ConfigParser(interpolation=None)
        parser.optionxform = str
        try:
            with open(path) as f:
                parser.read_file(f)
        except OSError as e:
            raise IoFailure("Cannot read config %s: %s" % (path, e))
        except configparser.Error as e:
            raise InvalidParameter("Cannot parse config %s: %s" % (path, e))
        for section in parser.sections():
            if section != CONFIG_SECTION:
                raise UnknownConfigKey("[%s]" % section, ["[%s]" % CONFIG_SECTION])
        if parser.has_section(CONFIG_SECTION):
            raw.update(parser.items(CONFIG_SECTION))

    raw.update(parseOverrides(overrides))
    values = dict(defaults)
    for key, text in raw.items():
        if key not in kinds:
            raise UnknownConfigKey(key, sorted(kinds))
        values[key] = _coerce(key, kinds[key], text)

    return ExperimentConfig(**values)


# ----------------- Shared data preparation -----------------------------------

def loadMarket(cfg):
    """ (returns, vol) from the price file, starting at trainStart. """
    prices = md.loadPrices(cfg.pricesPath, cfg.dateColumn, cfg.priceColumn)
    prices = prices.window(cfg.trainStart, None)
    returns = md.logReturns(prices)
    vol = md.realizedVolatility(returns, cfg.rvWindow)
    return returns, vol


def lastBefore(dates, target):
    """ Latest date strictly before target, None when there is none. """
    idx = np.searchsorted(dates, target, side='left') - 1
    return dates[idx] if idx >= 0 else None


def checkLeakage(records):
    """ Every record must have consumed data strictly before its target. """
    for r in records:
        if r.consumedUntil is None or not r.consumedUntil < r.date:
            raise LeakageDetected("Forecast for %s consumed data up to %s"
                                  % (r.date, r.consumedUntil))


def checkAuditLeakage(audit):
    """ Same rule over the rows of an audit log. """
    for target, consumed, model in (row[:3] for row in audit.rows):
        if consumed == 'None' or not md.toDate(consumed) < md.toDate(target):
            raise LeakageDetected("%s forecast for %s consumed data up to %s"
                                  % (model, target, consumed))


# ----------------- Refits ----------------------------------------------------

@dataclass(frozen=True)
class RefitJob:
    model: str
    refitDate: np.datetime64
    data: np.ndarray
    seed: int
    options: dict = field(default_factory=dict)


@dataclass(frozen=True)
class RefitOutcome:
    model: str
    refitDate: np.datetime64
    fit: object = None
    error: str = ''

    @property
    def ok(self):
        return self.fit is not None


def executeRefit(job):
    """ Fit one model on one refit date. Library errors are returned, not
    raised, so one bad month does not stop the run. """
    try:
        if job.model == MODEL_DLM:
            fit = dlm.metropolisHyper(job.data, job.options['priorScale'],
                                      job.options['nDraws'], job.seed,
                                      job.options['likelihood'])
        else:
            fit = garch.garchFit(job.data, job.options['spec'], job.seed)
        return RefitOutcome(job.model, job.refitDate, fit)
    except BayesRiskError as e:
        return RefitOutcome(job.model, job.refitDate, None,
                            "%s: %s" % (type(e).__name__, e))


def runRefits(jobs, workers=1):
    """ Jobs are independent; results come back in job order. """
    if workers <= 1 or len(jobs) <= 1:
        return [executeRefit(job) for job in jobs]
    with ProcessPoolExecutor(max_workers=workers) as executor:
        return list(executor.map(executeRefit, jobs))


def carryForward(outcomes):
    """ {refitDate: (fit, status)} where a failed refit reuses the previous
    successful fit. Dates before the first success map to (None, status). """
    active = {}
    previous = None
    for outcome in outcomes:
        if outcome.ok:
            previous = outcome.fit
            active[outcome.refitDate] = (previous, 'ok')
        else:
            status = 'carried_forward' if previous is not None else 'no_fit'
            logger.warning("%s refit on %s failed (%s), %s", outcome.model,
                           outcome.refitDate, outcome.error, status)
            active[outcome.refitDate] = (previous, status)
    return active


def _refitSeed(cfg, experiment, model, date):
    return cfg.stream(experiment).derive('%s-%s' % (model, date)).seed


def selectGarchSpec(cfg, r, experiment):
    """ The 8 candidate fits on r and the BIC choice. """
    seed = _refitSeed(cfg, experiment, 'garch-select', 'initial')
    jobs = [RefitJob(MODEL_GARCH, np.datetime64('NaT'), r, seed,
                     {'spec': spec}) for spec in garch.garchSpecs()]
    outcomes = runRefits(jobs, cfg.workers)
    fits = [o.fit for o in outcomes if o.ok]
    for o in outcomes:
        if not o.ok:
            logger.warning("GARCH candidate failed: %s", o.error)
    if not fits:
        raise OptimizationFailed("No GARCH candidate could be fit")
    best = garch.pickByBic(fits)
    logger.info("GARCH selected by BIC: %s", best.spec.label)
    return best, fits


# ----------------- Results ---------------------------------------------------

@dataclass
class ExperimentResult:
    experiment: str
    config: ExperimentConfig
    metrics: dict = field(default_factory=dict)
    extra: dict = field(default_factory=dict)

    def toReport(self):
        """ report.json payload. metrics maps model -> metric -> value. """
        return {'experiment': self.experiment,
                'version': _version(),
                'config': self.config.toDict(),
                'metrics': self.metrics,
                **self.extra}


def _version():
    from . import __version__
    return __version__


@dataclass
class IngestResult(ExperimentResult):
    returns: md.ReturnSeries = None
    vol: md.VolSeries = None


@dataclass
class VolResult(ExperimentResult):
    records: dict = field(default_factory=dict)
    audit: AuditLog = field(default_factory=AuditLog)
    garchFits: list = field(default_factory=list)
    draws: dlm.HyperDraws = None


@dataclass
class VarResult(ExperimentResult):
    dates: np.ndarray = None
    returns: np.ndarray = None
    var: dict = field(default_factory=dict)
    reports: dict = field(default_factory=dict)
    audit: AuditLog = field(default_factory=AuditLog)


@dataclass
class FraudResult(ExperimentResult):
    posterior: fraud.LogisticPosterior = None
    policy: fraud.DecisionPolicy = None
    rowIds: np.ndarray = None
    testCases: metrics.ScoredCases = None
    baselineCases: metrics.ScoredCases = None
    coefficients: list = field(default_factory=list)


@dataclass
class ComplianceResult(ExperimentResult):
    run: comp.ComplianceRun = None
    nTrain: int = 0


# ----------------- Experiments -----------------------------------------------

def runIngest(cfg):
    returns, vol = loadMarket(cfg)
    logger.info("Ingested %d returns and %d volatility values", len(returns),
                len(vol))
    extra = {'n_returns': len(returns), 'n_vol': len(vol),
             'first_date': str(returns.dates[0]),
             'last_date': str(returns.dates[-1])}
    return IngestResult(EXP_INGEST, cfg, {}, extra, returns, vol)


def _volForecastsDlm(cfg, vol, targets, refitDates, active, audit):
    records = []
    blocks = np.searchsorted(refitDates, targets, side='right') - 1
    for b, refitDate in enumerate(refitDates):
        block = targets[blocks == b]
        fit, status = active[refitDate]
        if fit is None:
            for t in block:
                audit.record(t, lastBefore(vol.dates, t), MODEL_DLM, refitDate,
                             status)
            continue
        train = vol.before(refitDate).y
        initMean, initVar = dlm.defaultInit(train)
        mixture = dlm.DlmMixtureFilter(fit, initMean, initVar).filter(train)
        for t in block:
            idx = int(np.searchsorted(vol.dates, t))
            consumed = vol.dates[idx - 1]
            records.append(metrics.ForecastRecord(t, mixture.predictive(),
                                                  float(vol.y[idx]), consumed,
                                                  MODEL_DLM))
            audit.record(t, consumed, MODEL_DLM, refitDate, status)
            mixture.update(float(vol.y[idx]))
    return records


def _volForecastsGarch(cfg, returns, vol, targets, refitDates, active, audit):
    records = []
    blocks = np.searchsorted(refitDates, targets, side='right') - 1
    for t, b in zip(targets, blocks):
        refitDate = refitDates[b]
        fit, status = active[refitDate]
        consumed = lastBefore(returns.dates, t)
        audit.record(t, consumed, MODEL_GARCH, refitDate, status)
        if fit is None:
            continue
        past = returns.before(t).returns
        predictive = garch.garchLogRvPredictive(fit, past, cfg.rvWindow,
                                                TRADING_DAYS, cfg.crpsSamples)
        idx = int(np.searchsorted(vol.dates, t))
        records.append(metrics.ForecastRecord(t, predictive, float(vol.y[idx]),
                                              consumed, MODEL_GARCH))
    return records


@dataclass
class VolPlan:
    """ Data and calendar of the volatility experiment. """
    returns: md.ReturnSeries
    vol: md.VolSeries
    targets: np.ndarray
    refitDates: np.ndarray


def volPlan(cfg):
    returns, vol = loadMarket(cfg)
    plan = md.RollingOriginPlan(md.toDate(cfg.initialEnd), cfg.refitInterval)
    targets = plan.targetDates(vol.dates)
    if len(targets) == 0:
        raise TooShort("No out of sample dates after %s" % cfg.initialEnd)
    refitDates = plan.refitDates(vol.dates)
    initial = vol.before(refitDates[0])
    if len(initial) < MIN_FIT_OBS:
        raise TooShort("Initial window has %d observations, %d needed"
                       % (len(initial), MIN_FIT_OBS))
    logger.info("Volatility experiment: %d targets, %d refits", len(targets),
                len(refitDates))
    return VolPlan(returns, vol, targets, refitDates)


def volRefitJobs(cfg, plan, refitDate, garchSpec=None):
    """ The jobs of one refit date: the DLM sampler on log RV and, when a
    GARCH specification is given, its refit on returns. """
    jobs = []
    if cfg.useDlm:
        jobs.append(RefitJob(MODEL_DLM, refitDate,
                             plan.vol.before(refitDate).y,
                             _refitSeed(cfg, EXP_VOL, MODEL_DLM, refitDate),
                             {'priorScale': cfg.priorScale,
                              'nDraws': cfg.mcmcDraws,
                              'likelihood': cfg.dlmLikelihood}))
    if cfg.useGarch and garchSpec is not None:
        jobs.append(RefitJob(MODEL_GARCH, refitDate,
                             plan.returns.before(refitDate).returns,
                             _refitSeed(cfg, EXP_VOL, MODEL_GARCH, refitDate),
                             {'spec': garchSpec}))
    return jobs


def foldVolForecasts(cfg, plan, outcomes, garchFits=()):
    """ This method turns the refit outcomes into forecasts, in time order.
    Between refits the DLM keeps filtering and the GARCH variance recursion
    keeps running on new returns. Refit dates without an outcome count as
    failed. """
    audit = AuditLog()
    result = VolResult(EXP_VOL, cfg, audit=audit, garchFits=list(garchFits))
    records = {}
    failed = []

    for model, enabled in ((MODEL_DLM, cfg.useDlm),
                           (MODEL_GARCH, cfg.useGarch)):
        if not enabled:
            continue
        byDate = {o.refitDate: o for o in outcomes if o.model == model}
        ordered = [byDate.get(d, RefitOutcome(model, d, None, 'not run'))
                   for d in plan.refitDates]
        failed.extend([str(o.refitDate), model, o.error]
                      for o in ordered if not o.ok)
        active = carryForward(ordered)
        if model == MODEL_DLM:
            records[model] = _volForecastsDlm(cfg, plan.vol, plan.targets,
                                              plan.refitDates, active, audit)
            fitted = [o.fit for o in ordered if o.ok]
            result.draws = fitted[-1] if fitted else None
        else:
            records[model] = _volForecastsGarch(cfg, plan.returns, plan.vol,
                                                plan.targets, plan.refitDates,
                                                active, audit)

    for model, recs in records.items():
        checkLeakage(recs)
        if recs:
            seed = cfg.stream(EXP_VOL).derive('crps-%s' % model).seed
            result.metrics[model] = metrics.forecastSummary(recs, seed,
                                                            cfg.intervalMass)
    if garchFits:
        result.extra['garch_spec'] = garch.pickByBic(garchFits).spec.label
    result.records = records
    result.extra.update({'n_targets': len(plan.targets),
                         'refit_dates': [str(d) for d in plan.refitDates],
                         'failed_refits': failed})
    return result


def runVolExperiment(cfg):
    """ This method runs the rolling origin evaluation of the next day log
    realized volatility. Models are refit at the start of every refit period
    on data strictly before it. Fits of different refit dates run in
    parallel; forecasts are a sequential fold. """
    plan = volPlan(cfg)
    spec, fits = None, []
    if cfg.useGarch:
        best, fits = selectGarchSpec(
            cfg, plan.returns.before(plan.refitDates[0]).returns, EXP_VOL)
        spec = best.spec
    jobs = [job for d in plan.refitDates for job in
            volRefitJobs(cfg, plan, d, spec)]
    return foldVolForecasts(cfg, plan, runRefits(jobs, cfg.workers), fits)


def runVarExperiment(cfg):
    """ One day VaR over the test span. The discount DLM is one filter pass
    started from the moments of the returns before the span. GARCH uses the
    BIC choice on those returns, refit at each month start in the span. """
    returns, _ = loadMarket(cfg)
    start, end = md.toDate(cfg.varTestStart), md.toDate(cfg.varTestEnd)
    if returns.dates[0] >= start or returns.dates[-1] < end:
        raise SpanNotCovered("Returns cover %s..%s, test span is %s..%s"
                             % (returns.dates[0], returns.dates[-1], start, end))
    test = returns.window(start, end)
    train = returns.before(start)
    T = len(test)
    logger.info("VaR backtest over %s..%s, T=%d", start, end, T)

    audit = AuditLog()
    result = VarResult(EXP_VAR, cfg, dates=test.dates, returns=test.returns,
                       audit=audit)

    if cfg.useDlm:
        init = dlm.initialDiscountState(train.returns, cfg.discountDelta,
                                        cfg.discountBeta)
        predictives = dlm.discountFilterRun(test.returns, init)
        result.var[MODEL_DLM] = np.array([p.quantile(cfg.varLevel)
                                          for p in predictives])
        for t in test.dates:
            audit.record(t, lastBefore(returns.dates, t), MODEL_DLM,
                         test.dates[0], 'ok')

    if cfg.useGarch:
        best, fits = selectGarchSpec(cfg, train.returns, EXP_VAR)
        result.extra['garch_spec'] = best.spec.label
        plan = md.RollingOriginPlan(train.dates[-1], cfg.refitInterval)
        refitDates = plan.refitDates(test.dates)
        jobs = [RefitJob(MODEL_GARCH, d, returns.before(d).returns,
                         _refitSeed(cfg, EXP_VAR, MODEL_GARCH, d),
                         {'spec': best.spec}) for d in refitDates]
        active = carryForward(runRefits(jobs, cfg.workers))
        var = np.full(T, np.nan)
        for i, t in enumerate(test.dates):
            refitDate = plan.activeRefit(refitDates, t)
            fit, status = active[refitDate]
            audit.record(t, lastBefore(returns.dates, t), MODEL_GARCH,
                         refitDate, status)
            if fit is not None:
                var[i] = garch.garchVar(fit, returns.before(t).returns,
                                        cfg.varLevel)
        result.var[MODEL_GARCH] = var

    checkAuditLeakage(audit)
    for model, var in result.var.items():
        ok = np.isfinite(var)
        hits = vb.exceedances(test.dates[ok], test.returns[ok], var[ok])
        report = vb.backtest(hits, cfg.varLevel)
        result.reports[model] = report
        result.metrics[model] = report.toDict()
        logger.info("%s: N=%d of T=%d, p_hat %.4f", model, report.N, report.T,
                    report.p_hat)
    result.extra['T'] = T
    return result


def runFraudExperiment(cfg):
    """ This method fits the Bayesian logistic model on the first
    chronological block, freezes the threshold on the second at the FPR cap
    and reports on the third. """
    tx = md.loadTransactions(cfg.transactionsPath)
    train, valid, test = md.chronoSplit(tx, cfg.fractions)
    stream = cfg.stream(EXP_FRAUD)

    Xtrain = fraud.buildFraudFeatures(train)
    standardizer = fraud.fitStandardizer(Xtrain, fraud.FRAUD_FEATURES)
    fraud.assertTrainScope(standardizer)
    post = fraud.fitMap(standardizer.transform(Xtrain), train.labels,
                        cfg.logitPriorSd, cfg.logitInterceptSd,
                        standardizer.keptNames, standardizer)
    post = fraud.samplePosterior(post, cfg.logitDraws, stream.derive('draws'))

    Xvalid = standardizer.transform(fraud.buildFraudFeatures(valid))
    Xtest = standardizer.transform(fraud.buildFraudFeatures(test))
    policy = fraud.tuneThreshold(fraud.predictProba(post, Xvalid),
                                 valid.labels, cfg.fprCap)

    cases = metrics.ScoredCases.of(fraud.predictProba(post, Xtest), test.labels)
    baseline = metrics.ScoredCases.of(fraud.predictMapProba(post, Xtest),
                                      test.labels)

    result = FraudResult(EXP_FRAUD, cfg, posterior=post, policy=policy,
                         testCases=cases, baselineCases=baseline,
                         rowIds=np.arange(len(train) + len(valid), len(tx)),
                         coefficients=fraud.coefficientSummary(post,
                                                               cfg.intervalMass))
    for model, c in ((MODEL_BAYES_LOGIT, cases), (MODEL_LOGISTIC, baseline)):
        confusion = metrics.confusionAt(c, policy.threshold)
        precision, _ = metrics.precisionAtFpr(c, cfg.fprCap)
        lo, hi = metrics.aucBootstrapInterval(
            c, cfg.bootstrap, seed=stream.derive('bootstrap-%s' % model).seed)
        result.metrics[model] = {
            'auc': metrics.rocAuc(c), 'auc_lo': lo, 'auc_hi': hi,
            'recall': confusion['recall'], 'fpr': confusion['fpr'],
            'precision_at_threshold': confusion['precision'],
            'precision_at_fpr': precision, 'brier': metrics.brier(c)}
    result.extra.update({'threshold': policy.threshold,
                         'fpr_cap': policy.fprCap,
                         'sizes': [len(train), len(valid), len(test)],
                         'prevalence': [train.prevalence, valid.prevalence,
                                        test.prevalence]})
    return result


def _classification(cases):
    out = {'brier': metrics.brier(cases)}
    try:
        out['auc'] = metrics.rocAuc(cases)
    except SingleClass as e:
        logger.warning("AUC undefined on the holdout: %s", e)
        out['auc'] = float('nan')
    return out


def runComplianceExperiment(cfg):
    """ Proxy labels, the particle filter over the whole timeline, the two
    baselines, and Brier and AUC on the final holdout fraction. """
    _, vol = loadMarket(cfg)
    labels = comp.makeProxyLabels(vol, cfg.proxyQuantile, cfg.proxyLookback)
    obs = comp.buildComplianceObs(vol, labels, cfg.holdoutFraction)
    train, holdout = obs.split(cfg.holdoutFraction)

    spec = comp.ComplianceModelSpec(cfg.nParticles, cfg.rwSdAlpha,
                                    cfg.rwSdBeta, cfg.resampleTrigger)
    run = comp.pfRun(obs, spec, comp.ComplianceInitPrior.fromBeta(),
                     cfg.stream(EXP_COMPLIANCE).derive('filter'))

    held = slice(len(train), len(obs))
    result = ComplianceResult(EXP_COMPLIANCE, cfg, run=run, nTrain=len(train))
    result.metrics[MODEL_PARTICLE] = _classification(
        metrics.ScoredCases.of(run.risks[held], holdout.y))
    result.metrics[MODEL_LOGISTIC] = _classification(
        comp.baselineLogistic(train, holdout))
    result.metrics[MODEL_FREQUENCY] = _classification(
        comp.frequencyCases(train.y, holdout.y))

    rv = vol.rv[np.searchsorted(vol.dates, holdout.dates)]
    rho, pValue = metrics.rankCorr(run.risks[held], rv)
    result.extra.update({'n_obs': len(obs), 'n_holdout': len(holdout),
                         'holdout_start': str(holdout.dates[0]),
                         'risk_vol_spearman': rho,
                         'risk_vol_spearman_p': pValue,
                         'resamplings': run.nResampled})
    return result


RUNNERS = {
    EXP_INGEST: runIngest,
    EXP_VOL: runVolExperiment,
    EXP_VAR: runVarExperiment,
    EXP_FRAUD: runFraudExperiment,
    EXP_COMPLIANCE: runComplianceExperiment,
}


def runExperiment(cfg):
    if cfg.experiment not in RUNNERS:
        raise InvalidParameter("Unknown experiment '%s', expected one of %s"
                               % (cfg.experiment, sorted(RUNNERS)))
    return RUNNERS[cfg.experiment](cfg)
