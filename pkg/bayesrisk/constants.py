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


# ----------------- Environment variables -------------------------------------

BAYESRISK_OUT = 'BAYESRISK_OUT'
BAYESRISK_PRICES = 'BAYESRISK_PRICES'
BAYESRISK_TRANSACTIONS = 'BAYESRISK_TRANSACTIONS'

DEFAULT_OUT = 'out'
DEFAULT_PRICES = 'sp500.csv'
DEFAULT_TRANSACTIONS = 'creditcard.csv'

# ----------------- Experiment calendar ---------------------------------------

TRAIN_START = '2000-01-03'
INITIAL_END = '2010-12-31'
VAR_TEST_START = '2020-01-02'
VAR_TEST_END = '2024-12-30'

DEFAULT_SEED = 42

# ----------------- Market data -----------------------------------------------

RV_WINDOW = 30
TRADING_DAYS = 252
MIN_FIT_OBS = 250

SPLIT_FRACTIONS = (0.70, 0.15, 0.15)

# ----------------- Models ----------------------------------------------------

VAR_LEVEL = 0.05
INTERVAL_MASS = 0.94
WILSON_CONF = 0.95

DISCOUNT_DELTA = 0.98
DISCOUNT_BETA = 0.98
DISCOUNT_C0 = 1.0
DISCOUNT_N0 = 10.0

HALF_CAUCHY_SCALE = 2.5
STUDENT_T_OBS_DF = 5.0
MIN_MCMC_DRAWS = 500
DEFAULT_MCMC_DRAWS = 1000

LIKELIHOOD_GAUSSIAN = 'gaussian'
LIKELIHOOD_STUDENT_T = 'student_t'
INNOVATIONS = [LIKELIHOOD_GAUSSIAN, LIKELIHOOD_STUDENT_T]

GARCH_ORDERS = [1, 2]
GARCH_STARTS = 5

CRPS_SAMPLES = 4000
MIN_EMPIRICAL_SAMPLES = 100

LOGIT_PRIOR_SD = 2.5
LOGIT_INTERCEPT_SD = 10.0
FPR_CAP = 0.05
FIT_SCOPE_TRAIN = 'train'

PARTICLES = 5000
MIN_PARTICLES = 1000
RW_SD_ALPHA = 0.02
RW_SD_BETA = 0.02
RESAMPLE_TRIGGER = 0.5
PROXY_QUANTILE = 0.90
PROXY_LOOKBACK = 252
HOLDOUT_FRACTION = 0.20
RISK_PRIOR_A = 2.0
RISK_PRIOR_B = 8.0

STREAM_BATCH = 500
STREAM_QUEUE = 1024

# ----------------- Experiments and output files ------------------------------

EXP_INGEST = 'ingest'
EXP_VOL = 'vol-forecast'
EXP_VAR = 'var-backtest'
EXP_FRAUD = 'fraud'
EXP_COMPLIANCE = 'compliance'
EXP_REPORT = 'report'
EXP_STREAM = 'stream'
EXPERIMENTS = [EXP_INGEST, EXP_VOL, EXP_VAR, EXP_FRAUD, EXP_COMPLIANCE,
               EXP_REPORT, EXP_STREAM]

MODEL_DLM = 'dlm'
MODEL_GARCH = 'garch'
MODEL_BAYES_LOGIT = 'bayes_logit'
MODEL_PARTICLE = 'particle_filter'
MODEL_LOGISTIC = 'logistic'
MODEL_FREQUENCY = 'frequency'

FORECASTS_FILE = 'forecasts.csv'
BACKTEST_FILE = 'backtest.csv'
REPORT_FILE = 'report.json'
AUDIT_FILE = 'audit.log'
METRICS_FILE = 'metrics.csv'
SCORES_FILE = 'scores.csv'
POSTERIOR_FILE = 'posterior.json'
TRAJECTORY_FILE = 'trajectory.csv'
GARCH_FITS_FILE = 'garch_fits.csv'
DRAWS_FILE = 'draws.csv'
COEFFICIENTS_FILE = 'coefficients.csv'
ROC_FILE = 'roc.csv'
SUMMARY_FILE = 'summary.csv'
SUMMARY_JSON = 'summary.json'
RETURNS_FILE = 'returns.csv'
VOL_FILE = 'realized_vol.csv'

FORECAST_CHART = 'forecast.svg'
VAR_CHART = 'var.svg'
ROC_CHART = 'roc.svg'
TRAJECTORY_CHART = 'trajectory.svg'

FORECAST_HEADER = ['date', 'f_mean', 'f_lo94', 'f_hi94', 'actual', 'model']
BACKTEST_HEADER = ['model', 'T', 'N', 'p_hat', 'lr_uc', 'p_uc', 'lr_ind', 'p_ind',
                   'lr_cc', 'p_cc', 'wilson_lo', 'wilson_hi']
AUDIT_HEADER = ['target_date', 'max_consumed_date', 'model', 'refit_date',
                'status']
METRICS_HEADER = ['model', 'metric', 'value']
SCORES_HEADER = ['row_id', 'score', 'flag']
TRAJECTORY_HEADER = ['date', 'risk', 'alpha_mean', 'beta_mean', 'ess', 'y']
GARCH_FITS_HEADER = ['p', 'q', 'dist', 'mu', 'omega', 'alphas', 'betas', 'nu',
                     'loglik', 'bic']
DRAWS_HEADER = ['tau', 'sigma_obs']

# ----------------- Exit codes ------------------------------------------------

EXIT_OK = 0
EXIT_USAGE = 1
EXIT_DATA = 2
EXIT_NUMERIC = 3
