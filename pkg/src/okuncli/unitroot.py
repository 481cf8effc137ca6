"""Augmented Dickey-Fuller tests with MAIC test-down, and Engle-Granger cointegration."""

from __future__ import annotations

import json
import math
from dataclasses import dataclass, field
from functools import lru_cache
from importlib import resources
from statistics import NormalDist
from typing import Optional

import numpy as np
from scipy.interpolate import PchipInterpolator

from . import regress
from .dataset import Dataset, Series, common_sample
from .errors import DataError, SingularMatrixError
from .regress import OlsModel

CASES = ("nc", "c", "ct")
CASE_TEXT = {
    "nc": "sin constante",
    "c": "con constante",
    "ct": "con constante y tendencia",
}
CASE_MODEL = {
    "nc": "(1-L)y = (a-1)*y(-1) + ... + e",
    "c": "(1-L)y = b0 + (a-1)*y(-1) + ... + e",
    "ct": "(1-L)y = b0 + b1*t + (a-1)*y(-1) + ... + e",
}


@dataclass
class AdfResult:
    series: str
    case: str
    kmax: int
    chosen_k: int
    delta_hat: float
    tau: float
    pvalue: float
    rho1_of_e: float
    regression: OlsModel
    mic_trace: list = field(default_factory=list)  # [(k, MIC)] in evaluation order
    test_down: Optional[str] = None
    n_vars: int = 1
    pvalue_case: str = ""

    @property
    def T(self):
        return self.regression.T

    @property
    def tau_label(self):
        return f"tau_{self.pvalue_case or self.case}({self.n_vars})"

    def rejects(self, level):
        return self.pvalue < level


@dataclass
class CointResult:
    series: list
    case: str
    stage1: OlsModel
    stage2: AdfResult
    unit_root_tests: list = field(default_factory=list)

    @property
    def cointegrated(self):
        return self.stage2.pvalue < 0.05


# -- MacKinnon p-values ------------------------------------------------------


@lru_cache(maxsize=None)
def _quantile_tables():
    text = resources.files("okuncli").joinpath("data/mackinnon_quantiles.json").read_text()
    raw = json.loads(text)["tables"]
    probit = NormalDist().inv_cdf
    out = {}
    for key, tab in raw.items():
        tau = np.asarray(tab["tau"])
        z = np.array([probit(p) for p in tab["p"]])
        if np.any(np.diff(tau) <= 0):
            raise RuntimeError(f"MacKinnon table {key} is not increasing")
        out[key] = (tau, z, PchipInterpolator(tau, z, extrapolate=False))
    return out


def critical_value(case, n_vars, level):
    """Tabulated asymptotic quantile at probability ``level`` (a grid node)."""
    tau, z, _ = _table(case, n_vars)
    target = NormalDist().inv_cdf(level)
    idx = np.flatnonzero(np.isclose(z, target, rtol=0, atol=1e-12))
    if idx.size == 0:
        raise ValueError(f"probability {level} is not a tabulated node")
    return float(tau[idx[0]])


def _table(case, n_vars):
    if case not in CASES:
        raise ValueError(f"unknown deterministic case {case!r}")
    key = f"{case}{n_vars}"
    tables = _quantile_tables()
    if key not in tables:
        raise ValueError(f"no MacKinnon table for {n_vars} variables (supported: 1-4)")
    return tables[key]


def mackinnon_pvalue(tau, case, n_vars=1):
    """Asymptotic left-tail p-value of a Dickey-Fuller / Engle-Granger tau.

    Interpolates monotonically (PCHIP in probit space) between the tabulated
    quantiles and clamps to [0.0001, 0.9999].
    """
    tq, z, interp = _table(case, n_vars)
    if tau <= tq[0]:
        p = NormalDist().cdf(z[0])
    elif tau >= tq[-1]:
        p = NormalDist().cdf(z[-1])
    else:
        p = NormalDist().cdf(float(interp(tau)))
    return min(max(p, 0.0001), 0.9999)


# -- ADF ---------------------------------------------------------------------


def _design(x, k, case, start):
    """ADF regression rows for 0-based observations ``start..len(x)-1``.

    Column order follows gretl: const, level lag, lagged differences, trend.
    """
    n = len(x)
    dx = np.empty(n)
    dx[0] = np.nan
    dx[1:] = np.diff(x)
    rows = np.arange(start, n)
    cols, names = [], []
    if case in ("c", "ct"):
        cols.append(np.ones(rows.size))
        names.append("const")
    cols.append(x[rows - 1])
    names.append("level")
    for i in range(1, k + 1):
        cols.append(dx[rows - i])
        names.append(f"lag{i}")
    if case == "ct":
        cols.append(rows + 1.0)
        names.append("time")
    return dx[rows], np.column_stack(cols), names, rows


def maic(delta_hat, ssr, n, k, level_lag, deterministic=None, detrend=False):
    """Modified AIC of one candidate lag order.

    ``MAIC(k) = ln(s2) + 2 (tau_T(k) + k) / n`` with ``s2 = SSR_k / n`` and
    ``tau_T(k) = delta^2 * sum(ylag^2) / s2``; ``n`` is the kmax-fixed sample.
    With ``detrend=True`` the lagged level is first purged of the
    deterministic columns (Ng and Perron's original form); otherwise the raw
    lagged level is used, which is what gretl prints as "MIC".
    """
    ylag = np.asarray(level_lag, dtype=float)
    if detrend and deterministic is not None and deterministic.shape[1] > 0:
        g, *_ = np.linalg.lstsq(deterministic, ylag, rcond=None)
        ylag = ylag - deterministic @ g
    s2 = ssr / n
    tau_T = delta_hat**2 * float(ylag @ ylag) / s2
    return math.log(s2) + 2.0 * (tau_T + k) / n


def maic_trace(x, kmax, case, kmin=1, detrend=False):
    """MAIC for k = kmax down to kmin, all on the sample fixed by kmax."""
    x = np.asarray(x, dtype=float)
    if kmax + 2 >= len(x):
        raise DataError(f"lag order {kmax} is too large for {len(x)} observations")
    trace = []
    for k in range(kmax, kmin - 1, -1):
        y, X, names, _ = _design(x, k, case, kmax + 1)
        res = regress.fit(y, X, names)
        lvl = names.index("level")
        det = [i for i, nm in enumerate(names) if nm in ("const", "time")]
        trace.append((k, maic(res.beta[lvl], res.ssr, res.T, k, X[:, lvl], X[:, det], detrend)))
    return trace


def _valid_values(s: Series):
    sample = common_sample([s])
    return s.values[sample.slice], sample


def adf(ds: Dataset, series, kmax, case="c", testdown=None, difference=False,
        kmin=1, detrend_maic=False, n_vars=1, pvalue_case=None, name=None) -> AdfResult:
    """ADF test on one series of ``ds`` (or on a bare :class:`Series`)."""
    s = series if isinstance(series, Series) else ds[series]
    if difference:
        from .dataset import diff

        s = diff(s)
    x, sample = _valid_values(s)
    start_obs = sample.first_t
    label = (lambda a, b: ds.range_label(type(sample)(start_obs + a, start_obs + b))) if ds else None
    return adf_values(
        x, kmax, case, testdown=testdown, kmin=kmin, detrend_maic=detrend_maic,
        name=name or s.name, n_vars=n_vars, pvalue_case=pvalue_case, label=label,
    )


def adf_values(x, kmax, case="c", testdown=None, kmin=1, detrend_maic=False, name="y",
               n_vars=1, pvalue_case=None, label=None) -> AdfResult:
    """ADF test on a NA-free array.

    With ``testdown="MAIC"`` the lag order is picked by minimising MAIC over
    ``kmin..kmax`` on the common kmax sample, then the chosen regression is
    re-estimated on every observation it can use.
    """
    if case not in CASES:
        raise ValueError(f"unknown deterministic case {case!r}")
    if kmax < 0:
        raise ValueError("kmax must be non-negative")
    x = np.asarray(x, dtype=float)
    trace = []
    if testdown:
        if str(testdown).upper() != "MAIC":
            raise ValueError(f"unsupported test-down criterion {testdown!r}")
        lo = min(kmin, kmax)
        trace = maic_trace(x, kmax, case, kmin=lo, detrend=detrend_maic)
        best = min(trace, key=lambda kv: (kv[1], kv[0]))
        k = best[0]
    else:
        k = kmax
    if k + 2 >= len(x):
        raise DataError(f"lag order {k} is too large for {len(x)} observations")

    y, X, names, rows = _design(x, k, case, k + 1)
    dname = f"d_{name}"
    pretty = [
        {"level": f"{name}_1", "time": "time"}.get(nm, nm) if not nm.startswith("lag")
        else f"{dname}_{nm[3:]}"
        for nm in names
    ]
    lvl = names.index("level")
    sample_label = label(int(rows[0]), int(rows[-1])) if label else ""
    model = regress.fit(y, X, pretty, dependent=dname, sample_label=sample_label)
    pcase = pvalue_case or case
    tau = float(model.tstat[lvl])
    p = mackinnon_pvalue(tau, pcase, n_vars)
    model.pval[lvl] = p
    return AdfResult(
        series=name, case=case, kmax=kmax, chosen_k=k, delta_hat=float(model.beta[lvl]),
        tau=tau, pvalue=p, rho1_of_e=model.rho, regression=model, mic_trace=trace,
        test_down="MAIC" if testdown else None, n_vars=n_vars, pvalue_case=pcase,
    )


# -- Engle-Granger -----------------------------------------------------------


def coint(ds: Dataset, kmax, series, case="c", testdown=None, skip_df=False,
          lookup=None) -> CointResult:
    """Two-step Engle-Granger test.

    Stage 1 regresses the first series on the deterministic terms and the
    others; stage 2 runs an ADF test without deterministic terms on the
    stage-1 residuals, reading p-values from the cointegration table for
    ``len(series)`` variables under the stage-1 deterministic case.
    """
    series = list(series)
    if len(series) < 2:
        raise ValueError("coint needs at least two series")
    if case not in CASES:
        raise ValueError(f"unknown deterministic case {case!r}")
    get = lookup or ds.__getitem__
    pre = []
    if not skip_df:
        for name in series:
            pre.append(adf(ds, get(name), kmax, case=case, testdown=testdown))
    regs = (["const"] if case != "nc" else []) + series[1:]
    if case == "ct":
        if "time" not in ds:
            from .dataset import gen_time

            ds.add(gen_time(ds))
        regs.append("time")
    stage1 = regress.ols(ds, series[0], regs, lookup=get)
    scale = max(float(np.max(np.abs(stage1.y))), 1e-300)
    if float(np.max(np.abs(stage1.uhat))) <= 1e-10 * scale:
        raise SingularMatrixError("cointegrating regression fits exactly: zero residual variance")
    start = stage1.sample.first_t
    label = (lambda a, b: ds.range_label(type(stage1.sample)(start + a, start + b)))
    stage2 = adf_values(
        stage1.uhat, kmax, "nc", testdown=testdown, name="uhat",
        n_vars=len(series), pvalue_case=case, label=label,
    )
    return CointResult(series=series, case=case, stage1=stage1, stage2=stage2, unit_root_tests=pre)
