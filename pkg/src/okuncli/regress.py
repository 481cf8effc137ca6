"""OLS with the full gretl statistic block."""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Optional

import numpy as np

from . import linalg
from .dataset import Dataset, SampleRange, Series, common_sample, lag
from .errors import DataError, SingularMatrixError
from .scriptlang import Intercept, LagRangeSpec, SeriesRef


@dataclass
class OlsModel:
    dependent: str
    names: list[str]
    T: int
    k: int
    beta: np.ndarray
    se: np.ndarray
    tstat: np.ndarray
    pval: np.ndarray
    mean_y: float
    sd_y: float
    ssr: float
    ser: float
    r2: float
    adjr2: float
    F: Optional[float]
    pF: Optional[float]
    loglik: float
    aic: float
    bic: float
    hqc: float
    rho: float
    dw: float
    durbin_h: Optional[float] = None
    has_const: bool = True
    y: np.ndarray = field(default=None, repr=False)
    X: np.ndarray = field(default=None, repr=False)
    yhat: np.ndarray = field(default=None, repr=False)
    uhat: np.ndarray = field(default=None, repr=False)
    xtx_inv: np.ndarray = field(default=None, repr=False)
    sample: Optional[SampleRange] = None
    sample_label: str = ""
    dataset_nobs: Optional[int] = None
    # (name, lag) per column; ("const", 0) for the intercept
    terms: list = field(default_factory=list, repr=False)

    @property
    def df_resid(self):
        return self.T - self.k

    def coef(self, name):
        return self.beta[self.names.index(name)]

    def slope_indices(self):
        return [i for i, n in enumerate(self.names) if n != "const"]


def fit(y, X, names, dependent="y", sample=None, sample_label="", dataset_nobs=None,
        terms=None, lagged_dep=None) -> OlsModel:
    """Estimate OLS on plain arrays and compute the statistic block.

    ``lagged_dep`` is the column index holding the first lag of the dependent
    variable; when given, Durbin's h is computed.
    """
    y = np.asarray(y, dtype=float)
    X = np.asarray(X, dtype=float)
    T, k = X.shape
    if T <= k:
        raise SingularMatrixError(f"{T} observations are not enough for {k} parameters")
    names = list(names)
    res = linalg.lstsq(X, y, names)
    beta, e = res.beta, res.residuals
    has_const = "const" in names

    ssr = float(e @ e)
    s2 = ssr / (T - k)
    se = np.sqrt(np.diag(res.xtx_inv) * s2)
    with np.errstate(divide="ignore", invalid="ignore"):
        tstat = beta / se
    pval = np.array([linalg.student_t_sf(t, T - k) if np.isfinite(t) else np.nan for t in tstat])

    mean_y = float(np.mean(y))
    sd_y = float(np.std(y, ddof=1)) if T > 1 else 0.0
    tss = float(np.sum((y - mean_y) ** 2)) if has_const else float(y @ y)
    r2 = 1.0 - ssr / tss if tss > 0 else float("nan")
    adjr2 = 1.0 - (1.0 - r2) * (T - 1) / (T - k)

    nslopes = k - 1 if has_const else k
    F = pF = None
    if nslopes > 0 and ssr > 0:
        F = ((tss - ssr) / nslopes) / s2
        pF = linalg.f_sf(F, nslopes, T - k)

    loglik = -0.5 * T * (1.0 + math.log(2.0 * math.pi) + math.log(ssr / T)) if ssr > 0 else math.inf
    aic = -2.0 * loglik + 2.0 * k
    bic = -2.0 * loglik + k * math.log(T)
    hqc = -2.0 * loglik + 2.0 * k * math.log(math.log(T))

    de = np.diff(e)
    dw = float(de @ de) / ssr if ssr > 0 else float("nan")
    lagged = e[:-1] @ e[:-1]
    rho = float(e[1:] @ e[:-1]) / lagged if lagged > 0 else float("nan")

    durbin_h = None
    if lagged_dep is not None:
        durbin_h = _durbin_h(rho, T, se[lagged_dep] ** 2)

    return OlsModel(
        dependent=dependent, names=names, T=T, k=k, beta=beta, se=se, tstat=tstat,
        pval=pval, mean_y=mean_y, sd_y=sd_y, ssr=ssr, ser=math.sqrt(s2), r2=r2,
        adjr2=adjr2, F=F, pF=pF, loglik=loglik, aic=aic, bic=bic, hqc=hqc, rho=rho,
        dw=dw, durbin_h=durbin_h, has_const=has_const, y=y, X=X, yhat=y - e, uhat=e,
        xtx_inv=res.xtx_inv, sample=sample, sample_label=sample_label,
        dataset_nobs=dataset_nobs, terms=list(terms) if terms else [(n, 0) for n in names],
    )


def _durbin_h(rho, T, var_lag):
    # gretl scales by T-1, the number of usable residual pairs
    n = T - 1
    radicand = n / (1.0 - n * var_lag) if n * var_lag < 1.0 else -1.0
    if radicand < 0:
        return None
    return rho * math.sqrt(radicand)


def expand_regressors(regressors):
    """Turn parsed/str regressor specs into a list of ``(name, lag)`` terms."""
    terms = []
    for r in regressors:
        if isinstance(r, Intercept) or r == "const":
            terms.append(("const", 0))
        elif isinstance(r, LagRangeSpec):
            terms.extend((r.name, j) for j in r.lags())
        elif isinstance(r, SeriesRef):
            terms.append((r.name, -r.lag))
        elif isinstance(r, tuple):
            name, j = r
            terms.append((name, abs(int(j))))
        elif isinstance(r, str):
            terms.append((r, 0))
        else:
            raise TypeError(f"cannot interpret regressor {r!r}")
    seen = set()
    for t in terms:
        if t in seen:
            raise DataError(f"regressor {term_name(*t)} listed twice")
        seen.add(t)
    return terms


def term_name(name, j):
    return name if j == 0 else f"{name}_{j}"


def term_series(ds: Dataset, name, j, lookup=None) -> Series:
    get = lookup or ds.__getitem__
    s = get(name)
    return s if j == 0 else lag(s, j)


def ols(ds: Dataset, dependent, regressors, lookup=None) -> OlsModel:
    """Regress ``dependent`` on ``regressors`` over their common sample.

    ``regressors`` may mix ``"const"``, series names, ``(name, lag)`` pairs and
    parsed :mod:`scriptlang` regressor nodes.  ``lookup`` resolves a series
    name (the interpreter passes one that understands ``d_`` names).
    """
    get = lookup or ds.__getitem__
    terms = expand_regressors(regressors)
    ycol = get(dependent)
    cols = []
    for name, j in terms:
        if name == "const":
            cols.append(None)
        else:
            s = term_series(ds, name, j, get)
            cols.append(Series(term_name(name, j), s.values))
    sample = common_sample([ycol] + [c for c in cols if c is not None])
    sl = sample.slice
    n = sample.n
    X = np.column_stack([np.ones(n) if c is None else c.values[sl] for c in cols])
    names = [term_name(*t) for t in terms]
    lagged_dep = next((i for i, t in enumerate(terms) if t == (dependent, 1)), None)
    return fit(
        ycol.values[sl], X, names, dependent=dependent, sample=sample,
        sample_label=ds.range_label(sample), dataset_nobs=ds.nobs, terms=terms,
        lagged_dep=lagged_dep,
    )


def full_length(model: OlsModel, values):
    """Embed per-sample ``values`` into a dataset-length array (NA outside)."""
    out = np.full(model.dataset_nobs, np.nan)
    out[model.sample.slice] = values
    return out


@dataclass(frozen=True)
class SelectionRow:
    label: str
    bg_pvalue: float
    adjr2: float
    aic: float
    bic: float

    def formatted(self):
        return (self.label, f"{self.bg_pvalue:.3g}", f"{self.adjr2:.6f}",
                f"{self.aic:#.7g}", f"{self.bic:#.7g}")


def equation_label(model: OlsModel):
    return f"{model.dependent} = " + " + ".join(model.names)


def model_selection_table(models, bg_pvalues) -> list[SelectionRow]:
    """One row per model: BG (TR^2) p-value, adjusted R^2, AIC and Schwarz."""
    models = list(models)
    bg_pvalues = list(bg_pvalues)
    if not models:
        raise ValueError("model_selection_table needs at least one model")
    if len(models) != len(bg_pvalues):
        raise ValueError("one BG p-value is needed per model")
    return [
        SelectionRow(equation_label(m), float(p), m.adjr2, m.aic, m.bic)
        for m, p in zip(models, bg_pvalues)
    ]
