"""Residual autocorrelation tests and correlograms."""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from . import linalg, regress
from .errors import DataError
from .regress import OlsModel


def _clean(x):
    x = np.asarray(x, dtype=float)
    return x[np.isfinite(x)]


def acf(x, m):
    """Sample autocorrelations r_1..r_m (common denominator, NAs dropped).

    Parameters
    ----------
    x : array_like
    m : int
        Maximum lag, ``1 <= m < T``.

    Returns
    -------
    numpy.ndarray, shape (m,)
    """
    x = _clean(x)
    T = x.size
    if m < 1 or m >= T:
        raise DataError(f"maximum lag {m} must lie in 1..{T - 1}")
    d = x - x.mean()
    denom = float(d @ d)
    if denom <= 0.0:
        raise DataError("series has zero variance")
    return np.array([float(d[j:] @ d[:-j]) / denom for j in range(1, m + 1)])


def pacf_from_acf(r):
    """Durbin-Levinson recursion: partial autocorrelations from r_1..r_m."""
    r = np.asarray(r, dtype=float)
    m = r.size
    out = np.empty(m)
    phi = np.zeros(0)
    for k in range(1, m + 1):
        if k == 1:
            a = r[0]
        else:
            num = r[k - 1] - phi @ r[k - 2::-1]
            den = 1.0 - phi @ r[: k - 1]
            a = num / den
        phi = np.r_[phi - a * phi[::-1], a]
        out[k - 1] = a
    return out


def pacf(x, m):
    return pacf_from_acf(acf(x, m))


def ljung_box(r, T):
    """Cumulative Ljung-Box Q for each lag given autocorrelations ``r``."""
    r = np.asarray(r, dtype=float)
    j = np.arange(1, r.size + 1)
    return T * (T + 2) * np.cumsum(r**2 / (T - j))


@dataclass
class Correlogram:
    name: str
    T: int
    maxlag: int
    acf: np.ndarray
    pacf: np.ndarray
    q: np.ndarray
    q_pvalue: np.ndarray
    requested: int

    @property
    def band(self):
        return 1.96 / math.sqrt(self.T)

    def inside_band(self):
        return np.abs(self.acf) < self.band


def correlogram(x, m, name="x"):
    """ACF, PACF and Ljung-Box table up to ``m`` lags (capped at T-1)."""
    x = _clean(x)
    T = x.size
    if T < 2:
        raise DataError("correlogram needs at least two valid observations")
    if m < 1:
        raise DataError("maximum lag must be positive")
    used = min(m, T - 1)
    r = acf(x, used)
    q = ljung_box(r, T)
    qp = np.array([linalg.chisq_sf(qj, j) for j, qj in enumerate(q, start=1)])
    return Correlogram(name, T, used, r, pacf_from_acf(r), q, qp, m)


@dataclass
class BgResult:
    order: int
    aux: OlsModel
    r2: float
    lmf: float
    lmf_pvalue: float
    df: tuple
    tr2: float
    tr2_pvalue: float
    q: float
    q_pvalue: float
    model: OlsModel


def breusch_godfrey(model: OlsModel, order) -> BgResult:
    """Breusch-Godfrey LM test for autocorrelation up to ``order``.

    The auxiliary regression puts ``uhat`` on the model regressors plus
    ``order`` lags of ``uhat`` with zero pre-sample values, so T is kept.
    """
    order = int(order)
    if order < 1:
        raise ValueError("autocorrelation order must be at least 1")
    T, k = model.T, model.k
    if T - k - order <= 0:
        raise DataError(f"order {order} leaves no degrees of freedom")
    e = np.asarray(model.uhat, dtype=float)
    scale = max(float(np.max(np.abs(model.y))), 1.0)
    if float(np.max(np.abs(e))) <= 1e-12 * scale:
        raise DataError("zero residual variance")
    lags = np.zeros((T, order))
    for j in range(1, order + 1):
        lags[j:, j - 1] = e[:-j]
    X = np.column_stack([model.X, lags])
    names = list(model.names) + [f"uhat_{j}" for j in range(1, order + 1)]
    aux = regress.fit(e, X, names, dependent="uhat", sample=model.sample,
                      sample_label=model.sample_label, dataset_nobs=model.dataset_nobs)
    r2 = aux.r2
    df2 = T - k - order
    lmf = (r2 / order) / ((1.0 - r2) / df2)
    tr2 = T * r2
    r = acf(e, order)
    q = float(ljung_box(r, T)[-1])
    return BgResult(
        order=order, aux=aux, r2=r2, lmf=lmf, lmf_pvalue=linalg.f_sf(lmf, order, df2),
        df=(order, df2), tr2=tr2, tr2_pvalue=linalg.chisq_sf(tr2, order), q=q,
        q_pvalue=linalg.chisq_sf(q, order), model=model,
    )
