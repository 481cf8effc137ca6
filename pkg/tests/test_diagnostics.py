import math

import numpy as np
import pytest
from numpy.testing import assert_allclose

from okuncli.diagnostics import (
    acf, breusch_godfrey, correlogram, ljung_box, pacf, pacf_from_acf,
)
from okuncli.errors import DataError
from okuncli.regress import fit, ols
from okuncli.simulate import Rng, ar_path, random_walk

from oracles import ols_pacf


@pytest.fixture(scope="module")
def final_model(okun_annual):
    return ols(okun_annual, "d_u", ["const", "d_y"])


def test_bg_order1(final_model):
    bg = breusch_godfrey(final_model, 1)
    assert bg.aux.T == 32 and bg.df == (1, 29)
    assert f"{bg.r2:.6f}" == "0.052295"
    assert f"{bg.lmf:.6f}" == "1.600240"
    assert f"{bg.lmf_pvalue:.3g}" == "0.216"
    assert f"{bg.tr2:.6f}" == "1.673441"
    assert f"{bg.tr2_pvalue:.3g}" == "0.196"
    assert f"{bg.q:.4g}" == "1.703"
    assert f"{bg.q_pvalue:.3g}" == "0.192"
    assert f"{bg.aux.coef('uhat_1'):.6f}" == "0.237403"


def test_bg_order2(final_model):
    bg = breusch_godfrey(final_model, 2)
    assert bg.df == (2, 28)
    assert f"{bg.r2:.6f}" == "0.063296"
    assert f"{bg.lmf:.6f}" == "0.946019"
    assert f"{bg.lmf_pvalue:.3g}" == "0.4"
    assert f"{bg.tr2:.6f}" == "2.025463"
    assert f"{bg.tr2_pvalue:.3g}" == "0.363"
    assert f"{bg.q:.6g}" == "2.30358"
    assert f"{bg.q_pvalue:.3g}" == "0.316"


def test_bg_identities(final_model):
    for p in (1, 2, 3):
        bg = breusch_godfrey(final_model, p)
        T, k = final_model.T, final_model.k
        assert_allclose(bg.tr2, T * bg.r2, rtol=1e-13)
        assert_allclose(bg.lmf, (bg.r2 / p) / ((1 - bg.r2) / (T - k - p)), rtol=1e-13)


def test_bg_oracle_zero_padding(final_model):
    e = final_model.uhat
    lag1 = np.r_[0.0, e[:-1]]
    aux = fit(e, np.column_stack([final_model.X, lag1]), ["const", "d_y", "uhat_1"])
    assert_allclose(breusch_godfrey(final_model, 1).r2, aux.r2, rtol=1e-12)


def test_bg_preconditions(final_model):
    with pytest.raises(ValueError):
        breusch_godfrey(final_model, 0)
    with pytest.raises(DataError):
        breusch_godfrey(final_model, 30)


def test_bg_zero_residuals():
    x = np.arange(1.0, 11.0)
    m = fit(3 + 2 * x, np.column_stack([np.ones(10), x]), ["const", "x"])
    m.uhat = np.zeros(10)
    with pytest.raises(DataError, match="zero residual variance"):
        breusch_godfrey(m, 1)


def test_acf_definition():
    x = np.array([1.0, 3.0, 2.0, 5.0, 4.0, 6.0])
    d = x - x.mean()
    expect = [d[j:] @ d[:-j] / (d @ d) for j in range(1, 5)]
    assert_allclose(acf(x, 4), expect, rtol=1e-14)


def test_acf_of_final_residuals_near_rho(final_model):
    assert abs(acf(final_model.uhat, 1)[0] - 0.225048) < 0.05


def test_acf_errors():
    with pytest.raises(DataError):
        acf(np.ones(10), 2)
    with pytest.raises(DataError):
        acf(np.arange(5.0), 5)


def test_acf_drops_na():
    x = np.array([np.nan, 1.0, 3.0, 2.0, 5.0])
    assert_allclose(acf(x, 2), acf(x[1:], 2))


def test_pacf_first_equals_acf():
    x = Rng(5).normal(60)
    assert pacf(x, 5)[0] == acf(x, 5)[0]


def test_pacf_bounded():
    x = np.cumsum(Rng(9).normal(80))
    assert np.all(np.abs(pacf(x, 40)) <= 1)


@pytest.mark.parametrize("seed", range(10))
def test_pacf_matches_ols_oracle(seed):
    x = Rng(seed).normal(200)
    assert_allclose(pacf(x, 8), ols_pacf(x, 8), rtol=1e-8, atol=1e-12)


def test_pacf_of_ar1():
    x = ar_path(Rng(7777777), 10000, [0.5]).values
    p = pacf(x, 10)
    assert abs(p[0] - 0.5) <= 0.03
    assert np.all(np.abs(p[1:]) <= 0.03)


def test_white_noise_inside_band():
    base = Rng(7777777)
    shares = [np.mean(correlogram(base.fork(i).normal(100), 50).inside_band()) for i in range(200)]
    assert np.mean(shares) >= 0.93
    assert correlogram(base.normal(100), 50).band == 1.96 / 10


def test_ljung_box_nondecreasing():
    x = Rng(3).normal(100)
    q = ljung_box(acf(x, 30), 100)
    assert np.all(np.diff(q) >= 0)
    assert_allclose(q[0], 100 * 102 * acf(x, 1)[0] ** 2 / 99)


def _walks(n=100):
    base = Rng(11)
    return [random_walk(base.fork(i), 100).values for i in range(n)]


def test_random_walk_acf_decays_slowly():
    # target: median r_10 above 0.5 (population median is about 0.477; ledgered)
    r10 = [acf(rw, 10)[-1] for rw in _walks()]
    print(f"random walk T=100: median r_10 = {np.median(r10):.3f}")
    assert np.median(r10) > 0.5


def test_random_walk_difference_inside_band():
    walks = _walks()
    inside = [np.mean(correlogram(np.diff(rw), 20).inside_band()) for rw in walks]
    assert np.median(inside) >= 0.9
    # the level correlogram sits far above the band where the differences do not
    band = 1.96 / math.sqrt(99)
    assert np.median([acf(rw, 10)[-1] for rw in walks]) > 2 * band
    assert np.median([abs(acf(np.diff(rw), 10)[-1]) for rw in walks]) < band


def test_correlogram_caps_lag():
    c = correlogram(np.arange(10.0) % 3, 50, "x")
    assert c.maxlag == 9 and c.requested == 50
    assert len(c.acf) == len(c.pacf) == len(c.q) == 9
