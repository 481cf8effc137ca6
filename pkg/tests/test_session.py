import os
import shutil

import numpy as np
import pytest
from numpy.testing import assert_allclose, assert_array_equal

from okuncli.dataset import lag, load_csv
from okuncli.errors import ScriptError
from okuncli.scriptlang import parse_file, parse_source
from okuncli.session import Session, default_corrgm_lag, execute, run_file
from okuncli.simulate import ar_recursion

from conftest import CORPUS, DATA, SCRIPTS


def run(src, session=None, **kw):
    return execute(parse_source(src), session if session is not None else Session(**kw))


AR1 = """nulldata 100
setobs 1 1 --time-series
genr time
set seed 7777777
scalar phi = .5
series y = uniform()
series e = normal()
series y = phi * y(-1) + e
"""


def test_ar1_recursion_identity():
    s = run(AR1)
    y, e = s.dataset["y"].values, s.dataset["e"].values
    assert len(y) == len(e) == 100
    assert_array_equal(y[1:], 0.5 * y[:-1] + e[1:])
    # the first observation keeps its uniform() value
    assert 0.0 <= y[0] < 1.0


def test_recursion_matches_library_path():
    s = run("nulldata 50\nseries e = normal()\nseries y = e\nseries y = 0.5 * y(-1) + e")
    e = s.dataset["e"].values
    assert_array_equal(s.dataset["y"].values, ar_recursion(e, [0.5]))


def test_phi_zero_gives_rhs():
    s = run("nulldata 30\nseries y = uniform()\nseries e = normal()\nscalar phi = 0\n"
            "series y = phi * y(-1) + e")
    assert_array_equal(s.dataset["y"].values[1:], s.dataset["e"].values[1:])


def test_plain_series_assignments():
    s = run("nulldata 20\ngenr time\nseries z = time + 1\nseries w = z(-1)\n"
            "series q = (z - 1) * 2 / 4")
    ds = s.dataset
    assert_array_equal(ds["z"].values, np.arange(2.0, 22.0))
    assert_array_equal(ds["w"].values, lag(ds["z"], 1).values)
    assert_allclose(ds["q"].values, np.arange(1.0, 21.0) / 2)


def test_na_propagates_through_expressions():
    s = run("nulldata 5\ngenr time\nseries a = time(-2) * 3")
    assert np.isnan(s.dataset["a"].values[:2]).all()
    assert_array_equal(s.dataset["a"].values[2:], [3.0, 6.0, 9.0])


def test_self_reference_without_lag():
    with pytest.raises(ScriptError, match="without a lag"):
        run("nulldata 5\nseries y = normal()\nseries y = y + 1")


def test_unknown_identifier():
    with pytest.raises(ScriptError, match="unknown series 'nosuch'"):
        run("nulldata 5\nseries y = nosuch * 2")


def test_accessors(okun_annual):
    s = Session(dataset=okun_annual)
    with pytest.raises(ScriptError, match="no model"):
        run("series yhat = $yhat", s)
    run("ols y const time\nseries yhat = $yhat\nseries resid = $uhat", s)
    ds = s.dataset
    assert f"{np.nansum(ds['resid'].values ** 2):.3g}" == "3.68e+22"
    assert_allclose(ds["yhat"].values + ds["resid"].values, ds["y"].values, rtol=1e-15)
    assert s.last_model.r2 == pytest.approx(0.967755, abs=5e-7)


def test_accessors_na_outside_sample():
    s = Session(dataset=load_csv(DATA))
    run("ols d_u const d_y\nseries r = $uhat", s)
    r = s.dataset["r"].values
    assert np.isnan(r[0]) and np.isfinite(r[1:]).all()


def test_d_series_created_on_demand():
    s = Session(dataset=load_csv(DATA))
    run("series g = d_u * 2", s)
    assert "d_u" in s.dataset
    assert_allclose(s.dataset["g"].values[1:], 2 * np.diff(s.dataset["u"].values))


def test_empty_program_leaves_session():
    s = Session()
    before = (s.dataset, dict(s.scalars), s.rng.state)
    execute(parse_source(""), s)
    assert (s.dataset, s.scalars, s.rng.state) == before
    assert s.blocks == []


def test_determinism():
    a, b = run(AR1), run(AR1)
    for name in a.dataset.names():
        assert_array_equal(a.dataset[name].values, b.dataset[name].values)
    assert a.output == b.output


def test_seed_override():
    a = run(AR1, seed_override=1)
    b = run(AR1, seed_override=1)
    c = run(AR1)
    assert_array_equal(a.dataset["e"].values, b.dataset["e"].values)
    assert not np.array_equal(a.dataset["e"].values, c.dataset["e"].values)


def test_scalar_assignment():
    s = run("scalar a = 2\nscalar b = a * 3 - 1")
    assert s.scalars == {"a": 2.0, "b": 5.0}


def test_ar1_listing_corpus(tmp_path):
    s = run_file(CORPUS / "ar1_listing.inp", Session(outdir=str(tmp_path)))
    assert len(s.dataset["y"]) == len(s.dataset["e"]) == 100
    assert len(s.plots) == 2
    assert {p.kind for p in s.plots} == {"lines-time-series", "correlogram"}
    assert all(os.path.exists(f) for f in s.plot_files)


def test_white_noise_corpus(tmp_path):
    s = run_file(CORPUS / "white_noise_listing.inp", Session(outdir=str(tmp_path)))
    assert s.plots


def test_okun_console_listing_verbatim(home_with_tfg, tmp_path):
    s = run_file(CORPUS / "okun_console.inp", Session(outdir=str(tmp_path)))
    assert len(s.models) == 6
    simple = s.models[2]
    assert simple.names == ["const", "d_y"]
    assert f"{simple.coef('d_y'):.6g}" == "-1.21453e-10"
    assert s.last_model.names == ["const", "d_y", "d_y_1", "d_u_1"]
    assert [b.order for b in s.bg_results] == [2, 1]
    assert f"{s.coint_results[0].stage2.tau:.6g}" == "-2.01769"


def test_open_spreadsheet_falls_back_to_csv(tmp_path):
    shutil.copy(DATA, tmp_path / "tfg.csv")
    s = run(f"open {tmp_path / 'tfg.xls'}")
    assert s.dataset.nobs == 33


def test_open_missing():
    with pytest.raises(ScriptError, match="file not found"):
        run("open /nonexistent/nothing.csv")


def test_run_resolves_relative_to_script(tmp_path):
    sub = tmp_path / "sub"
    sub.mkdir()
    shutil.copy(DATA, sub / "data.csv")
    (sub / "inner.inp").write_text("open data.csv\nscalar n = 1\n")
    (tmp_path / "outer.inp").write_text("run sub/inner.inp\nols u const\n")
    s = run_file(tmp_path / "outer.inp")
    assert s.dataset.nobs == 33 and s.scalars["n"] == 1.0
    assert s.last_model.T == 33


def test_run_recursion_is_bounded(tmp_path):
    (tmp_path / "loop.inp").write_text("run loop.inp\n")
    with pytest.raises(ScriptError, match="nested too deeply"):
        run_file(tmp_path / "loop.inp")


def test_error_names_command_index():
    with pytest.raises(ScriptError) as info:
        run("nulldata 5\nscalar a = 1\nols nosuch const")
    assert info.value.index == 2
    assert str(info.value).startswith("command 3:")


def test_default_corrgm_lag():
    assert default_corrgm_lag(32) == 15
    assert default_corrgm_lag(100) == 20
    assert default_corrgm_lag(5) == 4


def test_full_pipeline_models(full_run):
    titles = [m for m in full_run.models]
    assert len(titles) == 7
    assert f"{full_run.models[0].r2:.6f}" == "0.967755"
    assert full_run.models[-1].names == ["const", "d_y"]
    assert [round(b.tr2_pvalue, 3) for b in full_run.bg_results[:4]] == [0.196, 0.26, 0.19, 0.331]
