import os
import re
import shutil
from pathlib import Path

import pytest

from okuncli.dataset import Dataset, diff, gen_time, load_csv
from okuncli.session import Session, run_file

ROOT = Path(__file__).resolve().parents[1]
DATA = ROOT / "data" / "okun_spain.csv"
SCRIPTS = ROOT / "scripts"
CORPUS = Path(__file__).resolve().parent / "corpus"
GOLDEN = Path(__file__).resolve().parent / "golden"

_NUMBER = re.compile(r"[-+]?(?:\d+\.\d*|\.\d+|\d+)(?:e[-+]?\d+)?")


def numeric_tokens(text):
    """Every number in ``text`` as printed, ignoring "Modelo N" titles."""
    text = re.sub(r"^Modelo \w+: ", "", text, flags=re.M)
    return _NUMBER.findall(text)


def golden(name):
    return (GOLDEN / f"{name}.txt").read_text()


@pytest.fixture(scope="session")
def okun_ds():
    return load_csv(DATA)


@pytest.fixture(scope="session")
def okun_annual(okun_ds):
    """Okun data dated 1980-2012 with time, d_u and d_y added."""
    ds = Dataset(nobs=okun_ds.nobs, frequency=1, start_period=1980)
    for name in okun_ds.names():
        ds.add(okun_ds[name])
    ds.add(gen_time(ds))
    ds.add(diff(ds["u"]))
    ds.add(diff(ds["y"]))
    return ds


@pytest.fixture
def fresh_okun_ds():
    return load_csv(DATA)


@pytest.fixture(scope="session")
def full_run(tmp_path_factory):
    """The shipped end-to-end script, executed once."""
    out = tmp_path_factory.mktemp("plots")
    session = run_file(SCRIPTS / "okun_full.inp", Session(outdir=str(out)))
    return session


@pytest.fixture
def home_with_tfg(tmp_path, monkeypatch):
    """A HOME holding tfg.csv so that 'open ~/tfg.xls' listings run verbatim."""
    shutil.copy(DATA, tmp_path / "tfg.csv")
    monkeypatch.setenv("HOME", str(tmp_path))
    return tmp_path


# -- acceptance report ----------------------------------------------------------

ACCEPTANCE = {}


def pytest_terminal_summary(terminalreporter):
    if not ACCEPTANCE:
        return
    terminalreporter.section("acceptance criteria")
    for number in sorted(ACCEPTANCE):
        terminalreporter.write_line(ACCEPTANCE[number])
