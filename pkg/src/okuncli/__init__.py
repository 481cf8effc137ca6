"""Gretl-style script interpreter for time-series econometrics."""

from .dataset import Dataset, SampleRange, Series, load_csv
from .errors import DataError, OkunError, ParseError, ScriptError, SingularMatrixError
from .regress import OlsModel, ols
from .scriptlang import parse_file, parse_source
from .session import Session, execute, run_file
from .unitroot import adf, coint, mackinnon_pvalue

__version__ = "0.1.0"

__all__ = [
    "DataError", "Dataset", "OkunError", "OlsModel", "ParseError", "SampleRange",
    "ScriptError", "Series", "Session", "SingularMatrixError", "adf", "coint",
    "execute", "load_csv", "mackinnon_pvalue", "ols", "parse_file", "parse_source",
    "run_file",
]
