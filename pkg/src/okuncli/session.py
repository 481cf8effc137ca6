"""Script interpreter: executes parsed commands against mutable session state."""

from __future__ import annotations

import math
import os
from dataclasses import dataclass, field
from typing import Callable, Optional

import numpy as np

from . import dataset as dsmod
from . import diagnostics, regress, report, scriptlang as sl, unitroot
from .dataset import Dataset, Series
from .errors import DataError, OkunError, ScriptError
from .simulate import Rng

DEFAULT_SEED = 0
MAX_RUN_DEPTH = 32
_SPREADSHEET_EXT = (".xls", ".xlsx", ".ods", ".gdt")


@dataclass
class Session:
    """Interpreter state.

    Attributes
    ----------
    dataset : Dataset or None
    scalars : dict
        Named scalar values (``scalar phi = .5``).
    rng : Rng
        Random stream behind ``normal()`` and ``uniform()``.
    seed_override : int, optional
        When set, every ``set seed`` uses this value instead.
    last_model : OlsModel or None
        Source of ``$yhat`` / ``$uhat`` and the target of ``modtest``.
    blocks : list of str
        Every rendered output block, in order.
    sink : callable, optional
        Receives each block as it is produced (the CLI passes a writer).
    outdir : str, optional
        Where plot files go; ``None`` keeps plot specs in memory only.
    """

    dataset: Optional[Dataset] = None
    scalars: dict = field(default_factory=dict)
    seed: int = DEFAULT_SEED
    seed_override: Optional[int] = None
    rng: Rng = None
    last_model: Optional[regress.OlsModel] = None
    models: list = field(default_factory=list)
    bg_results: list = field(default_factory=list)
    adf_results: list = field(default_factory=list)
    coint_results: list = field(default_factory=list)
    blocks: list = field(default_factory=list)
    sink: Optional[Callable[[str], None]] = None
    echo: bool = False
    outdir: Optional[str] = None
    plots: list = field(default_factory=list)
    plot_count: int = 0
    plot_files: list = field(default_factory=list)
    script_dirs: list = field(default_factory=list)

    def __post_init__(self):
        if self.seed_override is not None:
            self.seed = self.seed_override
        if self.rng is None:
            self.rng = Rng(self.seed)

    # -- output --------------------------------------------------------------

    def emit(self, text):
        self.blocks.append(text)
        if self.sink is not None:
            self.sink(text)

    @property
    def output(self):
        return "\n".join(self.blocks)

    # -- lookups -------------------------------------------------------------

    def require_dataset(self) -> Dataset:
        if self.dataset is None:
            raise DataError("no dataset in memory (use open or nulldata first)")
        return self.dataset

    def series(self, name) -> Series:
        """Look a series up, creating ``d_X`` on first use when ``X`` exists."""
        ds = self.require_dataset()
        if name in ds:
            return ds[name]
        if name.startswith("d_") and name[2:] in ds:
            return ds.add(dsmod.diff(ds[name[2:]]))
        raise DataError(f"unknown series '{name}'")

    def resolve_accessor(self, name) -> Series:
        """``$yhat`` or ``$uhat`` of the last model, NA outside its sample."""
        m = self.last_model
        if m is None:
            raise DataError(f"{name}: no model has been estimated yet")
        if name == "$yhat":
            values = m.yhat
        elif name == "$uhat":
            values = m.uhat
        else:
            raise DataError(f"unknown accessor {name}")
        if self.dataset is None or m.dataset_nobs != self.dataset.nobs:
            raise DataError(f"{name}: the last model does not match the current dataset")
        return Series(name, regress.full_length(m, values))

    # -- execution -----------------------------------------------------------

    def execute(self, program):
        """Run every command of ``program`` (a ScriptProgram or command list)."""
        for index, cmd in enumerate(program):
            self.execute_command(cmd, index)
        return self

    def execute_command(self, cmd, index=0):
        if self.echo:
            self.emit(f"? {cmd}\n")
        handler = _HANDLERS.get(type(cmd))
        if handler is None:
            raise ScriptError(f"unsupported command {type(cmd).__name__}", index, cmd)
        try:
            handler(self, cmd)
        except ScriptError:
            raise
        except (OkunError, ValueError, OSError, ZeroDivisionError) as exc:
            raise ScriptError(str(exc), index, cmd) from exc

    # -- series assignment ---------------------------------------------------

    def assign_series(self, name, expr):
        """Evaluate ``expr`` and store it as series ``name``.

        Self-references through strictly negative lags are evaluated
        observation by observation, reading values already updated in this
        pass; observations whose self-lag would fall before the sample start
        keep their previous value.
        """
        ds = self.require_dataset()
        T = ds.nobs
        draws = {id(c): self._draw(c.func, T) for c in _calls(expr)}
        self_lags = [r.lag for r in _series_refs(expr) if r.name == name]
        if any(j == 0 for j in self_lags):
            raise DataError(f"series {name} refers to itself without a lag")
        if self_lags:
            if name not in ds:
                raise DataError(f"unknown series '{name}'")
            values = self._recursive(name, expr, -min(self_lags), draws)
        else:
            values = self._vector(expr, draws, T)
            if np.ndim(values) == 0:
                values = np.full(T, float(values))
        values = np.where(np.isfinite(values), values, np.nan)
        return ds.add(Series(name, values))

    def assign_scalar(self, name, expr):
        draws = {id(c): self._draw(c.func, 1) for c in _calls(expr)}
        val = self._vector(expr, draws, 1, scalar_only=True)
        if np.ndim(val) != 0:
            raise DataError(f"scalar {name}: expression yields a series")
        val = float(val)
        self.scalars[name] = val if math.isfinite(val) else float("nan")
        return self.scalars[name]

    def _draw(self, func, n):
        return self.rng.normal(n) if func == "normal" else self.rng.uniform(n)

    def _scalar(self, name):
        try:
            return self.scalars[name]
        except KeyError:
            raise DataError(f"unknown scalar '{name}'") from None

    def _is_scalar(self, ref):
        # scripts run line by line (REPL, -e) cannot tell scalars at parse time
        in_data = self.dataset is not None and ref.name in self.dataset
        return ref.lag == 0 and ref.name in self.scalars and not in_data

    def _ref_values(self, ref: sl.SeriesRef):
        s = self.series(ref.name)
        if ref.lag == 0:
            return s.values
        out = np.full(len(s), np.nan)
        k = -ref.lag
        if k < len(s):
            out[k:] = s.values[:-k]
        return out

    def _vector(self, node, draws, T, scalar_only=False):
        if isinstance(node, sl.Const):
            return np.float64(node.value)
        if isinstance(node, sl.ScalarRef):
            return np.float64(self._scalar(node.name))
        if isinstance(node, sl.SeriesRef):
            if self._is_scalar(node):
                return np.float64(self.scalars[node.name])
            if scalar_only:
                raise DataError(f"'{node.name}' is not a scalar")
            return self._ref_values(node)
        if isinstance(node, sl.Accessor):
            if scalar_only:
                raise DataError(f"{node.name} is a series")
            return self.resolve_accessor(node.name).values
        if isinstance(node, sl.Call):
            d = draws[id(node)]
            return np.float64(d[0]) if scalar_only else d
        if isinstance(node, sl.Unary):
            v = self._vector(node.operand, draws, T, scalar_only)
            return -v if node.op == "-" else v
        if isinstance(node, sl.Binary):
            a = self._vector(node.left, draws, T, scalar_only)
            b = self._vector(node.right, draws, T, scalar_only)
            with np.errstate(divide="ignore", invalid="ignore", over="ignore"):
                return _BINOPS[node.op](a, b)
        raise DataError(f"cannot evaluate {node!r}")

    def _recursive(self, name, expr, maxlag, draws):
        ds = self.dataset
        T = ds.nobs
        cur = ds[name].values.copy()
        # everything except the self-references can be precomputed
        cache = {}
        for ref in _series_refs(expr):
            if ref.name != name and ref not in cache:
                if self._is_scalar(ref):
                    cache[ref] = np.full(T, self.scalars[ref.name])
                else:
                    cache[ref] = self._ref_values(ref)
        for acc in _accessors(expr):
            cache[acc] = self.resolve_accessor(acc.name).values

        def at(node, t):
            if isinstance(node, sl.Const):
                return node.value
            if isinstance(node, sl.ScalarRef):
                return self._scalar(node.name)
            if isinstance(node, sl.SeriesRef):
                if node.name == name:
                    return cur[t + node.lag]
                return cache[node][t]
            if isinstance(node, sl.Accessor):
                return cache[node][t]
            if isinstance(node, sl.Call):
                return draws[id(node)][t]
            if isinstance(node, sl.Unary):
                v = at(node.operand, t)
                return -v if node.op == "-" else v
            a = at(node.left, t)
            b = at(node.right, t)
            return _scalar_binop(node.op, a, b)

        for t in range(maxlag, T):
            cur[t] = at(expr, t)
        return cur


def _scalar_binop(op, a, b):
    if math.isnan(a) or math.isnan(b):
        return math.nan
    if op == "+":
        return a + b
    if op == "-":
        return a - b
    if op == "*":
        return a * b
    if b == 0:
        return math.nan
    return a / b


_BINOPS = {
    "+": np.add,
    "-": np.subtract,
    "*": np.multiply,
    "/": np.divide,
}


def _walk(node):
    yield node
    if isinstance(node, sl.Unary):
        yield from _walk(node.operand)
    elif isinstance(node, sl.Binary):
        yield from _walk(node.left)
        yield from _walk(node.right)


def _calls(expr):
    return [n for n in _walk(expr) if isinstance(n, sl.Call)]


def _series_refs(expr):
    return [n for n in _walk(expr) if isinstance(n, sl.SeriesRef)]


def _accessors(expr):
    return [n for n in _walk(expr) if isinstance(n, sl.Accessor)]


# -- command handlers --------------------------------------------------------


def _resolve_path(session: Session, path, must_exist=True):
    path = os.path.expanduser(path)
    candidates = [path] if os.path.isabs(path) else (
        [os.path.join(d, path) for d in session.script_dirs[-1:]] + [path]
    )
    for cand in candidates:
        if os.path.exists(cand):
            return cand
    if must_exist:
        raise DataError(f"file not found: {path}")
    return candidates[0]


def _open_path(session, path):
    try:
        return _resolve_path(session, path)
    except DataError:
        stem, ext = os.path.splitext(path)
        if ext.lower() in _SPREADSHEET_EXT:
            # spreadsheets are read from a CSV export with the same stem
            try:
                return _resolve_path(session, stem + ".csv")
            except DataError:
                pass
        raise


def _do_open(s: Session, cmd: sl.Open):
    s.dataset = dsmod.load_csv(_open_path(s, cmd.path))
    s.last_model = None


def _do_run(s: Session, cmd: sl.Run):
    if len(s.script_dirs) >= MAX_RUN_DEPTH:
        raise DataError("run: scripts nested too deeply")
    path = _resolve_path(s, cmd.path)
    program = sl.parse_file(path)
    s.script_dirs.append(os.path.dirname(os.path.abspath(path)))
    try:
        s.execute(program)
    finally:
        s.script_dirs.pop()


def _do_nulldata(s, cmd):
    s.dataset = dsmod.nulldata(cmd.n)
    s.last_model = None


def _do_setobs(s, cmd):
    ds = s.require_dataset()
    ds.frequency = cmd.frequency
    ds.start_period = cmd.start


def _do_genr(s, cmd):
    s.require_dataset().add(dsmod.gen_time(s.dataset))


def _do_seed(s, cmd):
    s.seed = s.seed_override if s.seed_override is not None else cmd.seed
    s.rng = Rng(s.seed)


def _do_series(s, cmd):
    s.assign_series(cmd.name, cmd.expr)


def _do_scalar(s, cmd):
    s.assign_scalar(cmd.name, cmd.expr)


def _do_diff(s, cmd):
    ds = s.require_dataset()
    for name in cmd.names:
        ds.add(dsmod.diff(s.series(name)))


def _do_ols(s, cmd):
    ds = s.require_dataset()
    model = regress.ols(ds, cmd.dependent, cmd.regressors, lookup=s.series)
    for name, j in model.terms:
        if j > 0:
            lagged = regress.term_name(name, j)
            if lagged not in ds:
                ds.add(Series(lagged, dsmod.lag(s.series(name), j).values))
    s.models.append(model)
    s.last_model = model
    s.emit(report.render_model(model, f"Modelo {len(s.models)}", ds.series_id))


def _do_adf(s, cmd):
    ds = s.require_dataset()
    for name in cmd.series:
        res = unitroot.adf(ds, s.series(name), cmd.order, case=cmd.case,
                           testdown=cmd.test_down, difference=cmd.difference)
        s.adf_results.append(res)
        s.emit(report.render_adf(res))


def _do_coint(s, cmd):
    ds = s.require_dataset()
    for name in cmd.series:
        s.series(name)
    res = unitroot.coint(ds, cmd.order, cmd.series, case=cmd.case, testdown=cmd.test_down,
                         skip_df=cmd.skip_df, lookup=s.series)
    s.coint_results.append(res)
    s.emit(report.render_coint(res))


def _do_modtest(s, cmd):
    if cmd.test != "autocorr":
        raise DataError(f"modtest --{cmd.test} is not supported (only --autocorr)")
    if s.last_model is None:
        raise DataError("modtest: no model has been estimated yet")
    order = cmd.order if cmd.order is not None else s.require_dataset().frequency
    bg = diagnostics.breusch_godfrey(s.last_model, order)
    s.bg_results.append(bg)
    s.emit(report.render_bg(bg))


def _plot_name(s, kind, names):
    s.plot_count += 1
    return f"{kind}_{s.plot_count:02d}_" + "_".join(names)


def _x_axis(ds):
    if ds.frequency == 1:
        return np.arange(ds.start_period, ds.start_period + ds.nobs, dtype=float)
    return np.arange(1, ds.nobs + 1, dtype=float)


def _add_plot(s, spec):
    s.plots.append(spec)
    if s.outdir is not None:
        s.plot_files.extend(report.emit_plot(spec, s.outdir))


def _do_corrgm(s, cmd):
    ser = s.series(cmd.series)
    valid = int(np.sum(np.isfinite(ser.values)))
    maxlag = cmd.maxlag if cmd.maxlag is not None else default_corrgm_lag(valid)
    c = diagnostics.correlogram(ser.values, maxlag, name=cmd.series)
    s.emit(report.render_correlogram(c))
    lags = np.arange(1, c.maxlag + 1, dtype=float)
    _add_plot(s, report.PlotSpec(
        "correlogram", [cmd.series], _plot_name(s, "corrgm", [cmd.series]),
        columns={"lag": lags, "acf": c.acf, "pacf": c.pacf}, band=c.band,
        title=f"Correlograma de {cmd.series}",
    ))


def default_corrgm_lag(T):
    """Default maximum lag for ``corrgm`` when none is given."""
    return max(1, min(T - 1, int(10 * math.log10(max(T, 2)))))


def _do_gnuplot(s, cmd):
    ds = s.require_dataset()
    cols = {name: s.series(name).values for name in cmd.series}
    if cmd.time_series or len(cmd.series) == 1:
        columns = {"obs": _x_axis(ds), **cols}
        kind = "lines-time-series"
        with_lines = cmd.with_lines or cmd.time_series
    else:
        # gretl convention: the last series is the x variable
        names = list(cmd.series)
        columns = {names[-1]: cols[names[-1]], **{n: cols[n] for n in names[:-1]}}
        kind = "scatter"
        with_lines = cmd.with_lines
    _add_plot(s, report.PlotSpec(kind, list(cmd.series), _plot_name(s, "gnuplot", cmd.series),
                                 columns=columns, with_lines=with_lines))


def _do_scatters(s, cmd):
    ds = s.require_dataset()
    x = _x_axis(ds)
    base = _plot_name(s, "scatters", cmd.series)
    for name in cmd.series:
        spec = report.PlotSpec("multi-panel", [name], f"{base}_panel_{name}",
                               columns={"obs": x, name: s.series(name).values}, with_lines=True)
        s.plots.append(spec)
        if s.outdir is not None:
            s.plot_files.extend(report.emit_plot(spec, s.outdir))


_HANDLERS = {
    sl.Open: _do_open,
    sl.Run: _do_run,
    sl.Nulldata: _do_nulldata,
    sl.Setobs: _do_setobs,
    sl.Genr: _do_genr,
    sl.SetSeed: _do_seed,
    sl.SeriesAssign: _do_series,
    sl.ScalarAssign: _do_scalar,
    sl.Diff: _do_diff,
    sl.Ols: _do_ols,
    sl.Adf: _do_adf,
    sl.Coint: _do_coint,
    sl.Modtest: _do_modtest,
    sl.Corrgm: _do_corrgm,
    sl.Gnuplot: _do_gnuplot,
    sl.Scatters: _do_scatters,
}


def execute(program, session: Optional[Session] = None) -> Session:
    """Execute ``program`` on ``session`` (a fresh one when omitted)."""
    session = session if session is not None else Session()
    return session.execute(program)


def run_file(path, session: Optional[Session] = None) -> Session:
    """Parse and execute a script file; relative paths inside resolve against it."""
    session = session if session is not None else Session()
    program = sl.parse_file(path)
    session.script_dirs.append(os.path.dirname(os.path.abspath(path)))
    try:
        return session.execute(program)
    finally:
        session.script_dirs.pop()
