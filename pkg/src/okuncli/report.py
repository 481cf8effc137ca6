"""Gretl-style text blocks and gnuplot plot files.

Labels follow gretl's Spanish output with accents dropped; numbers use ``.``
decimals.  Number formats reproduce gretl's printing rules closely enough
that published gretl blocks can be compared token by token.
"""

from __future__ import annotations

import math
import os
from dataclasses import dataclass, field

import numpy as np

from .diagnostics import BgResult, Correlogram
from .regress import OlsModel, SelectionRow
from .unitroot import CASE_MODEL, AdfResult, CointResult

# -- number formats ----------------------------------------------------------


def fmt_coef(x):
    return f"{x:#.6g}"


def fmt_t(x):
    return f"{x:#.4g}"


def fmt_p(p):
    if not math.isfinite(p):
        return "NA"
    return f"{p:.4f}" if p >= 1e-4 else f"{p:.2e}"


def stars(p):
    if not math.isfinite(p):
        return ""
    if p < 0.01:
        return "***"
    if p < 0.05:
        return "**"
    if p < 0.1:
        return "*"
    return ""


def fmt_stat(x):
    """Summary-statistic format used in the footer of a model block."""
    if x is None or not math.isfinite(x):
        return "NA"
    ax = abs(x)
    if ax != 0 and (ax >= 1e6 or ax < 1e-4):
        return f"{x:.2e}"
    if ax < 1:
        return f"{x:.6f}"
    return f"{x:#.7g}"


# -- models ------------------------------------------------------------------

_HEADER = "             Coeficiente    Desv. Tipica   Estadistico t   Valor p"
_RULE = "  " + "-" * 65


def coefficient_table(model: OlsModel, rule=True):
    lines = [_HEADER]
    if rule:
        lines.append(_RULE)
    width = max(10, max(len(n) for n in model.names) + 1)
    for name, b, s, t, p in zip(model.names, model.beta, model.se, model.tstat, model.pval):
        lines.append(
            f"  {name:<{width}}{fmt_coef(b):>13}{fmt_coef(s):>15}{fmt_t(t):>15}"
            f"{fmt_p(p):>13} {stars(p)}".rstrip()
        )
    return lines


def _pair(l1, v1, l2, v2):
    return f"{l1:<22}{fmt_stat(v1):>11}   {l2:<22}{fmt_stat(v2):>11}"


def model_footer(model: OlsModel, with_f=True):
    lines = [
        _pair("Media de la vble. dep.", model.mean_y, "D.T. de la vble. dep.", model.sd_y),
        _pair("Suma de cuad. residuos", model.ssr, "D.T. de la regresion", model.ser),
        _pair("R-cuadrado", model.r2, "R-cuadrado corregido", model.adjr2),
    ]
    if with_f and model.F is not None:
        lines.append(_pair(f"F({model.k - int(model.has_const)}, {model.df_resid})", model.F,
                           "Valor p (de F)", model.pF))
    lines.append(_pair("Log-verosimilitud", model.loglik, "Criterio de Akaike", model.aic))
    lines.append(_pair("Criterio de Schwarz", model.bic, "Crit. de Hannan-Quinn", model.hqc))
    if model.durbin_h is not None:
        lines.append(_pair("rho", model.rho, "h de Durbin", model.durbin_h))
    else:
        lines.append(_pair("rho", model.rho, "Durbin-Watson", model.dw))
    return lines


def sample_line(model: OlsModel):
    label = model.sample_label or f"1-{model.T}"
    return f"MCO, usando las observaciones {label} (T = {model.T})"


def max_pvalue_note(model: OlsModel, series_id=None):
    """Highest slope p-value note, shown once a model has three or more slopes."""
    slopes = model.slope_indices()
    if len(slopes) < 3:
        return None
    i = max(slopes, key=lambda j: model.pval[j])
    if not model.pval[i] > 0.10:
        return None
    name = model.names[i]
    vid = series_id(name) if series_id else i
    return f"Sin considerar la constante, el valor p mas alto fue el de la variable {vid} ({name})"


def render_model(model: OlsModel, title="", series_id=None):
    """Full OLS block: header, coefficient table and the statistic footer.

    Parameters
    ----------
    model : OlsModel
    title : str
        Prefix such as ``"Modelo 3"``; omitted when empty.
    series_id : callable, optional
        Maps a regressor name to its dataset id for the max-p-value note.
    """
    head = sample_line(model)
    lines = [f"{title}: {head}" if title else head, f"Variable dependiente: {model.dependent}", ""]
    lines += coefficient_table(model)
    lines.append("")
    lines += model_footer(model)
    note = max_pvalue_note(model, series_id)
    if note:
        lines += ["", note]
    return "\n".join(lines) + "\n"


# -- unit roots --------------------------------------------------------------

_CASE_LINE = {
    "nc": None,
    "c": "   contraste con constante ",
    "ct": "   con constante y tendencia ",
}


def mic_lines(result: AdfResult):
    return [f"MIC = {m:g} for k = {k:02d}" for k, m in result.mic_trace]


def _lag_phrase(k, name):
    if k == 1:
        return f"incluyendo un retardo de (1-L){name}"
    return f"incluyendo {k} retardos de (1-L){name}"


def adf_summary(result: AdfResult, show_case=True):
    lines = [
        f"Contraste aumentado de Dickey-Fuller para {result.series}",
        _lag_phrase(result.chosen_k, result.series),
    ]
    if result.test_down:
        lines.append(f"(el maximo fue {result.kmax}, el criterio AIC modificado)")
    lines += [f"tamano muestral {result.T}", "hipotesis nula de raiz unitaria: a = 1", ""]
    if show_case and _CASE_LINE[result.case]:
        lines.append(_CASE_LINE[result.case])
    lines += [
        f"   modelo: {CASE_MODEL[result.case]}",
        f"   Coef. de autocorrelacion de primer orden de e: {result.rho1_of_e:.3f}",
        f"   valor estimado de (a - 1): {result.delta_hat:g}",
        f"   Estadistico de contraste: {result.tau_label} = {result.tau:g}",
        f"   valor p asintotico {result.pvalue:.4g}",
    ]
    return lines


def render_adf(result: AdfResult):
    """ADF block: MIC trace, test summary and the test regression."""
    lines = []
    if result.mic_trace:
        lines += mic_lines(result) + [""]
    lines += adf_summary(result)
    reg = result.regression
    lines += ["", "Regresion aumentada de Dickey-Fuller", sample_line(reg),
              f"Variable dependiente: {reg.dependent}", ""]
    lines += coefficient_table(reg, rule=False)
    lines += ["", f"  AIC: {reg.aic:#.6g}   BIC: {reg.bic:#.6g}   HQC: {reg.hqc:#.6g}"]
    return "\n".join(lines) + "\n"


def render_coint(result: CointResult):
    lines = []
    step = 1
    for pre in result.unit_root_tests:
        lines += [f"Etapa {step}: contrastando la existencia de una raiz unitaria en {pre.series}", ""]
        lines += adf_summary(pre) + [""]
        step += 1
    s1 = result.stage1
    lines += [f"Etapa {step}: regresion cointegrante", "", "Regresion cointegrante - ",
              sample_line(s1), f"Variable dependiente: {s1.dependent}", ""]
    lines += coefficient_table(s1)
    lines += [""] + model_footer(s1, with_f=False) + [""]
    step += 1
    lines += [f"Etapa {step}: contrastando la existencia de una raiz unitaria en uhat", ""]
    lines += adf_summary(result.stage2, show_case=False)
    lines += [
        "",
        "Hay evidencia de una relacion cointegrante si:",
        "(a) La hipotesis de existencia de raiz unitaria no se rechaza para las variables individuales.",
        "(b) La hipotesis de existencia de raiz unitaria se rechaza para los residuos (uhat) "
        "de la regresion cointegrante.",
    ]
    return "\n".join(lines) + "\n"


# -- diagnostics -------------------------------------------------------------


def render_bg(bg: BgResult):
    p = bg.order
    title = ("Contraste Breusch-Godfrey de autocorrelacion de primer orden" if p == 1
             else f"Contraste Breusch-Godfrey de autocorrelacion hasta el orden {p}")
    df1, df2 = bg.df
    lines = [title, sample_line(bg.aux), "Variable dependiente: uhat", ""]
    lines += coefficient_table(bg.aux)
    lines += [
        "",
        f"  R-cuadrado = {bg.r2:.6f}",
        "",
        f"Estadistico de contraste: LMF = {bg.lmf:.6f},",
        f"con valor p  = P(F({df1},{df2}) > {bg.lmf:g}) = {bg.lmf_pvalue:.3g}",
        "",
        f"Estadistico alternativo: TR^2 = {bg.tr2:.6f},",
        f"con valor p  = P(Chi-cuadrado({p}) > {bg.tr2:g}) = {bg.tr2_pvalue:.3g}",
        "",
        f"Ljung-Box Q' = {bg.q:g},",
        f"con valor p  = P(Chi-cuadrado({p}) > {bg.q:g}) = {bg.q_pvalue:.3g}",
    ]
    return "\n".join(lines) + "\n"


def _band_stars(r, T):
    z = abs(r) * math.sqrt(T)
    return "***" if z > 2.5758 else "**" if z > 1.96 else "*" if z > 1.6449 else ""


def render_correlogram(c: Correlogram):
    lines = [f"Funcion de autocorrelacion para {c.name}",
             "***, ** y * indican significatividad a los niveles del 1%, 5% y 10%",
             "utilizando desviacion tipica 1/T^0.5", ""]
    if c.maxlag < c.requested:
        lines += [f"(maximo retardo reducido a {c.maxlag}, T = {c.T})", ""]
    lines += ["  RETARDO      FAC           FACP          Estad-Q. [valor p]", ""]
    for j in range(c.maxlag):
        r, pr = c.acf[j], c.pacf[j]
        lines.append(
            f"  {j + 1:5d}   {r:8.4f} {_band_stars(r, c.T):<4} {pr:8.4f} {_band_stars(pr, c.T):<4}"
            f"  {c.q[j]:10.4f}  [{c.q_pvalue[j]:.3f}]"
        )
    return "\n".join(lines) + "\n"


def render_selection_table(rows: list[SelectionRow]):
    head = ("Ecuacion", "Autocorrelacion", "R2 corregido", "AIC", "Schwarz")
    cells = [head] + [r.formatted() for r in rows]
    widths = [max(len(row[i]) for row in cells) for i in range(5)]
    out = []
    for n, row in enumerate(cells):
        out.append(" | ".join(v.ljust(w) if i == 0 else v.rjust(w)
                              for i, (v, w) in enumerate(zip(row, widths))))
        if n == 0:
            out.append("-+-".join("-" * w for w in widths))
    return "\n".join(out) + "\n"


# -- plots -------------------------------------------------------------------

PLOT_KINDS = ("lines-time-series", "scatter", "correlogram", "multi-panel")


@dataclass
class PlotSpec:
    """What to draw: ``kind``, the series involved and the output basename.

    ``columns`` holds the data written to the ``.dat`` file in order; the
    first column is the x axis.
    """

    kind: str
    series: list
    basename: str
    columns: dict = field(default_factory=dict)
    with_lines: bool = True
    band: float | None = None
    title: str = ""

    def __post_init__(self):
        if self.kind not in PLOT_KINDS:
            raise ValueError(f"unknown plot kind {self.kind!r}")


def _cell(v):
    if isinstance(v, str):
        return v
    if not np.isfinite(v):
        return "?"
    v = float(v)
    return str(int(v)) if v.is_integer() and abs(v) < 1e15 else repr(v)


def write_dat(path, columns):
    names = list(columns)
    data = [np.asarray(columns[n]) if not isinstance(columns[n], list) else columns[n] for n in names]
    n = len(data[0])
    with open(path, "w", encoding="utf-8") as fh:
        fh.write("# " + "\t".join(names) + "\n")
        for i in range(n):
            fh.write("\t".join(_cell(col[i]) for col in data) + "\n")


def _gp_script(spec: PlotSpec, dat):
    names = list(spec.columns)
    style = "lines" if spec.with_lines else "points"
    lines = ['set datafile missing "?"', "set key outside"]
    if spec.title:
        lines.append(f'set title "{spec.title}"')
    if spec.kind == "correlogram":
        b = spec.band
        lines += ["set multiplot layout 2,1", "set xlabel \"retardo\"", "set yrange [-1:1]"]
        for col, label in ((2, "FAC"), (3, "FACP")):
            lines.append(
                f"plot '{dat}' using 1:{col} with impulses lw 2 title \"{label}\", "
                f"{b!r} with lines dt 2 title \"+-1.96/T^0.5\", {-b!r} with lines dt 2 notitle"
            )
        lines.append("unset multiplot")
    else:
        lines.append(f'set xlabel "{names[0]}"')
        parts = [
            f"'{dat}' using 1:{i} with {style} title \"{names[i - 1]}\""
            for i in range(2, len(names) + 1)
        ]
        lines.append("plot " + ", \\\n     ".join(parts))
    return "\n".join(lines) + "\n"


def emit_plot(spec: PlotSpec, outdir):
    """Write ``<basename>.dat`` and ``<basename>.gp`` under ``outdir``."""
    os.makedirs(outdir, exist_ok=True)
    dat = os.path.join(outdir, spec.basename + ".dat")
    gp = os.path.join(outdir, spec.basename + ".gp")
    write_dat(dat, spec.columns)
    with open(gp, "w", encoding="utf-8") as fh:
        fh.write(_gp_script(spec, os.path.basename(dat)))
    return [dat, gp]
