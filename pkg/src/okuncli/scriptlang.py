"""Lexer, AST and parser for the gretl-style command subset.

One command per line.  ``#`` starts a comment, a leading ``? `` console prompt
is ignored, and ``open``/``run`` take the rest of the line verbatim as a path.
Expressions on the right of ``series``/``scalar``/``genr`` assignments use the
usual precedence (unary minus, then ``* /``, then ``+ -``), left associative.
"""

from __future__ import annotations

import os
import re
from dataclasses import dataclass, field
from typing import Optional, Union

from .errors import ParseError

# -- tokens ------------------------------------------------------------------


@dataclass(frozen=True)
class Token:
    kind: str  # IDENT NUMBER FLAG STRING OP ACCESSOR NEWLINE
    value: object
    line: int = field(default=0, compare=False)
    col: int = field(default=0, compare=False)

    def __repr__(self):
        return f"{self.kind}({self.value!r})"


_TOKEN_RE = re.compile(
    r"""
    (?P<WS>[ \t\r]+)
  | (?P<FLAG>--(?P<fname>[A-Za-z][A-Za-z0-9-]*)(?:=(?P<fval>[^\s#]+))?)
  | (?P<NUMBER>(?:\d+\.?\d*|\.\d+)(?:[eE][+-]?\d+)?)
  | (?P<ACCESSOR>\$[A-Za-z_][A-Za-z0-9_]*)
  | (?P<IDENT>[A-Za-z_][A-Za-z0-9_]*)
  | (?P<STRING>"[^"\n]*")
  | (?P<OP>[-+*/=()])
    """,
    re.VERBOSE,
)

_PROMPT_RE = re.compile(r"^\s*\?(?:\s|$)")
_RAW_VERBS = ("open", "run")


def _strip_comment(text):
    # '#' inside a quoted string is not a comment
    in_str = False
    for i, ch in enumerate(text):
        if ch == '"':
            in_str = not in_str
        elif ch == "#" and not in_str:
            return text[:i]
    return text


def tokenize(source: str) -> list[Token]:
    """Split script text into tokens.

    A NEWLINE token closes every line that produced at least one token and
    was terminated by a line break.
    """
    tokens: list[Token] = []
    lines = source.split("\n")
    for lineno, raw in enumerate(lines, start=1):
        text = raw
        offset = 0
        m = _PROMPT_RE.match(text)
        if m:
            offset = m.end()
            text = text[offset:]
        text = _strip_comment(text)
        line_tokens = _tokenize_line(text, lineno, offset)
        if line_tokens:
            tokens.extend(line_tokens)
            if lineno < len(lines):
                tokens.append(Token("NEWLINE", "\n", lineno, len(raw) + 1))
    return tokens


def _tokenize_line(text, lineno, offset):
    out = []
    stripped = text.lstrip()
    lead = len(text) - len(stripped)
    head = stripped.split(None, 1)
    if head and head[0] in _RAW_VERBS:
        out.append(Token("IDENT", head[0], lineno, offset + lead + 1))
        rest = head[1].strip() if len(head) > 1 else ""
        if rest:
            if len(rest) >= 2 and rest[0] == rest[-1] == '"':
                rest = rest[1:-1]
            col = offset + text.index(rest) + 1 if rest in text else offset + 1
            out.append(Token("STRING", rest, lineno, col))
        return out
    pos = 0
    while pos < len(text):
        m = _TOKEN_RE.match(text, pos)
        if m is None:
            raise ParseError(f"illegal character {text[pos]!r}", lineno, offset + pos + 1)
        kind = m.lastgroup
        col = offset + pos + 1
        if kind == "FLAG":
            out.append(Token("FLAG", (m.group("fname"), m.group("fval")), lineno, col))
        elif kind == "NUMBER":
            s = m.group(kind)
            val = float(s) if any(c in s for c in ".eE") else int(s)
            out.append(Token("NUMBER", val, lineno, col))
        elif kind == "STRING":
            out.append(Token("STRING", m.group(kind)[1:-1], lineno, col))
        elif kind != "WS":
            out.append(Token(kind, m.group(kind), lineno, col))
        pos = m.end()
    return out


# -- expression AST ----------------------------------------------------------


@dataclass(frozen=True)
class Const:
    value: float

    def __str__(self):
        v = self.value
        return repr(int(v)) if float(v).is_integer() and abs(v) < 1e15 else repr(float(v))


@dataclass(frozen=True)
class SeriesRef:
    name: str
    lag: int = 0

    def __str__(self):
        return self.name if self.lag == 0 else f"{self.name}({self.lag})"


@dataclass(frozen=True)
class ScalarRef:
    name: str

    def __str__(self):
        return self.name


@dataclass(frozen=True)
class Accessor:
    name: str  # "$yhat" or "$uhat"

    def __str__(self):
        return self.name


@dataclass(frozen=True)
class Call:
    func: str  # "normal" or "uniform"

    def __str__(self):
        return f"{self.func}()"


@dataclass(frozen=True)
class Unary:
    op: str
    operand: "Expr"

    def __str__(self):
        inner = str(self.operand)
        if isinstance(self.operand, Binary):
            inner = f"({inner})"
        return f"-{inner}"


_PREC = {"+": 1, "-": 1, "*": 2, "/": 2}


@dataclass(frozen=True)
class Binary:
    op: str
    left: "Expr"
    right: "Expr"

    def __str__(self):
        p = _PREC[self.op]
        left = str(self.left)
        if isinstance(self.left, Binary) and _PREC[self.left.op] < p:
            left = f"({left})"
        right = str(self.right)
        # left associativity: an equal-precedence right operand needs parens
        if isinstance(self.right, Binary) and _PREC[self.right.op] <= p:
            right = f"({right})"
        return f"{left} {self.op} {right}"


Expr = Union[Const, SeriesRef, ScalarRef, Accessor, Call, Unary, Binary]

ACCESSORS = ("$yhat", "$uhat")
RANDOM_FUNCS = ("normal", "uniform")


@dataclass(frozen=True)
class Intercept:
    def __str__(self):
        return "const"


@dataclass(frozen=True)
class LagRangeSpec:
    """``name(0 to -k)``: the series and its lags 1..k."""

    name: str
    start: int = 0
    stop: int = -1

    def __post_init__(self):
        if not self.stop <= self.start == 0:
            raise ValueError("lag range must run from 0 to a non-positive lag")

    def lags(self):
        return range(-self.start, -self.stop + 1)

    def __str__(self):
        return f"{self.name}({self.start} to {self.stop})"


Regressor = Union[Intercept, SeriesRef, LagRangeSpec]


# -- commands ----------------------------------------------------------------


def _flags(**flags):
    return "".join(
        f" --{name}" if val is True else f" --{name}={val}"
        for name, val in flags.items()
        if val
    )


@dataclass(frozen=True)
class Command:
    line: int = field(default=0, compare=False, kw_only=True)


@dataclass(frozen=True)
class Open(Command):
    path: str

    def __str__(self):
        return f'open "{self.path}"' if " " in self.path else f"open {self.path}"


@dataclass(frozen=True)
class Run(Command):
    path: str

    def __str__(self):
        return f'run "{self.path}"' if " " in self.path else f"run {self.path}"


@dataclass(frozen=True)
class Nulldata(Command):
    n: int

    def __str__(self):
        return f"nulldata {self.n}"


@dataclass(frozen=True)
class Setobs(Command):
    frequency: int
    start: int
    time_series: bool = False

    def __str__(self):
        return f"setobs {self.frequency} {self.start}" + _flags(**{"time-series": self.time_series})


@dataclass(frozen=True)
class Genr(Command):
    """``genr time``; every other genr form is parsed as a series assignment."""

    name: str = "time"

    def __str__(self):
        return f"genr {self.name}"


@dataclass(frozen=True)
class SetSeed(Command):
    seed: int

    def __str__(self):
        return f"set seed {self.seed}"


@dataclass(frozen=True)
class SeriesAssign(Command):
    name: str
    expr: Expr

    def __str__(self):
        return f"series {self.name} = {self.expr}"


@dataclass(frozen=True)
class ScalarAssign(Command):
    name: str
    expr: Expr

    def __str__(self):
        return f"scalar {self.name} = {self.expr}"


@dataclass(frozen=True)
class Diff(Command):
    names: tuple[str, ...]

    def __str__(self):
        return "diff " + " ".join(self.names)


@dataclass(frozen=True)
class Ols(Command):
    dependent: str
    regressors: tuple[Regressor, ...]

    def __str__(self):
        return f"ols {self.dependent} " + " ".join(str(r) for r in self.regressors)


@dataclass(frozen=True)
class Adf(Command):
    order: int
    series: tuple[str, ...]
    case: str = "c"  # "nc", "c" or "ct"
    test_down: Optional[str] = None  # None or "MAIC"
    difference: bool = False

    def __str__(self):
        return f"adf {self.order} " + " ".join(self.series) + _flags(
            **{self.case: True, "difference": self.difference, "test-down": self.test_down}
        )


@dataclass(frozen=True)
class Coint(Command):
    order: int
    series: tuple[str, ...]
    case: str = "c"
    test_down: Optional[str] = None
    skip_df: bool = False

    def __str__(self):
        return f"coint {self.order} " + " ".join(self.series) + _flags(
            **{self.case: True, "skip-df": self.skip_df, "test-down": self.test_down}
        )


@dataclass(frozen=True)
class Modtest(Command):
    test: str  # one of MODTEST_FLAGS
    order: Optional[int] = None

    def __str__(self):
        s = f"modtest --{self.test}"
        return s if self.order is None else f"{s} {self.order}"


@dataclass(frozen=True)
class Corrgm(Command):
    series: str
    maxlag: Optional[int] = None

    def __str__(self):
        return f"corrgm {self.series}" + ("" if self.maxlag is None else f" {self.maxlag}")


@dataclass(frozen=True)
class Gnuplot(Command):
    series: tuple[str, ...]
    time_series: bool = False
    with_lines: bool = False

    def __str__(self):
        return "gnuplot " + " ".join(self.series) + _flags(
            **{"time-series": self.time_series, "with-lines": self.with_lines}
        )


@dataclass(frozen=True)
class Scatters(Command):
    series: tuple[str, ...]

    def __str__(self):
        return "scatters " + " ".join(self.series)


@dataclass(frozen=True)
class ScriptProgram:
    commands: tuple[Command, ...]
    source: Optional[str] = field(default=None, compare=False)

    def __len__(self):
        return len(self.commands)

    def __iter__(self):
        return iter(self.commands)

    def __str__(self):
        return "".join(f"{c}\n" for c in self.commands)


MODTEST_FLAGS = ("normality", "logs", "squares", "autocorr", "white", "breusch-pagan")

# flag name -> whether it takes a value (None: forbidden, "opt": optional)
_ALLOWED_FLAGS = {
    "setobs": {"time-series": None},
    "adf": {"c": None, "ct": None, "nc": None, "difference": None, "test-down": "opt"},
    "coint": {"c": None, "ct": None, "nc": None, "skip-df": None, "test-down": "opt"},
    "modtest": {name: None for name in MODTEST_FLAGS},
    "gnuplot": {"with-lines": None, "time-series": None},
}

RESERVED = {"const"}


# -- parser ------------------------------------------------------------------


class _Line:
    """Cursor over the tokens of a single command line."""

    def __init__(self, tokens, lineno):
        self.tokens = tokens
        self.pos = 0
        self.lineno = lineno

    def peek(self):
        return self.tokens[self.pos] if self.pos < len(self.tokens) else None

    def next(self):
        tok = self.peek()
        if tok is None:
            raise ParseError("unexpected end of command", self.lineno)
        self.pos += 1
        return tok

    def expect(self, kind, value=None):
        tok = self.next()
        if tok.kind != kind or (value is not None and tok.value != value):
            want = value if value is not None else kind.lower()
            raise ParseError(f"expected {want}, found {_show(tok)}", tok.line, tok.col)
        return tok

    def at_end(self):
        return self.pos >= len(self.tokens)


def _show(tok):
    if tok.kind == "FLAG":
        name, val = tok.value
        return f"'--{name}'" + (f"={val}" if val else "")
    return f"'{tok.value}'"


def _split_lines(tokens):
    line = []
    for tok in tokens:
        if tok.kind == "NEWLINE":
            if line:
                yield line
            line = []
        else:
            line.append(tok)
    if line:
        yield line


def parse(tokens) -> ScriptProgram:
    """Build a :class:`ScriptProgram` from a token list."""
    commands = []
    scalars: set[str] = set()
    for line_tokens in _split_lines(tokens):
        cmd = _parse_command(line_tokens, scalars)
        commands.append(cmd)
    return ScriptProgram(tuple(commands))


def parse_source(source: str) -> ScriptProgram:
    prog = parse(tokenize(source))
    return ScriptProgram(prog.commands, source=source)


def parse_file(path) -> ScriptProgram:
    path = os.fspath(path)
    with open(path, encoding="utf-8") as fh:
        source = fh.read()
    return parse_source(source)


def _pull_flags(tokens, verb):
    """Separate option flags (allowed anywhere on the line) from arguments."""
    allowed = _ALLOWED_FLAGS.get(verb, {})
    args, flags = [], {}
    for tok in tokens:
        if tok.kind != "FLAG":
            args.append(tok)
            continue
        name, val = tok.value
        if name not in allowed:
            raise ParseError(f"unknown option '--{name}' for {verb}", tok.line, tok.col)
        if val is not None and allowed[name] is None:
            raise ParseError(f"option '--{name}' takes no value", tok.line, tok.col)
        flags[name] = True if val is None else val
    return args, flags


def _parse_command(tokens, scalars):
    head = tokens[0]
    if head.kind != "IDENT":
        raise ParseError(f"expected a command, found {_show(head)}", head.line, head.col)
    verb = head.value
    lineno = head.line
    args, flags = _pull_flags(tokens[1:], verb)
    cur = _Line(args, lineno)
    parser = _COMMANDS.get(verb)
    if parser is None:
        raise ParseError(f"unknown command '{verb}'", lineno, head.col)
    cmd = parser(cur, flags, scalars, lineno)
    if not cur.at_end():
        tok = cur.peek()
        raise ParseError(f"unexpected {_show(tok)} after {verb} command", tok.line, tok.col)
    return cmd


def _int_arg(cur, what):
    tok = cur.next()
    if tok.kind != "NUMBER" or not isinstance(tok.value, int):
        raise ParseError(f"{what} must be an integer, found {_show(tok)}", tok.line, tok.col)
    return tok.value


def _ident_arg(cur, what="series name"):
    tok = cur.next()
    if tok.kind != "IDENT":
        raise ParseError(f"expected {what}, found {_show(tok)}", tok.line, tok.col)
    return tok.value


def _ident_list(cur, verb, minimum=1):
    names = []
    while not cur.at_end():
        names.append(_ident_arg(cur))
    if len(names) < minimum:
        raise ParseError(f"{verb} needs at least {minimum} series name(s)", cur.lineno)
    return tuple(names)


def _path_arg(cur, verb):
    tok = cur.next() if not cur.at_end() else None
    if tok is None or tok.kind != "STRING":
        raise ParseError(f"{verb} needs a file name", cur.lineno)
    return tok.value


def _p_open(cur, flags, scalars, line):
    return Open(_path_arg(cur, "open"), line=line)


def _p_run(cur, flags, scalars, line):
    return Run(_path_arg(cur, "run"), line=line)


def _p_nulldata(cur, flags, scalars, line):
    n = _int_arg(cur, "observation count")
    if n < 1:
        raise ParseError("nulldata needs a positive observation count", line)
    return Nulldata(n, line=line)


def _p_setobs(cur, flags, scalars, line):
    freq = _int_arg(cur, "frequency")
    if freq < 1:
        raise ParseError("setobs frequency must be positive", line)
    start = _int_arg(cur, "starting period")
    return Setobs(freq, start, time_series=bool(flags.get("time-series")), line=line)


def _p_set(cur, flags, scalars, line):
    var = _ident_arg(cur, "setting name")
    if var != "seed":
        raise ParseError(f"unsupported setting '{var}'", line)
    return SetSeed(_int_arg(cur, "seed"), line=line)


def _assignment(cur, line):
    name = _ident_arg(cur, "variable name")
    if name in RESERVED:
        raise ParseError(f"'{name}' is reserved", line)
    cur.expect("OP", "=")
    return name


def _p_series(cur, flags, scalars, line):
    name = _assignment(cur, line)
    scalars.discard(name)
    return SeriesAssign(name, _parse_expr(cur, scalars), line=line)


def _p_scalar(cur, flags, scalars, line):
    name = _assignment(cur, line)
    expr = _parse_expr(cur, scalars)
    scalars.add(name)
    return ScalarAssign(name, expr, line=line)


def _p_genr(cur, flags, scalars, line):
    if len(cur.tokens) == 1:
        name = _ident_arg(cur)
        if name != "time":
            raise ParseError(f"genr {name}: only 'genr time' is supported", line)
        return Genr("time", line=line)
    return _p_series(cur, flags, scalars, line)


def _p_diff(cur, flags, scalars, line):
    return Diff(_ident_list(cur, "diff"), line=line)


def _p_ols(cur, flags, scalars, line):
    dep = _ident_arg(cur, "dependent variable")
    regs = []
    while not cur.at_end():
        regs.append(_parse_regressor(cur))
    if not regs:
        raise ParseError("ols needs at least one regressor", line)
    return Ols(dep, tuple(regs), line=line)


def _parse_regressor(cur):
    name = _ident_arg(cur, "regressor")
    if name == "const":
        return Intercept()
    tok = cur.peek()
    if tok is None or tok.kind != "OP" or tok.value != "(":
        return SeriesRef(name, 0)
    cur.next()
    first = _signed_int(cur)
    tok = cur.peek()
    if tok is not None and tok.kind == "IDENT" and tok.value == "to":
        cur.next()
        last = _signed_int(cur)
        cur.expect("OP", ")")
        if first != 0 or last > 0:
            raise ParseError(f"lag range must be '(0 to -k)', got ({first} to {last})", tok.line)
        if last == 0:
            return SeriesRef(name, 0)
        return LagRangeSpec(name, 0, last)
    cur.expect("OP", ")")
    if first > 0:
        raise ParseError(f"leads are not supported: {name}({first})", cur.lineno)
    return SeriesRef(name, first)


def _signed_int(cur):
    sign = 1
    tok = cur.peek()
    if tok is not None and tok.kind == "OP" and tok.value in "+-":
        cur.next()
        sign = -1 if tok.value == "-" else 1
    return sign * _int_arg(cur, "lag")


def _case_from(flags, verb, line):
    cases = [c for c in ("nc", "c", "ct") if flags.get(c)]
    if len(cases) > 1:
        raise ParseError(f"{verb}: options --{' --'.join(cases)} are mutually exclusive", line)
    return cases[0] if cases else "c"


def _test_down(flags, line):
    val = flags.get("test-down")
    if val is None:
        return None
    if val is True or str(val).upper() == "MAIC":
        return "MAIC"
    raise ParseError(f"unsupported --test-down criterion '{val}' (only MAIC)", line)


def _p_adf(cur, flags, scalars, line):
    order = _int_arg(cur, "lag order")
    if order < 0:
        raise ParseError("adf lag order must be non-negative", line)
    return Adf(
        order,
        _ident_list(cur, "adf"),
        case=_case_from(flags, "adf", line),
        test_down=_test_down(flags, line),
        difference=bool(flags.get("difference")),
        line=line,
    )


def _p_coint(cur, flags, scalars, line):
    order = _int_arg(cur, "lag order")
    if order < 0:
        raise ParseError("coint lag order must be non-negative", line)
    return Coint(
        order,
        _ident_list(cur, "coint", minimum=2),
        case=_case_from(flags, "coint", line),
        test_down=_test_down(flags, line),
        skip_df=bool(flags.get("skip-df")),
        line=line,
    )


def _p_modtest(cur, flags, scalars, line):
    tests = [f for f in MODTEST_FLAGS if f in flags]
    if len(tests) != 1:
        raise ParseError("modtest needs exactly one test option", line)
    order = _int_arg(cur, "order") if not cur.at_end() else None
    return Modtest(tests[0], order, line=line)


def _p_corrgm(cur, flags, scalars, line):
    name = _ident_arg(cur)
    maxlag = _int_arg(cur, "maximum lag") if not cur.at_end() else None
    if maxlag is not None and maxlag < 1:
        raise ParseError("corrgm maximum lag must be positive", line)
    return Corrgm(name, maxlag, line=line)


def _p_gnuplot(cur, flags, scalars, line):
    return Gnuplot(
        _ident_list(cur, "gnuplot"),
        time_series=bool(flags.get("time-series")),
        with_lines=bool(flags.get("with-lines")),
        line=line,
    )


def _p_scatters(cur, flags, scalars, line):
    return Scatters(_ident_list(cur, "scatters"), line=line)


_COMMANDS = {
    "open": _p_open,
    "run": _p_run,
    "nulldata": _p_nulldata,
    "setobs": _p_setobs,
    "set": _p_set,
    "genr": _p_genr,
    "series": _p_series,
    "scalar": _p_scalar,
    "diff": _p_diff,
    "ols": _p_ols,
    "adf": _p_adf,
    "coint": _p_coint,
    "modtest": _p_modtest,
    "corrgm": _p_corrgm,
    "gnuplot": _p_gnuplot,
    "scatters": _p_scatters,
}


# -- expressions -------------------------------------------------------------


def _parse_expr(cur, scalars):
    expr = _parse_sum(cur, scalars)
    return expr


def _parse_sum(cur, scalars):
    left = _parse_product(cur, scalars)
    while True:
        tok = cur.peek()
        if tok is None or tok.kind != "OP" or tok.value not in "+-":
            return left
        cur.next()
        left = Binary(tok.value, left, _parse_product(cur, scalars))


def _parse_product(cur, scalars):
    left = _parse_unary(cur, scalars)
    while True:
        tok = cur.peek()
        if tok is None or tok.kind != "OP" or tok.value not in "*/":
            return left
        cur.next()
        left = Binary(tok.value, left, _parse_unary(cur, scalars))


def _parse_unary(cur, scalars):
    tok = cur.peek()
    if tok is not None and tok.kind == "OP" and tok.value in "+-":
        cur.next()
        operand = _parse_unary(cur, scalars)
        return operand if tok.value == "+" else Unary("-", operand)
    return _parse_primary(cur, scalars)


def _parse_primary(cur, scalars):
    tok = cur.next()
    if tok.kind == "NUMBER":
        return Const(float(tok.value))
    if tok.kind == "ACCESSOR":
        if tok.value not in ACCESSORS:
            raise ParseError(f"unknown accessor {tok.value}", tok.line, tok.col)
        return Accessor(tok.value)
    if tok.kind == "OP" and tok.value == "(":
        inner = _parse_sum(cur, scalars)
        cur.expect("OP", ")")
        return inner
    if tok.kind == "IDENT":
        if tok.value in RESERVED:
            raise ParseError(f"'{tok.value}' cannot appear in an expression", tok.line, tok.col)
        nxt = cur.peek()
        if nxt is not None and nxt.kind == "OP" and nxt.value == "(":
            cur.next()
            if tok.value in RANDOM_FUNCS:
                cur.expect("OP", ")")
                return Call(tok.value)
            lagv = _signed_int(cur)
            cur.expect("OP", ")")
            if lagv > 0:
                raise ParseError(f"leads are not supported: {tok.value}({lagv})", tok.line, tok.col)
            if tok.value in scalars:
                raise ParseError(f"scalar '{tok.value}' cannot be lagged", tok.line, tok.col)
            return SeriesRef(tok.value, lagv)
        if tok.value in scalars:
            return ScalarRef(tok.value)
        return SeriesRef(tok.value, 0)
    raise ParseError(f"unexpected {_show(tok)} in expression", tok.line, tok.col)
