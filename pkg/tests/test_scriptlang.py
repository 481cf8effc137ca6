import pytest

from okuncli.errors import ParseError
from okuncli.scriptlang import (
    Adf, Binary, Call, Coint, Const, Corrgm, Genr, Gnuplot, Intercept, LagRangeSpec,
    Modtest, Nulldata, Ols, Open, ScalarAssign, ScalarRef, SeriesAssign, SeriesRef,
    Setobs, SetSeed, Token, Unary, parse, parse_file, parse_source, tokenize,
)

from conftest import CORPUS, SCRIPTS


def kinds_values(tokens):
    return [(t.kind, t.value) for t in tokens]


def test_tokenize_ols():
    toks = tokenize("ols d_u const d_y")
    assert kinds_values(toks) == [
        ("IDENT", "ols"), ("IDENT", "d_u"), ("IDENT", "const"), ("IDENT", "d_y")
    ]


def test_tokenize_flags():
    toks = tokenize("adf 9 y --ct --test-down=MAIC")
    assert Token("FLAG", ("ct", None)) in toks
    assert Token("FLAG", ("test-down", "MAIC")) in toks
    assert toks[1] == Token("NUMBER", 9)


def test_tokenize_comment_only():
    assert tokenize("# comment\n") == []


def test_tokenize_prompt_and_positions():
    toks = tokenize("? diff u y\n")
    assert kinds_values(toks)[:3] == [("IDENT", "diff"), ("IDENT", "u"), ("IDENT", "y")]
    assert toks[0].col == 3
    assert toks[-1].kind == "NEWLINE"


def test_tokenize_numbers():
    toks = tokenize("scalar a = 1.5e-3 + .5")
    nums = [t.value for t in toks if t.kind == "NUMBER"]
    assert nums == [1.5e-3, 0.5]


def test_comma_decimal_rejected():
    with pytest.raises(ParseError):
        parse_source("scalar phi = 0,5")


def test_illegal_character():
    with pytest.raises(ParseError, match="column 12"):
        tokenize("series y = @")


def test_parse_ar1_recursion():
    prog = parse_source("scalar phi = .5\nseries y = phi * y(-1) + e")
    expected = Binary("+", Binary("*", ScalarRef("phi"), SeriesRef("y", -1)), SeriesRef("e", 0))
    assert prog.commands[0] == ScalarAssign("phi", Const(0.5))
    assert prog.commands[1] == SeriesAssign("y", expected)


def test_parse_lag_range():
    (cmd,) = parse_source("ols d_u const d_y(0 to -1) d_u(-1)").commands
    assert cmd == Ols("d_u", (Intercept(), LagRangeSpec("d_y", 0, -1), SeriesRef("d_u", -1)))
    assert list(cmd.regressors[1].lags()) == [0, 1]


def test_parse_setobs():
    (cmd,) = parse_source("setobs 1 1980 --time-series").commands
    assert cmd == Setobs(1, 1980, True)


def test_parse_misc_commands():
    prog = parse_source(
        "nulldata 100\ngenr time\nset seed 7777777\n"
        "adf 9 u --c --test-down=MAIC\ncoint 9 y u --test-down\n"
        "modtest --autocorr 2\ncorrgm resid 12\ngnuplot u y --time-series --with-lines\n"
        "series e = normal()\nseries x = -e / 2\n"
    )
    c = prog.commands
    assert c[0] == Nulldata(100)
    assert c[1] == Genr("time")
    assert c[2] == SetSeed(7777777)
    assert c[3] == Adf(9, ("u",), "c", "MAIC")
    assert c[4] == Coint(9, ("y", "u"), "c", "MAIC")
    assert c[5] == Modtest("autocorr", 2)
    assert c[6] == Corrgm("resid", 12)
    assert c[7] == Gnuplot(("u", "y"), True, True)
    assert c[8] == SeriesAssign("e", Call("normal"))
    assert c[9] == SeriesAssign("x", Binary("/", Unary("-", SeriesRef("e")), Const(2.0)))


def test_open_takes_raw_path():
    (cmd,) = parse_source("? open ~/my data/tfg.xls").commands
    assert cmd == Open("~/my data/tfg.xls")


def test_precedence_and_associativity():
    (cmd,) = parse_source("series z = a - b - c * d").commands
    assert cmd.expr == Binary(
        "-", Binary("-", SeriesRef("a"), SeriesRef("b")), Binary("*", SeriesRef("c"), SeriesRef("d"))
    )


@pytest.mark.parametrize(
    "src",
    [
        "series y = phi * y(-1) + e",
        "series z = a - (b - c)",
        "series z = a / (b * c)",
        "series z = -(a + b) * 2",
        "ols d_u const d_y(0 to -1) d_u(-1)",
        "adf 9 y --ct --test-down=MAIC",
        "coint 9 y u --skip-df",
        "setobs 1 1980 --time-series",
        "series yhat = $yhat",
        "open \"/tmp/a b/c.csv\"",
        "modtest --autocorr",
    ],
)
def test_print_parse_fixed_point(src):
    prog = parse_source(src)
    again = parse_source(str(prog))
    assert again == prog
    assert parse_source(str(again)) == again


def test_corpus_listings_parse():
    for path in sorted(CORPUS.glob("*.inp")) + sorted(SCRIPTS.glob("*.inp")):
        prog = parse_file(path)
        assert len(prog) > 0, path
        assert parse_source(str(prog)) == prog


def test_ar1_listing_command_count():
    # the listing has 10 commands once comments and blanks are dropped
    prog = parse_file(CORPUS / "ar1_listing.inp")
    assert len(prog) == 10
    assert type(prog.commands[-1]).__name__ == "Corrgm"


def test_empty_file(tmp_path):
    p = tmp_path / "empty.inp"
    p.write_text("")
    assert len(parse_file(p)) == 0


def test_bogus_flag_named():
    with pytest.raises(ParseError, match="--bogus"):
        parse_source("ols d_u const d_y --bogus")


@pytest.mark.parametrize(
    "src",
    [
        "frobnicate x",
        "series y = y(1)",
        "scalar a = 1\nseries b = a(-1)",
        "ols y const d_y(-1 to -2)",
        "adf y 9",
        "series y = const + 1",
        "series y = (a + b",
        "setobs 1 1980 --with-lines",
        "modtest --autocorr=2",
    ],
)
def test_parse_errors(src):
    with pytest.raises(ParseError):
        parse_source(src)


def test_error_reports_line():
    with pytest.raises(ParseError) as info:
        parse_source("nulldata 10\n\nfrobnicate")
    assert info.value.line == 3
