import pytest
from hypothesis import assume, given
from hypothesis import strategies as st

from jasper.errors import JasperError, ListFormatError
from jasper.properties import PropertyMap
from jasper.template import (
    DEFAULT_CHAIN,
    ParsedLine,
    ResolverChain,
    Token,
    default_resolve,
    process_file_list,
    process_file_plain,
    process_line,
    resolve,
    tokenize_line,
)

from conftest import write

DATE_LINE = "<p>The current date is <strong>[[vCurrentDate]]</strong></p>"


def echo_back(token, props):
    return str(token)


IDENTITY = ResolverChain([echo_back])


class TestTokenize:
    def test_paper_date_line(self):
        parsed = tokenize_line(DATE_LINE)
        assert parsed.strings == ("<p>The current date is <strong>", "</strong></p>")
        assert parsed.tokens == (Token("vCurrentDate", "vCurrentDate", None),)

    def test_no_tokens(self):
        assert tokenize_line("no tokens here") == ParsedLine(("no tokens here",), ())

    def test_adjacent_tokens(self):
        parsed = tokenize_line("[[appPath]][[procPath]]main[[procExt]]")
        assert [t.name for t in parsed.tokens] == ["appPath", "procPath", "procExt"]
        assert parsed.strings == ("", "", "main", "")

    def test_token_argument(self):
        (token,) = tokenize_line("a [[EXCLAIM:comments]] b").tokens
        assert (token.name, token.arg) == ("EXCLAIM", "comments")

    def test_argument_splits_at_first_colon(self):
        token = Token.parse("CHECKED:color:red")
        assert (token.name, token.arg) == ("CHECKED", "color:red")
        assert Token.parse("x:").arg == ""
        assert Token.parse("x").arg is None

    @pytest.mark.parametrize("line, strings, raws", [
        ("[[a]]b]]", ("", "b]]"), ["a"]),
        ("x [[unclosed", ("x [[unclosed",), []),
        ("stray ]] here", ("stray ]] here",), []),
        ("[[]]", ("[[]]",), []),
        ("[[:x]]", ("[[:x]]",), []),
        ("[[a[[b]]", ("[[a", ""), ["b"]),
        ("[[[a]]", ("", ""), ["[a"]),
        ("[[a]]]", ("", "]"), ["a"]),
        ("[[a b=c]]", ("", ""), ["a b=c"]),
    ])
    def test_bracket_edge_cases(self, line, strings, raws):
        parsed = tokenize_line(line)
        assert parsed.strings == strings
        assert [t.raw for t in parsed.tokens] == raws
        assert parsed.reassemble() == line

    def test_parsed_line_shape_is_checked(self):
        with pytest.raises(ValueError):
            ParsedLine(("a", "b"), ())


bracket_text = st.text(
    st.sampled_from(list("[]:=ab \t|é")) | st.characters(blacklist_categories=("Cs",)),
)


@given(bracket_text)
def test_round_trip(line):
    parsed = tokenize_line(line)
    assert parsed.reassemble() == line
    for token in parsed.tokens:
        assert token.name
        assert "[[" not in token.raw and "]]" not in token.raw
        assert (token.arg is None) == (":" not in token.raw)


@given(bracket_text)
def test_identity_chain_is_identity(line):
    assert process_line(line, IDENTITY, PropertyMap()) == line


@given(bracket_text)
def test_delimiters_preserved(line):
    marker = "\x00"
    assume(marker not in line)
    out = process_line(line, ResolverChain([lambda t, p: marker]), PropertyMap())
    assert tuple(out.split(marker)) == tokenize_line(line).strings


@given(bracket_text, st.dictionaries(st.sampled_from(["a", "b", "EXCLAIM:a"]), st.text(max_size=5)))
def test_prepending_a_declining_handler_changes_nothing(line, values):
    props = PropertyMap({"VAR." + k: v for k, v in values.items()})
    chain = ResolverChain([default_resolve])
    assert process_line(line, chain.prepend(lambda t, p: None), props) == process_line(line, chain, props)


class TestProcessLine:
    def test_current_date(self):
        props = PropertyMap({"VAR.vCurrentDate": "10th May 2011"})
        assert process_line(DATE_LINE, DEFAULT_CHAIN, props) == (
            "<p>The current date is <strong>10th May 2011</strong></p>"
        )

    def test_tokenless_line_unchanged(self):
        assert process_line("<hr/>", DEFAULT_CHAIN, PropertyMap()) == "<hr/>"

    def test_main_uri(self):
        props = PropertyMap({"CONFIG.appPath": "/", "CONFIG.procPath": "php/", "CONFIG.procExt": ".php"})
        assert process_line("[[appPath]][[procPath]]main[[procExt]]", DEFAULT_CHAIN, props) == "/php/main.php"

    def test_substituted_values_are_not_reprocessed(self):
        props = PropertyMap({"FORM.a": "[[b]]", "FORM.b": "no"})
        assert process_line("[[a]]", DEFAULT_CHAIN, props) == "[[b]]"


class TestResolve:
    def test_first_matching_handler_wins(self):
        seen = []

        def main(token, props):
            seen.append("main")
            return "<form/>" if token.raw == "FEEDBACK_FORM" else None

        def base(token, props):
            seen.append("base")
            return None

        chain = ResolverChain([main, base, default_resolve])
        assert resolve(chain, Token.parse("FEEDBACK_FORM"), PropertyMap()) == "<form/>"
        assert seen == ["main"]
        seen.clear()
        props = PropertyMap({"VAR.vCurrentDate": "today"})
        assert resolve(chain, Token.parse("vCurrentDate"), props) == "today"
        assert seen == ["main", "base"]

    def test_unbound_main_on_default_chain(self):
        assert resolve(DEFAULT_CHAIN, Token.parse("MAIN"), PropertyMap()) == ""

    def test_exhausted_chain(self):
        with pytest.raises(JasperError):
            resolve(ResolverChain([lambda t, p: None]), Token.parse("x"), PropertyMap())

    def test_empty_chain(self):
        with pytest.raises(ValueError):
            ResolverChain([])


class TestDefaultResolve:
    def test_form_value(self):
        assert default_resolve(Token.parse("fullname"), PropertyMap({"FORM.fullname": "James Smith"})) == "James Smith"

    @pytest.mark.parametrize("bound, expected", [
        ({"VAR.x": "a", "FORM.x": "b", "CONFIG.x": "c"}, "a"),
        ({"FORM.x": "b", "CONFIG.x": "c"}, "b"),
        ({"CONFIG.x": "c"}, "c"),
        ({"VAR.x": "", "FORM.x": "b"}, ""),
        ({"ERROR.x": "e", "SERIAL.x": "s"}, ""),
        ({}, ""),
    ])
    def test_precedence(self, bound, expected):
        # oracle: ordered lookup over the three namespaces
        oracle = next((bound[p + "x"] for p in ("VAR.", "FORM.", "CONFIG.") if p + "x" in bound), "")
        assert oracle == expected
        assert default_resolve(Token.parse("x"), PropertyMap(bound)) == expected

    def test_lookup_uses_full_raw_text(self):
        props = PropertyMap({"VAR.a:b": "whole", "VAR.a": "name only"})
        assert default_resolve(Token.parse("a:b"), props) == "whole"

    def test_unresolved_tokens_are_logged(self, caplog):
        caplog.set_level("DEBUG", logger="jasper.template")
        default_resolve(Token.parse("missing"), PropertyMap())
        assert "[[missing]]" in caplog.text


class TestProcessFilePlain:
    def test_date_include(self, tmp_path):
        path = write(tmp_path / "date.html", DATE_LINE + "\n")
        props = PropertyMap({"VAR.vCurrentDate": "10th May 2011"})
        assert process_file_plain(path, DEFAULT_CHAIN, props) == (
            "<p>The current date is <strong>10th May 2011</strong></p>\n"
        )

    def test_empty(self, tmp_path):
        assert process_file_plain(write(tmp_path / "e.html", ""), DEFAULT_CHAIN, PropertyMap()) == ""

    @pytest.mark.parametrize("text", ["one\ntwo\nthree", "one\ntwo\nthree\n", "\n\n"])
    def test_token_free_identity(self, tmp_path, text):
        assert process_file_plain(write(tmp_path / "t.html", text), DEFAULT_CHAIN, PropertyMap()) == text

    def test_crlf_normalized(self, tmp_path):
        path = write(tmp_path / "t.html", "a[[x]]\r\nb\r\n")
        assert process_file_plain(path, DEFAULT_CHAIN, PropertyMap({"VAR.x": "1"})) == "a1\nb\n"

    def test_missing(self, tmp_path):
        with pytest.raises(OSError):
            process_file_plain(tmp_path / "nope.html", DEFAULT_CHAIN, PropertyMap())


class TestProcessFileList:
    def test_paper_query_string(self, tmp_path):
        path = write(tmp_path / "q.list", "name=[[name]]\nmessage=[[message]]\n")
        props = PropertyMap({"FORM.name": "James Smith", "FORM.message": "Hello, world!!"})
        assert process_file_list(path, DEFAULT_CHAIN, props) == "name=James+Smith&message=Hello,+world!!"

    def test_page_list(self, tmp_path):
        path = write(tmp_path / "page.list", "page=[[vPage]]\n")
        assert process_file_list(path, DEFAULT_CHAIN, PropertyMap({"VAR.vPage": "test"})) == "page=test"

    def test_empty(self, tmp_path):
        assert process_file_list(write(tmp_path / "e.list", ""), DEFAULT_CHAIN, PropertyMap()) == ""

    def test_blank_lines_skipped(self, tmp_path):
        path = write(tmp_path / "b.list", "\na=1\n   \nb=[[x]]\n")
        assert process_file_list(path, DEFAULT_CHAIN, PropertyMap({"VAR.x": "a&b"})) == "a=1&b=a%26b"

    def test_both_sides_encoded(self, tmp_path):
        path = write(tmp_path / "n.list", "[[k]]=v w\n")
        assert process_file_list(path, DEFAULT_CHAIN, PropertyMap({"VAR.k": "a=b c"})) == "a%3Db+c=v+w"

    def test_value_keeps_later_equals(self, tmp_path):
        path = write(tmp_path / "n.list", "q=a=b\n")
        assert process_file_list(path, DEFAULT_CHAIN, PropertyMap()) == "q=a%3Db"

    def test_line_without_equals(self, tmp_path):
        path = write(tmp_path / "bad.list", "a=1\n[[x=y]]\n")
        with pytest.raises(ListFormatError) as info:
            process_file_list(path, DEFAULT_CHAIN, PropertyMap())
        assert info.value.lineno == 2
