import pytest
from hypothesis import given, strategies as st

from pencilc.diagnostics import LexError
from pencilc.lexer import tokenize


def kinds(src):
    return [(t.kind, t.text) for t in tokenize(src) if t.kind != "eof"]


def test_smallest_declaration():
    assert kinds("int x;") == [("keyword", "int"), ("identifier", "x"), ("punctuator", ";")]


def test_pencil_pragma_is_one_token():
    toks = tokenize("#pragma pencil independent\nfor(i=0;i<3;i++);")
    assert toks[0].kind == "pragma-line"
    assert toks[0].text == "#pragma pencil independent"
    assert toks[1].text == "for"


def test_indirect_increment_tokens():
    texts = [t for _, t in kinds("A[t[i]]++;")]
    assert texts == ["A", "[", "t", "[", "i", "]", "]", "++", ";"]


def test_comments_dropped_and_literals_classified():
    toks = kinds("x = 1.5e3 /* c */ + 07; // tail\n")
    assert ("float-literal", "1.5e3") in toks
    assert ("integer-literal", "07") in toks
    assert all("c" not in t for k, t in toks if k == "punctuator")


@pytest.mark.parametrize("src", ["int x; /* never closed", "int $x;", "a @ b"])
def test_lex_errors_carry_location(src):
    with pytest.raises(LexError) as info:
        tokenize(src, "f.c")
    assert info.value.diagnostic.loc.file == "f.c"
    assert info.value.diagnostic.loc.line == 1


def test_locations_are_nondecreasing():
    toks = tokenize("void f(void)\n{\n  int a;\n  a = 1 + 2;\n}\n")
    locs = [(t.loc.line, t.loc.column) for t in toks]
    assert locs == sorted(locs)


words = st.sampled_from(["int", "x", "y1", "42", "3.5", "+", "-", "(", ")", "[", "]", ";", "==", "<="])


@given(st.lists(words, max_size=30))
def test_token_texts_reproduce_source(parts):
    src = " ".join(parts)
    toks = tokenize(src)
    assert " ".join(t.text for t in toks if t.kind != "eof") == src
    locs = [(t.loc.line, t.loc.column) for t in toks]
    assert locs == sorted(locs)
