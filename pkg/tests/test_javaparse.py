import json
from pathlib import Path

import pytest
from hypothesis import given, settings, strategies as st

from nosqlschema import ClassKind, ParseFailure, count_code_lines, parse_source
from nosqlschema.javaparse import canonicalize, decode_source

from adversarial import corpus

DATA = Path(__file__).parent / "data" / "linecount"

PLAYER_1A = """package com.game.model;

@Entity
public class Player {
    @Id Long id;
    String name;
    Integer credits;
    List<Mission> listOfMissions;

    public String getName() {
        return name;
    }
}
"""


def test_player_declares_four_fields():
    sf = parse_source(PLAYER_1A, "Player.java")
    (cls,) = sf.classes
    assert cls.qualified_name == "com.game.model.Player"
    assert [f.name for f in cls.fields] == ["id", "name", "credits", "listOfMissions"]
    assert [a.simple_name for a in cls.fields[0].annotations] == ["Id"]
    assert all(not f.annotations for f in cls.fields[1:])
    assert cls.fields[3].type_text == "List<Mission>"
    assert [a.simple_name for a in cls.annotations] == ["Entity"]


def test_empty_text():
    sf = parse_source("", "Empty.java")
    assert sf.classes == ()
    assert sf.code_line_total == 0


def test_nested_classes():
    sf = parse_source("package p;\nclass Outer { class Inner { @Id long id; } }\n", "Outer.java")
    (outer,) = sf.classes
    assert outer.qualified_name == "p.Outer"
    assert outer.fields == ()
    (inner,) = outer.nested
    assert inner.qualified_name == "p.Outer.Inner"
    assert [(f.name, f.type_text) for f in inner.fields] == [("id", "long")]
    assert [c.qualified_name for c in sf.all_classes()] == ["p.Outer", "p.Outer.Inner"]


def test_class_kinds_and_superclass():
    sf = parse_source(
        "abstract class A {}\nclass B extends p.A implements I {}\ninterface I {}\nenum E { X, Y; int w; }\n"
    )
    kinds = {c.simple_name: c.kind for c in sf.classes}
    assert kinds == {"A": ClassKind.ABSTRACT_CLASS, "B": ClassKind.CLASS, "I": ClassKind.INTERFACE, "E": ClassKind.ENUM}
    assert {c.simple_name: c.superclass_name for c in sf.classes}["B"] == "p.A"
    assert [f.name for f in sf.classes[3].fields] == ["w"]


def test_field_details():
    sf = parse_source(
        "class F {\n"
        "  private static final int MAX = 10;\n"
        "  transient String cache;\n"
        "  Map<String , List<Mission>> byName = new HashMap< >();\n"
        "  int a[], b = 2;\n"
        '  @AlsoLoad("credits") Long coins = 0L;\n'
        "}\n"
    )
    fields = {f.name: f for f in sf.classes[0].fields}
    assert fields["MAX"].modifiers == {"private", "static", "final"}
    assert fields["cache"].modifiers == {"transient"}
    assert fields["byName"].type_text == "Map<String,List<Mission>>"
    assert fields["byName"].initializer_text == "new HashMap<>()"
    assert fields["a"].type_text == "int[]"
    assert fields["b"].type_text == "int" and fields["b"].initializer_text == "2"
    assert fields["coins"].annotations[0].render() == '@AlsoLoad("credits")'
    assert fields["coins"].initializer_text == "0L"
    assert fields["coins"].line == 6


def test_methods_and_locals_are_not_fields():
    sf = parse_source("class M { int f; void m() { int local = 1; } static { int s; } M() { int c; } }")
    assert [f.name for f in sf.classes[0].fields] == ["f"]


def test_partial_recovery_keeps_good_class():
    sf = parse_source("class { int x; }\nclass Good { int y; }\n", "Mixed.java")
    assert [c.simple_name for c in sf.classes] == ["Good"]
    assert sf.diagnostics


@pytest.mark.parametrize("text", ["class A { int x; ", "class A { } }", "}}}"])
def test_unbalanced_braces_fail(text):
    with pytest.raises(ParseFailure):
        parse_source(text, "Bad.java")


def test_count_code_lines_examples():
    body = (
        "class C {\n"
        "\n"
        "  // one\n"
        "  int a;\n"
        "  /* two */\n"
        "\n"
        "  int b;\n"
        "  // three\n"
        "  int c;\n"
        "}\n"
    )
    assert count_code_lines(body, (1, 10)) == 5
    assert count_code_lines("\n\n\n", (1, 3)) == 0
    assert count_code_lines("int x; // counter\n", (1, 1)) == 1
    with pytest.raises(ValueError):
        count_code_lines(body, (3, 2))


@pytest.mark.parametrize("name", sorted(json.loads((DATA / "expected.json").read_text())))
def test_hand_counted_line_counts(name):
    expected = json.loads((DATA / "expected.json").read_text(encoding="utf-8"))[name]
    sf = parse_source((DATA / name).read_text(encoding="utf-8"), name)
    got = {c.qualified_name: [*c.line_span, c.code_line_count] for c in sf.all_classes()}
    assert got == expected


def test_canonicalize_examples():
    assert canonicalize("Map<String , List<Mission>>") == "Map<String,List<Mission>>"
    assert canonicalize("List< ? extends  Number >") == "List<? extends Number>"
    assert canonicalize("new  Foo ( 1 , 2 )") == "new Foo(1,2)"


def test_decode_source_handles_bom_and_bad_bytes():
    assert decode_source(b"\xef\xbb\xbfclass A {}") == "class A {}"
    assert "�" in decode_source(b"class \xff A {}")


@pytest.mark.parametrize("name,text", sorted(corpus().items()))
def test_adversarial_inputs_never_abort(name, text):
    try:
        sf = parse_source(text, name)
    except ParseFailure:
        return
    for cls in sf.all_classes():
        start, end = cls.line_span
        assert 0 <= cls.code_line_count <= end - start + 1


# -- properties ------------------------------------------------------------------

JAVA_ALPHABET = st.sampled_from(list("classintfoo{}()<>[];=@\"'/*\n \t.,?") + ["class ", "@Id ", "//", "/*", "*/", '"""'])


@settings(max_examples=300, deadline=None)
@given(st.lists(JAVA_ALPHABET, max_size=80).map("".join))
def test_arbitrary_text_either_parses_or_fails_cleanly(text):
    try:
        parse_source(text, "X.java")
    except ParseFailure:
        pass


@settings(max_examples=200, deadline=None)
@given(st.text(max_size=200))
def test_arbitrary_unicode_text(text):
    try:
        parse_source(text, "X.java")
    except ParseFailure:
        pass


IDENT = st.from_regex(r"[a-z][a-zA-Z0-9]{0,6}", fullmatch=True).filter(
    lambda s: s not in {"int", "do", "if", "for", "new", "try", "char", "byte", "long", "case", "else", "enum", "goto", "this", "void", "break", "catch", "class", "const", "final", "float", "short", "super", "throw", "while", "double", "import", "native", "public", "return", "static", "switch", "throws", "boolean", "default", "extends", "finally", "package", "private", "abstract", "continue", "strictfp", "volatile", "interface", "protected", "transient", "implements", "instanceof", "synchronized", "assert", "record", "sealed", "var", "yield", "permits", "non", "true", "false", "null"}
)
TYPES = st.sampled_from(["int", "long[]", "String", "List<String>", "Map<String,List<Long>>", "java.util.Date"])


@st.composite
def java_class(draw):
    names = draw(st.lists(IDENT, min_size=0, max_size=6, unique=True))
    lines = ["package q;", "", "@Entity", "public class K {"]
    for name in names:
        if draw(st.booleans()):
            lines.append("    // comment about " + name)
        if draw(st.booleans()):
            lines.append("")
        ann = draw(st.sampled_from(["", "@Id ", "@Index ", '@AlsoLoad("x") ']))
        lines.append(f"    {ann}{draw(TYPES)} {name};")
    lines.append("}")
    return "\n".join(lines) + "\n", names


@settings(max_examples=150, deadline=None)
@given(java_class())
def test_parse_is_idempotent_and_finds_every_field(src):
    text, names = src
    first = parse_source(text, "K.java")
    assert first == parse_source(text, "K.java")
    assert [f.name for f in first.classes[0].fields] == names


@settings(max_examples=150, deadline=None)
@given(java_class())
def test_line_accounting(src):
    text, names = src
    sf = parse_source(text, "K.java")
    lines = text.splitlines()
    blank_or_comment = sum(1 for ln in lines if not ln.strip() or ln.strip().startswith("//"))
    assert sf.code_line_total == len(lines) - blank_or_comment
    (cls,) = sf.classes
    assert cls.code_line_count == count_code_lines(text, cls.line_span) == 3 + len(names)  # @Entity line, header, closing brace


@settings(max_examples=200, deadline=None)
@given(st.lists(st.sampled_from(["List", "<", ">", " ", ",", "String", "?", "extends", "[]", "Map", ".", "x"]), max_size=20).map("".join))
def test_canonicalize_is_idempotent(text):
    once = canonicalize(text)
    assert canonicalize(once) == once
