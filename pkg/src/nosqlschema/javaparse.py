"""Tolerant surface parser for Java sources.

Only declarations are recovered: package, imports, (nested) classes,
interfaces and enums, their annotations, ``extends`` clause and fields.
Method bodies, initializer blocks and records are brace-matched and skipped.
"""

from __future__ import annotations

import bisect
import re
from dataclasses import dataclass, field
from enum import Enum
from typing import Iterable, Optional


class ParseFailure(Exception):
    """The file could not be segmented into declarations."""


class ClassKind(str, Enum):
    CLASS = "class"
    ABSTRACT_CLASS = "abstractClass"
    INTERFACE = "interface"
    ENUM = "enum"


@dataclass(frozen=True)
class AnnotationUse:
    raw_name: str
    args_text: Optional[str] = None

    @property
    def simple_name(self) -> str:
        return self.raw_name.rsplit(".", 1)[-1]

    def render(self) -> str:
        if self.args_text is None:
            return f"@{self.simple_name}"
        return f"@{self.simple_name}({self.args_text})"


@dataclass(frozen=True)
class FieldDecl:
    name: str
    type_text: str
    modifiers: frozenset = frozenset()
    annotations: tuple[AnnotationUse, ...] = ()
    initializer_text: Optional[str] = None
    line: int = 0


@dataclass(frozen=True)
class ClassDecl:
    simple_name: str
    qualified_name: str
    kind: ClassKind
    line_span: tuple[int, int]
    code_line_count: int
    annotations: tuple[AnnotationUse, ...] = ()
    superclass_name: Optional[str] = None
    fields: tuple[FieldDecl, ...] = ()
    nested: tuple["ClassDecl", ...] = ()

    def walk(self) -> Iterable["ClassDecl"]:
        """Yield this declaration and every nested one, depth first."""
        yield self
        for inner in self.nested:
            yield from inner.walk()


@dataclass(frozen=True)
class SourceFile:
    path: str
    package_name: str = ""
    imports: tuple[str, ...] = ()
    classes: tuple[ClassDecl, ...] = ()
    code_line_total: int = 0
    diagnostics: tuple[str, ...] = field(default=(), compare=False)

    def all_classes(self) -> Iterable[ClassDecl]:
        for decl in self.classes:
            yield from decl.walk()


# --------------------------------------------------------------------------
# tokenizer

_TOKEN_RE = re.compile(
    r"""
    (?P<ws>\s+)
  | (?P<bcomment>/\*.*?(?:\*/|\Z))
  | (?P<lcomment>//[^\n]*)
  | (?P<text>\"\"\".*?(?:\"\"\"|\Z))
  | (?P<string>"(?:\\.|[^"\\\n])*"?)
  | (?P<char>'(?:\\.|[^'\\\n])*'?)
  | (?P<ident>(?:[^\W\d]|\$)[\w$]*)
  | (?P<number>(?:\d|\.\d)(?:[eEpP][+-]|[\w.])*)
  | (?P<punct>.)
    """,
    re.VERBOSE | re.DOTALL,
)

WORD, STRING, PUNCT = "word", "string", "punct"


@dataclass(frozen=True)
class Token:
    kind: str
    text: str
    line: int


class _Lexed:
    __slots__ = ("tokens", "code_lines", "n_lines")

    def __init__(self, tokens: list[Token], code_lines: list[int], n_lines: int):
        self.tokens = tokens
        self.code_lines = code_lines  # sorted line numbers holding code
        self.n_lines = n_lines

    def count(self, start: int, end: int) -> int:
        return bisect.bisect_right(self.code_lines, end) - bisect.bisect_left(
            self.code_lines, start
        )


def _lex(text: str) -> _Lexed:
    tokens: list[Token] = []
    code = set()
    line = 1
    for m in _TOKEN_RE.finditer(text):
        kind = m.lastgroup
        chunk = m.group()
        newlines = chunk.count("\n")
        if kind in ("ws", "bcomment", "lcomment"):
            line += newlines
            continue
        if kind in ("text", "string", "char"):
            tok_kind = STRING
        elif kind in ("ident", "number"):
            tok_kind = WORD
        else:
            tok_kind = PUNCT
        tokens.append(Token(tok_kind, chunk, line))
        if newlines:
            # whitespace-only lines inside a text block stay blank
            code.update(line + k for k, seg in enumerate(chunk.split("\n")) if seg.strip())
        else:
            code.add(line)
        line += newlines
    n_lines = text.count("\n") + 1 if text else 0
    return _Lexed(tokens, sorted(code), n_lines)


def decode_source(data: bytes) -> str:
    """Decode raw file bytes, replacing invalid UTF-8 and dropping a BOM."""
    text = data.decode("utf-8", errors="replace")
    return text[1:] if text.startswith("\ufeff") else text


def count_code_lines(text: str, span: tuple[int, int]) -> int:
    """Number of lines in the inclusive 1-based ``span`` holding a token
    outside comments."""
    start, end = span
    if start > end:
        raise ValueError(f"inverted span {span}")
    return _lex(text).count(start, end)


def _wordlike(ch: str) -> bool:
    return ch.isalnum() or ch in "_$\"'" or not ch.isascii()


def join_tokens(parts: Iterable[str]) -> str:
    """Canonical single-spaced rendering of a token sequence."""
    out: list[str] = []
    prev = None
    for tok in parts:
        if prev is not None and (
            (_wordlike(prev[-1]) or prev == "?") and _wordlike(tok[0])
        ):
            out.append(" ")
        out.append(tok)
        prev = tok
    return "".join(out)


def canonicalize(text: str) -> str:
    """Canonicalize a type or expression; idempotent."""
    return join_tokens(t.text for t in _lex(text).tokens)


# --------------------------------------------------------------------------
# declaration walker

_MODIFIERS = {
    "public", "private", "protected", "static", "final", "transient",
    "volatile", "abstract", "native", "synchronized", "strictfp", "default",
    "sealed", "non",
}
_KEPT_FIELD_MODIFIERS = {"public", "private", "protected", "static", "final", "transient"}
_OPEN = {"(": ")", "[": "]", "{": "}"}
_CLOSE = {")", "]", "}"}
_GENERIC_INNER = {".", ",", "?", "&", "[", "]", "@"}


class _Malformed(Exception):
    pass


class _Parser:
    def __init__(self, lexed: _Lexed, path: str):
        self.toks = lexed.tokens
        self.lexed = lexed
        self.path = path
        self.pos = 0
        self.diagnostics: list[str] = []

    # -- helpers -----------------------------------------------------------
    def peek(self, offset: int = 0) -> Optional[Token]:
        i = self.pos + offset
        return self.toks[i] if i < len(self.toks) else None

    def at(self, text: str, offset: int = 0) -> bool:
        tok = self.peek(offset)
        return tok is not None and tok.text == text and tok.kind != STRING

    def diag(self, line: int, msg: str) -> None:
        self.diagnostics.append(f"{self.path}:{line}: {msg}")

    def match_close(self, i: int) -> int:
        """Index of the bracket closing the one at ``i`` (brackets of all
        three kinds are tracked together)."""
        stack = [_OPEN[self.toks[i].text]]
        j = i + 1
        while j < len(self.toks):
            tok = self.toks[j]
            if tok.kind == PUNCT:
                if tok.text in _OPEN:
                    stack.append(_OPEN[tok.text])
                elif tok.text in _CLOSE:
                    if tok.text != stack[-1]:
                        raise _Malformed(f"mismatched {tok.text!r}")
                    stack.pop()
                    if not stack:
                        return j
            j += 1
        raise _Malformed("unclosed bracket")

    def match_angle(self, i: int) -> Optional[int]:
        """Index of the ``>`` closing a generic argument list opened at
        ``i``, or None when the ``<`` is an operator."""
        depth = 0
        j = i
        while j < len(self.toks):
            tok = self.toks[j]
            if tok.text == "<" and tok.kind == PUNCT:
                depth += 1
            elif tok.text == ">" and tok.kind == PUNCT:
                depth -= 1
                if depth == 0:
                    return j
            elif tok.kind == WORD and tok.text[0].isdigit():
                return None
            elif tok.kind != WORD and tok.text not in _GENERIC_INNER:
                return None
            j += 1
        return None

    # -- grammar -------------------------------------------------------------
    def parse_annotation(self) -> AnnotationUse:
        # at '@'
        self.pos += 1
        name = [self.expect_word()]
        while self.at(".") and self.peek(1) is not None and self.peek(1).kind == WORD:
            self.pos += 1
            name.append(self.expect_word())
        args = None
        if self.at("("):
            close = self.match_close(self.pos)
            args = join_tokens(t.text for t in self.toks[self.pos + 1 : close])
            self.pos = close + 1
        return AnnotationUse(".".join(name), args)

    def expect_word(self) -> str:
        tok = self.peek()
        if tok is None or tok.kind != WORD:
            raise _Malformed(f"expected identifier, got {tok.text if tok else 'EOF'!r}")
        self.pos += 1
        return tok.text

    def parse_prefix(self) -> tuple[list[AnnotationUse], set[str], Optional[int]]:
        """Annotations and modifiers in front of a declaration."""
        annotations: list[AnnotationUse] = []
        modifiers: set[str] = set()
        first_line = None
        while True:
            tok = self.peek()
            if tok is None:
                break
            if tok.text == "@" and tok.kind == PUNCT and not self.at("interface", 1):
                first_line = first_line or tok.line
                annotations.append(self.parse_annotation())
            elif tok.kind == WORD and tok.text in _MODIFIERS:
                if tok.text == "non" and not (self.at("-", 1) and self.at("sealed", 2)):
                    break
                first_line = first_line or tok.line
                self.pos += 3 if tok.text == "non" else 1
                modifiers.add(tok.text)
            else:
                break
        return annotations, modifiers, first_line

    def parse_file(self) -> SourceFile:
        package = ""
        imports: list[str] = []
        classes: list[ClassDecl] = []
        while self.pos < len(self.toks):
            tok = self.peek()
            if tok.text == ";":
                self.pos += 1
                continue
            if tok.kind == WORD and tok.text in ("package", "import"):
                end = self._statement_end(self.pos)
                body = [t.text for t in self.toks[self.pos + 1 : end]]
                if body and body[0] == "static" and tok.text == "import":
                    body = body[1:]
                if tok.text == "package":
                    package = "".join(body)
                else:
                    imports.append("".join(body))
                self.pos = end + 1
                continue
            start = self.pos
            try:
                decl = self.parse_type_decl(package, "")
            except _Malformed as exc:
                self.diag(tok.line, f"skipped malformed declaration: {exc}")
                self.pos = self._recover(start)
                continue
            if decl is not None:
                classes.append(decl)
        return SourceFile(
            self.path,
            package,
            tuple(imports),
            tuple(classes),
            len(self.lexed.code_lines),
            tuple(self.diagnostics),
        )

    def _statement_end(self, i: int) -> int:
        j = i
        while j < len(self.toks) and not (self.toks[j].text == ";" and self.toks[j].kind == PUNCT):
            j += 1
        return j

    def _recover(self, start: int) -> int:
        """Skip past the next balanced top-level block after ``start``."""
        j = start
        while j < len(self.toks):
            tok = self.toks[j]
            if tok.kind == PUNCT and tok.text == "{":
                try:
                    return self.match_close(j) + 1
                except _Malformed:
                    return len(self.toks)
            if tok.kind == PUNCT and tok.text == ";":
                return j + 1
            j += 1
        return j

    def parse_type_decl(self, package: str, outer: str) -> Optional[ClassDecl]:
        annotations, modifiers, first_line = self.parse_prefix()
        tok = self.peek()
        if tok is None:
            if annotations or modifiers:
                raise _Malformed("dangling modifiers at end of file")
            return None
        first_line = first_line or tok.line
        if tok.text == "@" and self.at("interface", 1):
            self.pos += 2
            self.expect_word()
            return self._skip_to_body_end()
        if tok.kind != WORD or tok.text not in ("class", "interface", "enum", "record"):
            raise _Malformed(f"unexpected token {tok.text!r}")
        keyword = tok.text
        self.pos += 1
        name = self.expect_word()
        if keyword == "record":
            return self._skip_to_body_end()
        if self.at("<"):
            close = self.match_angle(self.pos)
            if close is None:
                raise _Malformed("bad type parameters")
            self.pos = close + 1
        superclass = None
        while not self.at("{"):
            tok = self.peek()
            if tok is None or tok.text in (";", "}", "("):
                raise _Malformed(f"class {name} has no body")
            if tok.text == "extends" and keyword == "class":
                self.pos += 1
                superclass = self.parse_type_text()
                continue
            if tok.text == "<":
                close = self.match_angle(self.pos)
                if close is None:
                    raise _Malformed("bad generic clause")
                self.pos = close + 1
                continue
            self.pos += 1
        body_open = self.pos
        body_close = self.match_close(body_open)
        if outer:
            qualified = f"{outer}.{name}"
        else:
            qualified = f"{package}.{name}" if package else name
        if keyword == "class":
            kind = ClassKind.ABSTRACT_CLASS if "abstract" in modifiers else ClassKind.CLASS
        else:
            kind = ClassKind.INTERFACE if keyword == "interface" else ClassKind.ENUM
        self.pos = body_open + 1
        if kind is ClassKind.ENUM:
            self._skip_enum_constants(body_close)
        fields, nested = self.parse_body(body_close, package, qualified)
        self.pos = body_close + 1
        end_line = self.toks[body_close].line
        return ClassDecl(
            simple_name=name,
            qualified_name=qualified,
            kind=kind,
            line_span=(first_line, end_line),
            code_line_count=self.lexed.count(first_line, end_line),
            annotations=tuple(annotations),
            superclass_name=superclass,
            fields=tuple(fields),
            nested=tuple(nested),
        )

    def _skip_to_body_end(self) -> None:
        while not self.at("{"):
            if self.peek() is None or self.at(";") or self.at("}"):
                raise _Malformed("declaration without body")
            if self.at("("):
                self.pos = self.match_close(self.pos)
            self.pos += 1
        self.pos = self.match_close(self.pos) + 1
        return None

    def _skip_enum_constants(self, body_close: int) -> None:
        while self.pos < body_close:
            tok = self.peek()
            if tok.kind == PUNCT and tok.text in _OPEN:
                self.pos = self.match_close(self.pos) + 1
                continue
            self.pos += 1
            if tok.kind == PUNCT and tok.text == ";":
                return

    def parse_type_text(self) -> str:
        """Consume a type: qualified name, generic args, array suffixes."""
        parts: list[str] = []
        while True:
            tok = self.peek()
            if tok is None:
                raise _Malformed("unterminated type")
            if tok.text == "@" and tok.kind == PUNCT:
                ann = self.parse_annotation()
                parts.append(ann.render())
                continue
            if tok.kind != WORD:
                raise _Malformed(f"expected type, got {tok.text!r}")
            parts.append(tok.text)
            self.pos += 1
            if self.at("<"):
                close = self.match_angle(self.pos)
                if close is None:
                    raise _Malformed("bad generic type")
                parts.extend(t.text for t in self.toks[self.pos : close + 1])
                self.pos = close + 1
            if self.at(".") and self.peek(1) is not None and self.peek(1).kind == WORD:
                parts.append(".")
                self.pos += 1
                continue
            break
        while self.at("[") and self.at("]", 1):
            parts.extend(("[", "]"))
            self.pos += 2
        return join_tokens(parts)

    def parse_body(self, body_close: int, package: str, qualified: str):
        fields: list[FieldDecl] = []
        nested: list[ClassDecl] = []
        while self.pos < body_close:
            start = self.pos
            try:
                self.parse_member(body_close, package, qualified, fields, nested)
            except _Malformed as exc:
                self.diag(self.toks[start].line, f"skipped member in {qualified}: {exc}")
                self.pos = self._member_recover(start, body_close)
            if self.pos <= start:
                self.pos = start + 1
        return fields, nested

    def _member_recover(self, start: int, body_close: int) -> int:
        j = start
        while j < body_close:
            tok = self.toks[j]
            if tok.kind == PUNCT:
                if tok.text == ";":
                    return j + 1
                if tok.text in _OPEN:
                    close = self.match_close(j)
                    if tok.text == "{":
                        return close + 1
                    j = close
            j += 1
        return body_close

    def parse_member(self, body_close, package, qualified, fields, nested) -> None:
        tok = self.peek()
        if tok.kind == PUNCT and tok.text == ";":
            self.pos += 1
            return
        if tok.kind == PUNCT and tok.text == "{":
            self.pos = self.match_close(self.pos) + 1
            return
        save = self.pos
        annotations, modifiers, _ = self.parse_prefix()
        tok = self.peek()
        if self.pos >= body_close:
            raise _Malformed("dangling modifiers")
        if tok.kind == PUNCT and tok.text == "{":
            self.pos = self.match_close(self.pos) + 1  # static initializer
            return
        if (tok.kind == WORD and tok.text in ("class", "interface", "enum", "record")) or (
            tok.text == "@" and self.at("interface", 1)
        ):
            self.pos = save
            decl = self.parse_type_decl(package, qualified)
            if decl is not None:
                nested.append(decl)
            return
        if tok.kind == PUNCT and tok.text == "<":
            close = self.match_angle(self.pos)
            if close is None:
                raise _Malformed("bad method type parameters")
            self.pos = close + 1
        # type (absent for constructors) followed by name
        type_start = self.pos
        type_text = self.parse_type_text()
        if self.at("("):
            self._skip_method(body_close)  # constructor
            return
        name_tok = self.peek()
        if name_tok is None or name_tok.kind != WORD:
            raise _Malformed(f"expected member name after {type_text!r}")
        self.pos += 1
        if self.at("("):
            self._skip_method(body_close)
            return
        kept = frozenset(modifiers & _KEPT_FIELD_MODIFIERS)
        anns = tuple(annotations)
        name = name_tok.text
        line = self.toks[type_start].line
        while True:
            dims = 0
            while self.at("[") and self.at("]", 1):
                dims += 1
                self.pos += 2
            ftype = type_text + "[]" * dims
            init = None
            if self.at("="):
                self.pos += 1
                init = self._initializer(body_close)
            fields.append(FieldDecl(name, ftype, kept, anns, init, line))
            if self.at(","):
                self.pos += 1
                name = self.expect_word()
                continue
            if self.at(";"):
                self.pos += 1
                return
            tok = self.peek()
            raise _Malformed(f"unexpected {tok.text if tok else 'EOF'!r} in field {name}")

    def _initializer(self, body_close: int) -> str:
        parts: list[str] = []
        while self.pos < body_close:
            tok = self.peek()
            if tok.kind == PUNCT:
                if tok.text in (",", ";"):
                    break
                if tok.text in _OPEN:
                    close = self.match_close(self.pos)
                    parts.extend(t.text for t in self.toks[self.pos : close + 1])
                    self.pos = close + 1
                    continue
                if tok.text == "<" and parts and _wordlike(parts[-1][-1]):
                    close = self.match_angle(self.pos)
                    if close is not None:
                        parts.extend(t.text for t in self.toks[self.pos : close + 1])
                        self.pos = close + 1
                        continue
            parts.append(tok.text)
            self.pos += 1
        if not parts:
            raise _Malformed("empty initializer")
        return join_tokens(parts)

    def _skip_method(self, body_close: int) -> None:
        self.pos = self.match_close(self.pos) + 1
        while self.pos < body_close:
            tok = self.peek()
            if tok.kind == PUNCT and tok.text == ";":
                self.pos += 1
                return
            if tok.kind == PUNCT and tok.text == "{":
                self.pos = self.match_close(self.pos) + 1
                return
            if tok.kind == PUNCT and tok.text in ("(", "["):
                self.pos = self.match_close(self.pos)
            self.pos += 1
        raise _Malformed("method without body")


def _check_balance(lexed: _Lexed, path: str) -> None:
    depth = 0
    for tok in lexed.tokens:
        if tok.kind != PUNCT:
            continue
        if tok.text == "{":
            depth += 1
        elif tok.text == "}":
            depth -= 1
            if depth < 0:
                raise ParseFailure(f"{path}:{tok.line}: unmatched '}}' at top level")
    if depth:
        raise ParseFailure(f"{path}: {depth} unclosed '{{' at end of file")


def parse_source(text: str, path: str = "") -> SourceFile:
    """Parse Java source text into its declaration surface.

    Raises ParseFailure when curly braces do not balance, since top-level
    declarations cannot be delimited then. Any other malformed declaration
    or member is skipped and reported in ``SourceFile.diagnostics``.
    """
    lexed = _lex(text)
    _check_balance(lexed, path)
    try:
        return _Parser(lexed, path).parse_file()
    except RecursionError:
        raise ParseFailure(f"{path}: declarations nested too deeply") from None
