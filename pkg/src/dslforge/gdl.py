"""GDL: the workbench's grammar definition language (an Xtext-flavored notation).

Accepted subset: a ``grammar Name`` header, parser rules, enum rules, the
built-in terminals ID/INT/STRING, assignments (``=``, ``+=``, ``?=``),
cross-references ``[Type]``, groups, alternatives and the cardinalities
``? * +``.  Anything outside the subset is a syntax diagnostic.

    grammar      := 'grammar' IDENT (rule | enumRule)+
    rule         := IDENT ':' alternatives ';'
    alternatives := sequence ('|' sequence)*
    sequence     := term+
    term         := atom cardinality?
    atom         := KEYWORD | IDENT ('='|'+='|'?=') target | IDENT
                  | '(' alternatives ')' | '[' IDENT ']'
    target       := KEYWORD | 'ID' | 'INT' | 'STRING' | IDENT | '[' IDENT ']'
    enumRule     := 'enum' IDENT ':' IDENT '=' KEYWORD ('|' IDENT '=' KEYWORD)* ';'
"""

from __future__ import annotations

import re
from dataclasses import dataclass, field, replace
from typing import Union

from .diagnostics import Diagnostic, ErrorCategory

BUILTIN_TERMINALS = ("ID", "INT", "STRING")


# ---------------------------------------------------------------------------
# AST


@dataclass(frozen=True)
class Keyword:
    text: str
    card: str | None = None


@dataclass(frozen=True)
class TerminalCall:
    name: str  # ID | INT | STRING
    card: str | None = None


@dataclass(frozen=True)
class RuleCall:
    name: str
    card: str | None = None


@dataclass(frozen=True)
class CrossRef:
    target: str
    card: str | None = None


Target = Union[Keyword, TerminalCall, RuleCall, CrossRef]


@dataclass(frozen=True)
class Assignment:
    feature: str
    operator: str  # '=', '+=', '?='
    target: Target
    card: str | None = None


@dataclass(frozen=True)
class Group:
    body: "Alternatives"
    card: str | None = None


Expr = Union[Keyword, TerminalCall, RuleCall, CrossRef, Assignment, Group]


@dataclass(frozen=True)
class Sequence:
    items: tuple[Expr, ...]


@dataclass(frozen=True)
class Alternatives:
    options: tuple[Sequence, ...]


@dataclass(frozen=True)
class Rule:
    name: str
    body: Alternatives
    line: int = 1
    column: int = 1


@dataclass(frozen=True)
class EnumLiteral:
    name: str
    keyword: str


@dataclass(frozen=True)
class EnumRule:
    name: str
    literals: tuple[EnumLiteral, ...]
    line: int = 1
    column: int = 1


@dataclass(frozen=True)
class GrammarAst:
    name: str
    rules: tuple[Rule, ...]
    enums: tuple[EnumRule, ...]

    @property
    def entry_rule(self) -> Rule | None:
        return self.rules[0] if self.rules else None

    def rule(self, name: str) -> Rule | None:
        for r in self.rules:
            if r.name == name:
                return r
        return None

    def enum(self, name: str) -> EnumRule | None:
        for e in self.enums:
            if e.name == name:
                return e
        return None


@dataclass(frozen=True)
class GrammarSource:
    """The exact user/LLM-provided grammar text, never normalized."""

    text: str
    name_hint: str | None = None


# ---------------------------------------------------------------------------
# Lexer

_IDENT_RE = re.compile(r"[A-Za-z_][A-Za-z0-9_]*")
_WS_RE = re.compile(r"[ \t\r\n]+")

_PUNCT = ("+=", "?=", "=", ":", ";", "|", "(", ")", "[", "]", "?", "*", "+")


@dataclass(frozen=True)
class GToken:
    kind: str  # 'ident', 'keyword', punctuation literal, 'eof'
    text: str
    line: int
    column: int


class GdlSyntaxError(Exception):
    def __init__(self, diagnostic: Diagnostic):
        super().__init__(diagnostic.message)
        self.diagnostic = diagnostic


def _syntax(message: str, line: int, column: int, offending: str | None = None) -> GdlSyntaxError:
    return GdlSyntaxError(
        Diagnostic(ErrorCategory.SYNTAX, message, line, column, offending)
    )


def _lex(text: str) -> list[GToken]:
    tokens: list[GToken] = []
    pos, line, col = 0, 1, 1
    n = len(text)

    def advance(span: str) -> None:
        nonlocal pos, line, col
        for ch in span:
            if ch == "\n":
                line += 1
                col = 1
            else:
                col += 1
        pos += len(span)

    while pos < n:
        ch = text[pos]
        m = _WS_RE.match(text, pos)
        if m:
            advance(m.group())
            continue
        if text.startswith("//", pos):
            end = text.find("\n", pos)
            advance(text[pos:] if end < 0 else text[pos:end])
            continue
        if text.startswith("/*", pos):
            end = text.find("*/", pos + 2)
            if end < 0:
                raise _syntax("unterminated block comment", line, col)
            advance(text[pos : end + 2])
            continue
        if ch == "'":
            end = pos + 1
            while end < n and text[end] not in ("'", "\n"):
                end += 1
            if end >= n or text[end] != "'":
                raise _syntax("unterminated keyword string", line, col)
            tokens.append(GToken("keyword", text[pos + 1 : end], line, col))
            advance(text[pos : end + 1])
            continue
        m = _IDENT_RE.match(text, pos)
        if m:
            tokens.append(GToken("ident", m.group(), line, col))
            advance(m.group())
            continue
        for p in _PUNCT:
            if text.startswith(p, pos):
                tokens.append(GToken(p, p, line, col))
                advance(p)
                break
        else:
            raise _syntax(f"invalid symbol '{ch}'", line, col, ch)
    tokens.append(GToken("eof", "", line, col))
    return tokens


# ---------------------------------------------------------------------------
# Parser


class _Parser:
    def __init__(self, tokens: list[GToken]):
        self.tokens = tokens
        self.i = 0

    @property
    def cur(self) -> GToken:
        return self.tokens[self.i]

    def eat(self, kind: str, what: str) -> GToken:
        tok = self.cur
        if tok.kind != kind:
            shown = tok.text or "end of input"
            raise _syntax(f"expected {what} but found '{shown}'", tok.line, tok.column, tok.text or None)
        self.i += 1
        return tok

    def at(self, kind: str) -> bool:
        return self.cur.kind == kind

    def grammar(self) -> GrammarAst:
        head = self.cur
        if not (self.at("ident") and head.text == "grammar"):
            raise _syntax("expected 'grammar' header", head.line, head.column, head.text or None)
        self.i += 1
        name = self.eat("ident", "grammar name").text
        rules: list[Rule] = []
        enums: list[EnumRule] = []
        while not self.at("eof"):
            tok = self.cur
            if self.at("ident") and tok.text == "enum":
                enums.append(self.enum_rule())
            else:
                rules.append(self.rule())
        if not rules and not enums:
            raise _syntax("expected at least one rule", head.line, head.column)
        return GrammarAst(name, tuple(rules), tuple(enums))

    def rule(self) -> Rule:
        name_tok = self.eat("ident", "rule name")
        self.eat(":", "':'")
        body = self.alternatives()
        self.eat(";", "';' to close the rule")
        return Rule(name_tok.text, body, name_tok.line, name_tok.column)

    def enum_rule(self) -> EnumRule:
        kw = self.eat("ident", "'enum'")
        name_tok = self.eat("ident", "enum name")
        self.eat(":", "':'")
        literals = [self.enum_literal()]
        while self.at("|"):
            self.i += 1
            literals.append(self.enum_literal())
        self.eat(";", "';' to close the enum")
        return EnumRule(name_tok.text, tuple(literals), kw.line, kw.column)

    def enum_literal(self) -> EnumLiteral:
        name = self.eat("ident", "enum literal name").text
        self.eat("=", "'='")
        tok = self.cur
        kw = self.eat("keyword", "quoted keyword")
        if not kw.text:
            raise _syntax("enum keyword must be non-empty", tok.line, tok.column)
        return EnumLiteral(name, kw.text)

    def alternatives(self) -> Alternatives:
        options = [self.sequence()]
        while self.at("|"):
            self.i += 1
            options.append(self.sequence())
        return Alternatives(tuple(options))

    _SEQ_STOP = {"|", ";", ")", "eof"}

    def sequence(self) -> Sequence:
        items: list[Expr] = []
        while self.cur.kind not in self._SEQ_STOP:
            items.append(self.term())
        if not items:
            tok = self.cur
            shown = tok.text or "end of input"
            raise _syntax(f"expected a term but found '{shown}'", tok.line, tok.column, tok.text or None)
        return Sequence(tuple(items))

    def term(self) -> Expr:
        atom = self.atom()
        if self.cur.kind in ("?", "*", "+"):
            card = self.cur.kind
            self.i += 1
            return replace(atom, card=card)
        return atom

    def atom(self) -> Expr:
        tok = self.cur
        if self.at("keyword"):
            self.i += 1
            return Keyword(tok.text)
        if self.at("("):
            self.i += 1
            body = self.alternatives()
            self.eat(")", "')'")
            return Group(body)
        if self.at("["):
            self.i += 1
            target = self.eat("ident", "cross-reference type name").text
            self.eat("]", "']'")
            return CrossRef(target)
        if self.at("ident"):
            self.i += 1
            if self.cur.kind in ("=", "+=", "?="):
                op = self.cur.kind
                self.i += 1
                return Assignment(tok.text, op, self.target())
            if tok.text in BUILTIN_TERMINALS:
                return TerminalCall(tok.text)
            return RuleCall(tok.text)
        shown = tok.text or "end of input"
        raise _syntax(f"expected a term but found '{shown}'", tok.line, tok.column, tok.text or None)

    def target(self) -> Target:
        tok = self.cur
        if self.at("keyword"):
            self.i += 1
            return Keyword(tok.text)
        if self.at("["):
            self.i += 1
            name = self.eat("ident", "cross-reference type name").text
            self.eat("]", "']'")
            return CrossRef(name)
        if self.at("ident"):
            self.i += 1
            if tok.text in BUILTIN_TERMINALS:
                return TerminalCall(tok.text)
            return RuleCall(tok.text)
        shown = tok.text or "end of input"
        raise _syntax(f"expected an assignment target but found '{shown}'", tok.line, tok.column, tok.text or None)


def parse_grammar(source: GrammarSource | str) -> GrammarAst | list[Diagnostic]:
    """Parse GDL text; returns the AST or a non-empty list of syntax diagnostics."""
    text = source.text if isinstance(source, GrammarSource) else source
    try:
        tokens = _lex(text)
        parser = _Parser(tokens)
        return parser.grammar()
    except GdlSyntaxError as exc:
        return [exc.diagnostic]


# ---------------------------------------------------------------------------
# Pretty printer (round-trips through parse_grammar)


def _print_expr(expr: Expr) -> str:
    card = expr.card or ""
    if isinstance(expr, Keyword):
        return f"'{expr.text}'{card}"
    if isinstance(expr, (TerminalCall, RuleCall)):
        return f"{expr.name}{card}"
    if isinstance(expr, CrossRef):
        return f"[{expr.target}]{card}"
    if isinstance(expr, Assignment):
        return f"{expr.feature}{expr.operator}{_print_expr(replace(expr.target, card=None))}{card}"
    if isinstance(expr, Group):
        return f"({_print_alts(expr.body)}){card}"
    raise TypeError(f"unknown expression node {expr!r}")


def _print_alts(alts: Alternatives) -> str:
    return " | ".join(" ".join(_print_expr(e) for e in seq.items) for seq in alts.options)


def pretty_print(ast: GrammarAst) -> str:
    lines = [f"grammar {ast.name}"]
    for rule in ast.rules:
        lines.append(f"{rule.name}: {_print_alts(rule.body)};")
    for enum in ast.enums:
        lits = " | ".join(f"{l.name}='{l.keyword}'" for l in enum.literals)
        lines.append(f"enum {enum.name}: {lits};")
    return "\n".join(lines) + "\n"
