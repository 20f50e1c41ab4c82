"""Parse example texts against a validated grammar into typed instance models.

The recognizer is an Earley parser over the grammar's context-free core, so
any grammar the compiler accepts can be parsed without transformation
(LLM-produced grammars have unpredictable factoring).  Ambiguity is tolerated
only when every derivation yields a structurally identical model; otherwise
it is reported.  Cross-references are resolved post-parse by name.
"""

from __future__ import annotations

import json
import re
from dataclasses import dataclass, field
from itertools import islice
from typing import Any, Iterator

from .diagnostics import Diagnostic, ErrorCategory
from .gdl import (
    Alternatives,
    Assignment,
    CrossRef,
    EnumRule,
    Expr,
    GrammarAst,
    Group,
    Keyword,
    RuleCall,
    Sequence,
    TerminalCall,
)
from .metamodel import MetaModel, derive_metamodel

_AMBIGUITY_PROBE = 4  # distinct derivations sampled before declaring ambiguity


# ---------------------------------------------------------------------------
# Tokens and instance models


@dataclass(frozen=True)
class Token:
    kind: str  # 'keyword' | 'ID' | 'INT' | 'STRING'
    text: str  # unquoted value for STRING
    line: int
    column: int
    quote: str | None = None  # quote style for STRING tokens


@dataclass(frozen=True)
class Ref:
    """Unresolved-by-containment link to another instance, by name."""

    name: str


@dataclass
class InstanceNode:
    class_name: str
    features: dict[str, Any] = field(default_factory=dict)

    def structural_key(self) -> Any:
        def key(v: Any) -> Any:
            if isinstance(v, InstanceNode):
                return v.structural_key()
            if isinstance(v, Ref):
                return ("ref", v.name)
            if isinstance(v, list):
                return tuple(key(x) for x in v)
            return v
        return (self.class_name, tuple((k, key(v)) for k, v in sorted(self.features.items())))


@dataclass
class InstanceModel:
    root: InstanceNode
    source: str


def _json_value(v: Any) -> Any:
    if isinstance(v, InstanceNode):
        return {"class": v.class_name, "features": {k: _json_value(x) for k, x in v.features.items()}}
    if isinstance(v, Ref):
        return {"ref": v.name}
    if isinstance(v, list):
        return [_json_value(x) for x in v]
    return v


def serialize_model(model: InstanceModel) -> str:
    """Compact JSON rendering of the node tree."""
    return json.dumps(_json_value(model.root), separators=(",", ":"))


# ---------------------------------------------------------------------------
# Instance tokenizer

_ID_RE = re.compile(r"[A-Za-z_][A-Za-z0-9_]*")
_INT_RE = re.compile(r"[0-9]+")
_WORDY_RE = re.compile(r"[A-Za-z0-9_]$")


def grammar_keywords(grammar: GrammarAst) -> set[str]:
    kws: set[str] = set()

    def visit(expr: Expr) -> None:
        if isinstance(expr, Keyword):
            kws.add(expr.text)
        elif isinstance(expr, Assignment) and isinstance(expr.target, Keyword):
            kws.add(expr.target.text)
        elif isinstance(expr, Group):
            for seq in expr.body.options:
                for item in seq.items:
                    visit(item)

    for rule in grammar.rules:
        for seq in rule.body.options:
            for item in seq.items:
                visit(item)
    for enum in grammar.enums:
        for lit in enum.literals:
            kws.add(lit.keyword)
    return kws


def tokenize(text: str, grammar: GrammarAst) -> list[Token] | Diagnostic:
    """Longest-match lexing; grammar keywords take precedence over ID."""
    keywords = sorted(grammar_keywords(grammar), key=len, reverse=True)
    tokens: list[Token] = []
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
        if ch in " \t\r\n":
            advance(ch)
            continue
        if text.startswith("//", pos):
            end = text.find("\n", pos)
            advance(text[pos:] if end < 0 else text[pos:end])
            continue
        if text.startswith("/*", pos):
            end = text.find("*/", pos + 2)
            if end < 0:
                return Diagnostic(ErrorCategory.SYNTAX, "unterminated block comment", line, col)
            advance(text[pos : end + 2])
            continue
        if ch in ('"', "'"):
            end = pos + 1
            while end < n and text[end] not in (ch, "\n"):
                end += 1
            if end >= n or text[end] != ch:
                return Diagnostic(ErrorCategory.SYNTAX, "unterminated string", line, col, ch)
            tokens.append(Token("STRING", text[pos + 1 : end], line, col, quote=ch))
            advance(text[pos : end + 1])
            continue
        best_kw = None
        for kw in keywords:
            if text.startswith(kw, pos):
                if _WORDY_RE.search(kw):
                    after = pos + len(kw)
                    if after < n and _ID_RE.match(text[after]):
                        continue
                best_kw = kw
                break
        id_m = _ID_RE.match(text, pos)
        int_m = _INT_RE.match(text, pos)
        candidates: list[tuple[int, Token]] = []
        if best_kw is not None:
            candidates.append((len(best_kw), Token("keyword", best_kw, line, col)))
        if id_m:
            candidates.append((len(id_m.group()), Token("ID", id_m.group(), line, col)))
        if int_m:
            candidates.append((len(int_m.group()), Token("INT", int_m.group(), line, col)))
        if not candidates:
            return Diagnostic(ErrorCategory.SYNTAX, f"invalid symbol '{ch}'", line, col, ch)
        # longest match wins; keyword beats ID on a tie (candidate order)
        length, token = max(candidates, key=lambda c: c[0])
        tokens.append(token)
        advance(text[pos : pos + length])
    return tokens


# ---------------------------------------------------------------------------
# Grammar-to-CFG compilation
#
# Terminals: ("kw", text), ("ID",), ("INT",), ("STRING",).  Each production
# carries per-symbol semantics so a derivation can be folded into a model:
#   None               discard the child
#   ("splice",)        child is a list of bindings; inline it
#   ("bind", f, op, c) convert the child with c and bind feature f via op
# A production's result is 'node' (build an instance of rule_name),
# 'delegate' (pass the sole child through), 'bindings', or 'enum'.

TermSym = tuple
NtSym = str


@dataclass
class _Prod:
    lhs: str
    rhs: tuple[Any, ...]
    sems: tuple[Any, ...]
    result: str
    rule_name: str | None = None
    enum_literal: str | None = None


class _Cfg:
    def __init__(self, start: str, prods: list[_Prod]):
        self.start = start
        self.prods = prods
        self.by_lhs: dict[str, list[int]] = {}
        for i, p in enumerate(prods):
            self.by_lhs.setdefault(p.lhs, []).append(i)
        self.nullable = self._nullable()

    def _nullable(self) -> set[str]:
        nullable: set[str] = set()
        changed = True
        while changed:
            changed = False
            for p in self.prods:
                if p.lhs in nullable:
                    continue
                if all(isinstance(s, str) and s in nullable for s in p.rhs):
                    nullable.add(p.lhs)
                    changed = True
        return nullable


def _is_terminal(sym: Any) -> bool:
    return isinstance(sym, tuple)


class _Compiler:
    def __init__(self, grammar: GrammarAst):
        self.grammar = grammar
        self.enum_names = {e.name for e in grammar.enums}
        self.rule_names = {r.name for r in grammar.rules}
        self.prods: list[_Prod] = []
        self.counter = 0

    def fresh(self, owner: str) -> str:
        self.counter += 1
        return f"{owner}%{self.counter}"

    def compile(self) -> _Cfg:
        for rule in self.grammar.rules:
            delegating = all(
                len(seq.items) == 1
                and isinstance(seq.items[0], RuleCall)
                and seq.items[0].card is None
                and seq.items[0].name in self.rule_names
                for seq in rule.body.options
            )
            for seq in rule.body.options:
                if delegating:
                    call = seq.items[0]
                    self.prods.append(_Prod(rule.name, (call.name,), (("delegate",),), "delegate"))
                else:
                    rhs, sems = self.compile_sequence(seq, rule.name)
                    self.prods.append(_Prod(rule.name, rhs, sems, "node", rule_name=rule.name))
        for enum in self.grammar.enums:
            for lit in enum.literals:
                self.prods.append(_Prod(
                    enum.name, (("kw", lit.keyword),), (None,), "enum", enum_literal=lit.name,
                ))
        entry = self.grammar.rules[0].name
        return _Cfg(entry, self.prods)

    def compile_sequence(self, seq: Sequence, owner: str) -> tuple[tuple, tuple]:
        rhs: list[Any] = []
        sems: list[Any] = []
        for item in seq.items:
            sym, sem = self.compile_expr(item, owner)
            rhs.append(sym)
            sems.append(sem)
        return tuple(rhs), tuple(sems)

    def compile_alts(self, alts: Alternatives, owner: str) -> str:
        nt = self.fresh(owner)
        for seq in alts.options:
            rhs, sems = self.compile_sequence(seq, owner)
            self.prods.append(_Prod(nt, rhs, sems, "bindings"))
        return nt

    def compile_expr(self, expr: Expr, owner: str) -> tuple[Any, Any]:
        card = expr.card
        sym, sem = self.compile_atom(expr, owner)
        if card is None:
            return sym, sem
        nt = self.fresh(owner)
        if card == "?":
            self.prods.append(_Prod(nt, (), (), "bindings"))
            self.prods.append(_Prod(nt, (sym,), (sem,), "bindings"))
        elif card == "*":
            self.prods.append(_Prod(nt, (), (), "bindings"))
            self.prods.append(_Prod(nt, (nt, sym), (("splice",), sem), "bindings"))
        else:  # '+'
            self.prods.append(_Prod(nt, (sym,), (sem,), "bindings"))
            self.prods.append(_Prod(nt, (nt, sym), (("splice",), sem), "bindings"))
        return nt, ("splice",)

    def compile_atom(self, expr: Expr, owner: str) -> tuple[Any, Any]:
        if isinstance(expr, Keyword):
            return ("kw", expr.text), None
        if isinstance(expr, TerminalCall):
            return (expr.name,), None
        if isinstance(expr, RuleCall):
            return expr.name, None
        if isinstance(expr, CrossRef):
            return ("ID",), None
        if isinstance(expr, Group):
            nt = self.compile_alts(expr.body, owner)
            return nt, ("splice",)
        if isinstance(expr, Assignment):
            t = expr.target
            if expr.operator == "?=":
                return ("kw", t.text), ("bind", expr.feature, "?=", "true")
            if isinstance(t, Keyword):
                return ("kw", t.text), ("bind", expr.feature, expr.operator, "kwtext")
            if isinstance(t, TerminalCall):
                conv = {"ID": "id", "INT": "int", "STRING": "string"}[t.name]
                return (t.name,), ("bind", expr.feature, expr.operator, conv)
            if isinstance(t, RuleCall):
                conv = "enum" if t.name in self.enum_names else "node"
                return t.name, ("bind", expr.feature, expr.operator, conv)
            if isinstance(t, CrossRef):
                return ("ID",), ("bind", expr.feature, expr.operator, "ref")
        raise TypeError(expr)


def compile_cfg(grammar: GrammarAst) -> _Cfg:
    return _Compiler(grammar).compile()


# ---------------------------------------------------------------------------
# Earley recognition


def _matches(token: Token, term: TermSym) -> bool:
    if term[0] == "kw":
        return token.kind == "keyword" and token.text == term[1]
    return token.kind == term[0]


def _term_display(term: TermSym) -> str:
    return f"'{term[1]}'" if term[0] == "kw" else term[0]


class _Chart:
    """Earley item sets; item = (prod_index, dot, origin)."""

    def __init__(self, cfg: _Cfg, tokens: list[Token]):
        self.cfg = cfg
        self.tokens = tokens
        self.sets: list[dict] = [dict() for _ in range(len(tokens) + 1)]
        self._run()

    def _add(self, k: int, item: tuple) -> bool:
        if item in self.sets[k]:
            return False
        self.sets[k][item] = None
        return True

    def _run(self) -> None:
        cfg, tokens = self.cfg, self.tokens
        for pi in cfg.by_lhs.get(cfg.start, ()):
            self._add(0, (pi, 0, 0))
        for k in range(len(tokens) + 1):
            worklist = list(self.sets[k])
            idx = 0
            while idx < len(worklist):
                pi, dot, org = worklist[idx]
                idx += 1
                prod = cfg.prods[pi]
                if dot < len(prod.rhs):
                    sym = prod.rhs[dot]
                    if _is_terminal(sym):
                        if k < len(tokens) and _matches(tokens[k], sym):
                            self._add(k + 1, (pi, dot + 1, org))
                    else:
                        for pj in cfg.by_lhs.get(sym, ()):
                            it = (pj, 0, k)
                            if self._add(k, it):
                                worklist.append(it)
                        if sym in cfg.nullable:  # Aycock-Horspool nullable advance
                            it = (pi, dot + 1, org)
                            if self._add(k, it):
                                worklist.append(it)
                else:
                    for pi2, dot2, org2 in list(self.sets[org]):
                        prod2 = cfg.prods[pi2]
                        if dot2 < len(prod2.rhs) and prod2.rhs[dot2] == prod.lhs:
                            it = (pi2, dot2 + 1, org2)
                            if self._add(k, it):
                                worklist.append(it)

    def accepted(self) -> bool:
        n = len(self.tokens)
        return any(
            self.cfg.prods[pi].lhs == self.cfg.start and dot == len(self.cfg.prods[pi].rhs) and org == 0
            for (pi, dot, org) in self.sets[n]
        )

    def completions(self) -> dict:
        """(lhs, origin) -> {end: [prod_index, ...]}"""
        out: dict = {}
        for end, items in enumerate(self.sets):
            for pi, dot, org in items:
                prod = self.cfg.prods[pi]
                if dot == len(prod.rhs):
                    out.setdefault((prod.lhs, org), {}).setdefault(end, []).append(pi)
        return out

    def failure_diagnostic(self) -> Diagnostic:
        last = max(k for k, s in enumerate(self.sets) if s)
        expected: list[str] = []
        for pi, dot, _ in self.sets[last]:
            prod = self.cfg.prods[pi]
            if dot < len(prod.rhs) and _is_terminal(prod.rhs[dot]):
                disp = _term_display(prod.rhs[dot])
                if disp not in expected:
                    expected.append(disp)
        exp = f"; expected one of: {', '.join(sorted(expected))}" if expected else ""
        if last < len(self.tokens):
            tok = self.tokens[last]
            return Diagnostic(
                ErrorCategory.SYNTAX,
                f"unexpected '{tok.text}'{exp}",
                tok.line, tok.column, tok.text,
            )
        line, col = 1, 1
        if self.tokens:
            t = self.tokens[-1]
            line, col = t.line, t.column + len(t.text)
        return Diagnostic(ErrorCategory.SYNTAX, f"unexpected end of input{exp}", line, col)


# ---------------------------------------------------------------------------
# Derivation extraction and model construction


def _convert(conv: str, value: Any) -> Any:
    if conv == "true":
        return True
    if conv == "int":
        return int(value.text)
    if conv in ("id", "string", "kwtext"):
        return value.text
    if conv == "ref":
        return Ref(value.text)
    return value  # 'node' / 'enum': child value passes through


def _fold(prod: _Prod, children: list[Any]) -> Any:
    if prod.result == "enum":
        return prod.enum_literal
    if prod.result == "delegate":
        return children[0]
    bindings: list[tuple[str, str, Any]] = []
    for sem, child in zip(prod.sems, children):
        if sem is None:
            continue
        if sem[0] == "splice":
            bindings.extend(child)
        else:
            _, feature, op, conv = sem
            bindings.append((feature, op, _convert(conv, child)))
    if prod.result == "bindings":
        return bindings
    node = InstanceNode(prod.rule_name)
    for feature, op, value in bindings:
        if op == "+=":
            node.features.setdefault(feature, []).append(value)
        else:
            node.features[feature] = value
    return node


class _TreeBuilder:
    def __init__(self, cfg: _Cfg, tokens: list[Token], chart: _Chart):
        self.cfg = cfg
        self.tokens = tokens
        self.completed = chart.completions()

    def derivations(self) -> Iterator[Any]:
        yield from self._nt(self.cfg.start, 0, len(self.tokens), frozenset())

    def _nt(self, name: str, i: int, j: int, path: frozenset) -> Iterator[Any]:
        key = (name, i, j)
        if key in path:
            return
        spans = self.completed.get((name, i), {})
        if j not in spans:
            return
        sub = path | {key}
        for pi in spans[j]:
            prod = self.cfg.prods[pi]
            for children in self._split(prod, 0, i, j, sub):
                yield _fold(prod, children)

    def _split(self, prod: _Prod, k: int, i: int, j: int, path: frozenset) -> Iterator[list]:
        if k == len(prod.rhs):
            if i == j:
                yield []
            return
        sym = prod.rhs[k]
        if _is_terminal(sym):
            if i < j and _matches(self.tokens[i], sym):
                for rest in self._split(prod, k + 1, i + 1, j, path):
                    yield [self.tokens[i], *rest]
            return
        spans = self.completed.get((sym, i), {})
        for m in sorted(spans):
            if m > j:
                break
            for value in self._nt(sym, i, m, path if m == j else frozenset()):
                for rest in self._split(prod, k + 1, m, j, path):
                    yield [value, *rest]


# ---------------------------------------------------------------------------
# Public entry points


def _collect_nodes(node: InstanceNode, out: list[InstanceNode]) -> None:
    out.append(node)
    for value in node.features.values():
        for v in value if isinstance(value, list) else [value]:
            if isinstance(v, InstanceNode):
                _collect_nodes(v, out)


def _resolve_refs(root: InstanceNode) -> list[Diagnostic]:
    nodes: list[InstanceNode] = []
    _collect_nodes(root, nodes)
    names = {n.features["name"] for n in nodes if isinstance(n.features.get("name"), str)}
    diags: list[Diagnostic] = []
    for node in nodes:
        for feature, value in node.features.items():
            for v in value if isinstance(value, list) else [value]:
                if isinstance(v, Ref) and v.name not in names:
                    diags.append(Diagnostic(
                        ErrorCategory.LINKING,
                        f"unresolved cross-reference '{v.name}' in feature '{feature}' of {node.class_name}",
                        offending=v.name,
                    ))
    return diags


def parse_instance(text: str, grammar: GrammarAst) -> InstanceModel | list[Diagnostic]:
    """Parse an example text; returns the instance model or diagnostics."""
    if not grammar.rules:
        return [Diagnostic(ErrorCategory.INVALID_STATE, "missing start parsing rule")]
    tokens = tokenize(text, grammar)
    if isinstance(tokens, Diagnostic):
        return [tokens]
    cfg = compile_cfg(grammar)
    chart = _Chart(cfg, tokens)
    if not chart.accepted():
        return [chart.failure_diagnostic()]
    builder = _TreeBuilder(cfg, tokens, chart)
    values = list(islice(builder.derivations(), _AMBIGUITY_PROBE))
    assert values, "recognizer accepted but no derivation was extracted"
    distinct = {v.structural_key() for v in values}
    if len(distinct) > 1:
        return [Diagnostic(ErrorCategory.OTHER, "ambiguous parse: derivations yield distinct models")]
    root = values[0]
    diags = _resolve_refs(root)
    if diags:
        return diags
    return InstanceModel(root=root, source=text)


def accepts(text: str, grammar: GrammarAst) -> bool:
    """Language membership only (used by the brute-force oracle comparison)."""
    tokens = tokenize(text, grammar)
    if isinstance(tokens, Diagnostic):
        return False
    chart = _Chart(compile_cfg(grammar), tokens)
    return chart.accepted()


def check_conformance(model: InstanceModel, metamodel: MetaModel) -> list[Diagnostic]:
    """Structural conformance of a parsed model to the derived meta-model."""
    diags: list[Diagnostic] = []
    enum_literals = {e.name: set(e.literals) for e in metamodel.enums}

    def subtype_of(cls_name: str, target: str) -> bool:
        if cls_name == target:
            return True
        cls = metamodel.cls(cls_name)
        return cls is not None and any(subtype_of(s, target) for s in cls.supertypes)

    def check_value(feature, v) -> None:
        t = feature.type
        if feature.kind == "containment":
            if not (isinstance(v, InstanceNode) and subtype_of(v.class_name, t)):
                diags.append(Diagnostic(ErrorCategory.OTHER, f"feature '{feature.name}' expects a {t} instance"))
        elif feature.kind == "reference":
            if not isinstance(v, Ref):
                diags.append(Diagnostic(ErrorCategory.OTHER, f"feature '{feature.name}' expects a cross-reference"))
        elif t == "string":
            if not isinstance(v, str):
                diags.append(Diagnostic(ErrorCategory.OTHER, f"feature '{feature.name}' expects a string"))
        elif t == "int":
            if not isinstance(v, int) or isinstance(v, bool):
                diags.append(Diagnostic(ErrorCategory.OTHER, f"feature '{feature.name}' expects an int"))
        elif t == "boolean":
            if not isinstance(v, bool):
                diags.append(Diagnostic(ErrorCategory.OTHER, f"feature '{feature.name}' expects a boolean"))
        elif t in enum_literals:
            if v not in enum_literals[t]:
                diags.append(Diagnostic(ErrorCategory.OTHER, f"feature '{feature.name}' expects a {t} literal"))

    def visit(node: InstanceNode) -> None:
        cls = metamodel.cls(node.class_name)
        if cls is None:
            diags.append(Diagnostic(ErrorCategory.OTHER, f"unknown class '{node.class_name}'"))
            return
        declared = {f.name: f for f in cls.features}
        for name, value in node.features.items():
            feature = declared.get(name)
            if feature is None:
                diags.append(Diagnostic(ErrorCategory.OTHER, f"undeclared feature '{name}' on {node.class_name}"))
                continue
            if isinstance(value, list) and not feature.many:
                diags.append(Diagnostic(ErrorCategory.OTHER, f"feature '{name}' holds many values but is declared one"))
            for v in value if isinstance(value, list) else [value]:
                check_value(feature, v)
                if isinstance(v, InstanceNode):
                    visit(v)
    visit(model.root)
    return diags
