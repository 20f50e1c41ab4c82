"""Independent language oracle for instance parsing.

Computes the set of terminal-symbol strings (up to a length bound) derivable
from a grammar AST by Kleene fixpoint iteration over length-bounded
languages.  Deliberately shares no machinery with the chart parser: this is
pure set arithmetic on the AST, so agreement between the two is meaningful.

Terminal symbols: ("kw", text), ("ID",), ("INT",), ("STRING",).
"""

from __future__ import annotations

from itertools import product

from dslforge.gdl import (
    Alternatives,
    Assignment,
    CrossRef,
    GrammarAst,
    Group,
    Keyword,
    RuleCall,
    Sequence,
    TerminalCall,
)

Sym = tuple
Word = tuple  # tuple of Sym


def _concat(a: set, b: set, max_len: int) -> set:
    return {x + y for x in a for y in b if len(x) + len(y) <= max_len}


def _star(base: set, max_len: int) -> set:
    acc = {()}
    while True:
        grown = acc | _concat(acc, base, max_len)
        if grown == acc:
            return acc
        acc = grown


def bounded_language(ast: GrammarAst, max_len: int) -> set:
    """All symbol strings of length <= max_len derivable from the entry rule."""
    enum_langs = {
        e.name: {(("kw", lit.keyword),) for lit in e.literals} for e in ast.enums
    }
    langs: dict[str, set] = {r.name: set() for r in ast.rules}

    def atom_lang(expr) -> set:
        if isinstance(expr, Keyword):
            return {(("kw", expr.text),)}
        if isinstance(expr, TerminalCall):
            return {((expr.name,),)}
        if isinstance(expr, CrossRef):
            return {(("ID",),)}
        if isinstance(expr, Assignment):
            return atom_lang(expr.target)  # targets never carry a cardinality
        if isinstance(expr, RuleCall):
            if expr.name in enum_langs:
                return set(enum_langs[expr.name])
            return set(langs.get(expr.name, set()))
        if isinstance(expr, Group):
            return alts_lang(expr.body)
        raise TypeError(expr)

    def expr_lang(expr) -> set:
        base = atom_lang(expr)
        if expr.card is None:
            return base
        if expr.card == "?":
            return base | {()}
        star = _star(base, max_len)
        if expr.card == "*":
            return star
        return _concat(base, star, max_len)  # '+'

    def seq_lang(seq: Sequence) -> set:
        acc = {()}
        for item in seq.items:
            acc = _concat(acc, expr_lang(item), max_len)
            if not acc:
                return acc
        return acc

    def alts_lang(alts: Alternatives) -> set:
        out: set = set()
        for seq in alts.options:
            out |= seq_lang(seq)
        return out

    changed = True
    while changed:
        changed = False
        for rule in ast.rules:
            new = alts_lang(rule.body)
            if new != langs[rule.name]:
                langs[rule.name] = new
                changed = True
    entry = ast.entry_rule
    return set() if entry is None else langs[entry.name]


def alphabet_of(ast: GrammarAst) -> list:
    """Every terminal symbol the grammar can consume, in a stable order."""
    syms: set = set()

    def visit(expr) -> None:
        if isinstance(expr, Keyword):
            syms.add(("kw", expr.text))
        elif isinstance(expr, TerminalCall):
            syms.add((expr.name,))
        elif isinstance(expr, CrossRef):
            syms.add(("ID",))
        elif isinstance(expr, Assignment):
            visit(expr.target)
        elif isinstance(expr, Group):
            for seq in expr.body.options:
                for item in seq.items:
                    visit(item)

    for rule in ast.rules:
        for seq in rule.body.options:
            for item in seq.items:
                visit(item)
    for enum in ast.enums:
        for lit in enum.literals:
            syms.add(("kw", lit.keyword))
    return sorted(syms)


def all_words(alphabet: list, max_len: int):
    for length in range(max_len + 1):
        yield from product(alphabet, repeat=length)


_RENDER = {("ID",): "xq", ("INT",): "7", ("STRING",): '"s"'}


def render(word: Word) -> str:
    """Concrete text that the instance tokenizer lexes back to exactly `word`."""
    return " ".join(_RENDER[s] if s in _RENDER else s[1] for s in word)
