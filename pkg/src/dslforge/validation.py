"""Static validation of a parsed GDL grammar.

Mirrors the build-time checks of an LL-based language workbench: duplicate
rules and left recursion are rejected even though the instance parser could
cope with them.  Warning-severity findings (unused rules) never make a
grammar faulty.
"""

from __future__ import annotations

from .diagnostics import Diagnostic, ErrorCategory, Severity, has_errors
from .gdl import (
    Alternatives,
    Assignment,
    CrossRef,
    EnumRule,
    Expr,
    GrammarAst,
    Group,
    Keyword,
    Rule,
    RuleCall,
    Sequence,
    TerminalCall,
)


def _walk(expr: Expr):
    yield expr
    if isinstance(expr, Group):
        for seq in expr.body.options:
            for item in seq.items:
                yield from _walk(item)


def _rule_exprs(rule: Rule):
    for seq in rule.body.options:
        for item in seq.items:
            yield from _walk(item)


def _target_type(assignment: Assignment, enums: set[str]) -> str:
    """Abstract type signature of an assignment, for conflict detection."""
    if assignment.operator == "?=":
        return "boolean"
    t = assignment.target
    if isinstance(t, Keyword):
        return "string"
    if isinstance(t, TerminalCall):
        return {"ID": "string", "STRING": "string", "INT": "int"}[t.name]
    if isinstance(t, RuleCall):
        return f"enum:{t.name}" if t.name in enums else f"class:{t.name}"
    if isinstance(t, CrossRef):
        return f"ref:{t.target}"
    raise TypeError(t)


def _nullable_rules(ast: GrammarAst) -> set[str]:
    nullable: set[str] = set()

    def expr_nullable(expr: Expr) -> bool:
        if expr.card in ("?", "*"):
            return True
        if isinstance(expr, (Keyword, TerminalCall, CrossRef)):
            return False
        if isinstance(expr, RuleCall):
            return expr.name in nullable
        if isinstance(expr, Assignment):
            return False
        if isinstance(expr, Group):
            return alts_nullable(expr.body)
        raise TypeError(expr)

    def alts_nullable(alts: Alternatives) -> bool:
        return any(all(expr_nullable(e) for e in seq.items) for seq in alts.options)

    changed = True
    while changed:
        changed = False
        for rule in ast.rules:
            if rule.name not in nullable and alts_nullable(rule.body):
                nullable.add(rule.name)
                changed = True
    return nullable


def _left_calls(rule: Rule, nullable: set[str]) -> set[str]:
    """Rule names callable at the left edge of a rule's body."""
    out: set[str] = set()

    def visit_expr(expr: Expr) -> None:
        if isinstance(expr, RuleCall):
            out.add(expr.name)
        elif isinstance(expr, Assignment) and isinstance(expr.target, RuleCall):
            out.add(expr.target.name)
        elif isinstance(expr, Group):
            visit_alts(expr.body)

    def expr_nullable(expr: Expr) -> bool:
        if expr.card in ("?", "*"):
            return True
        if isinstance(expr, RuleCall):
            return expr.name in nullable
        if isinstance(expr, Group):
            return any(all(expr_nullable(e) for e in s.items) for s in expr.body.options)
        return False

    def visit_alts(alts: Alternatives) -> None:
        for seq in alts.options:
            for item in seq.items:
                visit_expr(item)
                if not expr_nullable(item):
                    break

    visit_alts(rule.body)
    return out


def validate_grammar(ast: GrammarAst) -> list[Diagnostic]:
    """Run all static checks; an empty result means the grammar is valid."""
    diags: list[Diagnostic] = []
    rule_names = {r.name for r in ast.rules}
    enum_names = {e.name for e in ast.enums}
    known = rule_names | enum_names

    # (c) missing entry rule
    if not ast.rules:
        diags.append(Diagnostic(
            ErrorCategory.INVALID_STATE,
            "missing start parsing rule: the grammar defines no parser rules",
        ))

    # (a) duplicated rule/enum names
    seen: dict[str, object] = {}
    for decl in list(ast.rules) + list(ast.enums):
        if decl.name in seen:
            diags.append(Diagnostic(
                ErrorCategory.INVALID_STATE,
                f"duplicated rule '{decl.name}'",
                decl.line, decl.column, decl.name,
            ))
        else:
            seen[decl.name] = decl

    # (b) unresolved references
    for rule in ast.rules:
        for expr in _rule_exprs(rule):
            ref: str | None = None
            if isinstance(expr, RuleCall):
                ref = expr.name
            elif isinstance(expr, CrossRef):
                ref = expr.target
            elif isinstance(expr, Assignment):
                if isinstance(expr.target, RuleCall):
                    ref = expr.target.name
                elif isinstance(expr.target, CrossRef):
                    ref = expr.target.target
            if ref is not None and ref not in known:
                diags.append(Diagnostic(
                    ErrorCategory.LINKING,
                    f"non-resolvable reference to rule '{ref}' in rule '{rule.name}'",
                    rule.line, rule.column, ref,
                ))

    # (d) left recursion, direct or indirect
    nullable = _nullable_rules(ast)
    left = {r.name: _left_calls(r, nullable) & rule_names for r in ast.rules}
    reported: set[str] = set()
    for rule in ast.rules:
        if rule.name in reported:
            continue
        visited: set[str] = set()
        def reaches(name: str) -> bool:
            for callee in left.get(name, ()):
                if callee == rule.name:
                    return True
                if callee not in visited:
                    visited.add(callee)
                    if reaches(callee):
                        return True
            return False
        if reaches(rule.name):
            reported.add(rule.name)
            diags.append(Diagnostic(
                ErrorCategory.INVALID_STATE,
                f"left-recursive rule '{rule.name}'",
                rule.line, rule.column, rule.name,
            ))

    # (e) transformation checks
    for rule in ast.rules:
        feature_types: dict[str, str] = {}
        feature_ops: dict[str, str] = {}
        for expr in _rule_exprs(rule):
            if not isinstance(expr, Assignment):
                continue
            if expr.operator == "?=" and not isinstance(expr.target, Keyword):
                diags.append(Diagnostic(
                    ErrorCategory.TRANSFORMATION,
                    f"wrongly used boolean assignment: '?=' on a non-keyword target for feature '{expr.feature}' in rule '{rule.name}'",
                    rule.line, rule.column, expr.feature,
                ))
                continue
            sig = _target_type(expr, enum_names)
            prev = feature_types.get(expr.feature)
            if prev is not None and prev != sig:
                diags.append(Diagnostic(
                    ErrorCategory.TRANSFORMATION,
                    f"conflicting types for feature '{expr.feature}' in rule '{rule.name}': {prev} vs {sig}",
                    rule.line, rule.column, expr.feature,
                ))
            else:
                feature_types[expr.feature] = sig
            prev_op = feature_ops.get(expr.feature)
            if prev_op is not None and {prev_op, expr.operator} == {"=", "+="}:
                diags.append(Diagnostic(
                    ErrorCategory.TRANSFORMATION,
                    f"conflicting assignment operators for feature '{expr.feature}' in rule '{rule.name}'",
                    rule.line, rule.column, expr.feature,
                ))
            else:
                feature_ops[expr.feature] = expr.operator
        # repeated single assignment on one derivation path
        for seq in rule.body.options:
            counts: dict[str, int] = {}
            for item in seq.items:
                if isinstance(item, Assignment) and item.operator == "=" and item.card in (None, "?"):
                    counts[item.feature] = counts.get(item.feature, 0) + 1
            for feature, n in counts.items():
                if n > 1:
                    diags.append(Diagnostic(
                        ErrorCategory.TRANSFORMATION,
                        f"feature '{feature}' assigned more than once with '=' on one derivation path in rule '{rule.name}'",
                        rule.line, rule.column, feature,
                    ))

    # (f) unused rules: warning only
    if ast.rules:
        used: set[str] = set()
        frontier = [ast.rules[0].name]
        while frontier:
            name = frontier.pop()
            if name in used:
                continue
            used.add(name)
            rule = ast.rule(name)
            if rule is None:
                continue
            for expr in _rule_exprs(rule):
                ref = None
                if isinstance(expr, RuleCall):
                    ref = expr.name
                elif isinstance(expr, CrossRef):
                    ref = expr.target
                elif isinstance(expr, Assignment):
                    if isinstance(expr.target, RuleCall):
                        ref = expr.target.name
                    elif isinstance(expr.target, CrossRef):
                        ref = expr.target.target
                if ref is not None and ref in known:
                    frontier.append(ref)
        for decl in list(ast.rules[1:]) + list(ast.enums):
            if decl.name not in used:
                diags.append(Diagnostic(
                    ErrorCategory.OTHER,
                    f"unused rule '{decl.name}'",
                    decl.line, decl.column, decl.name,
                    severity=Severity.WARNING,
                ))
    return diags


def is_valid(ast: GrammarAst) -> bool:
    return not has_errors(validate_grammar(ast))
