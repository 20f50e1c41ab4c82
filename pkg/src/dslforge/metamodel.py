"""Derivation of the abstract syntax (meta-model) from a GDL grammar.

One class per parser rule.  A rule whose body is exclusively alternatives of
bare rule calls becomes an abstract class with the called rules as subtypes.
Assignments become features: terminals map to primitive attributes, rule
calls to containment references (or enum attributes), cross-references to
non-containment references; ``+=`` means multiplicity many.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field

from .diagnostics import Diagnostic, ErrorCategory
from .gdl import (
    Assignment,
    CrossRef,
    GrammarAst,
    Group,
    Keyword,
    Rule,
    RuleCall,
    TerminalCall,
)
from .validation import _rule_exprs


@dataclass(frozen=True)
class MetaFeature:
    name: str
    kind: str  # 'attribute' | 'reference' | 'containment'
    type: str  # 'string' | 'int' | 'boolean' | class name | enum name
    many: bool


@dataclass(frozen=True)
class MetaClass:
    name: str
    abstract: bool = False
    supertypes: tuple[str, ...] = ()
    features: tuple[MetaFeature, ...] = ()


@dataclass(frozen=True)
class MetaEnum:
    name: str
    literals: tuple[str, ...]


@dataclass(frozen=True)
class MetaModel:
    classes: tuple[MetaClass, ...]
    enums: tuple[MetaEnum, ...]

    def cls(self, name: str) -> MetaClass | None:
        for c in self.classes:
            if c.name == name:
                return c
        return None

    def enum(self, name: str) -> MetaEnum | None:
        for e in self.enums:
            if e.name == name:
                return e
        return None

    def to_dict(self) -> dict:
        return {
            "classes": [
                {
                    "name": c.name,
                    "abstract": c.abstract,
                    "supertypes": list(c.supertypes),
                    "features": [
                        {"name": f.name, "kind": f.kind, "type": f.type, "many": f.many}
                        for f in c.features
                    ],
                }
                for c in self.classes
            ],
            "enums": [{"name": e.name, "literals": list(e.literals)} for e in self.enums],
        }

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), indent=2)

    def to_text(self) -> str:
        lines = []
        for c in self.classes:
            head = "abstract class" if c.abstract else "class"
            sup = f" extends {', '.join(c.supertypes)}" if c.supertypes else ""
            lines.append(f"{head} {c.name}{sup} {{")
            for f in c.features:
                mult = "[*]" if f.many else ""
                lines.append(f"  {f.kind} {f.name}: {f.type}{mult}")
            lines.append("}")
        for e in self.enums:
            lines.append(f"enum {e.name} {{ {', '.join(e.literals)} }}")
        return "\n".join(lines) + "\n"


class MetamodelError(Exception):
    """Raised when derivation hits a transformation-level defect."""

    def __init__(self, diagnostic: Diagnostic):
        super().__init__(diagnostic.message)
        self.diagnostic = diagnostic


def _is_abstract(rule: Rule, rule_names: set[str]) -> bool:
    return all(
        len(seq.items) == 1
        and isinstance(seq.items[0], RuleCall)
        and seq.items[0].card is None
        and seq.items[0].name in rule_names
        for seq in rule.body.options
    )


def derive_metamodel(ast: GrammarAst) -> MetaModel:
    """Derive the meta-model; assumes the grammar passed validation."""
    rule_names = {r.name for r in ast.rules}
    enum_names = {e.name for e in ast.enums}

    supertypes: dict[str, list[str]] = {name: [] for name in rule_names}
    abstract: set[str] = set()
    for rule in ast.rules:
        if _is_abstract(rule, rule_names):
            abstract.add(rule.name)
            for seq in rule.body.options:
                call = seq.items[0]
                assert isinstance(call, RuleCall)
                if rule.name not in supertypes[call.name]:
                    supertypes[call.name].append(rule.name)

    classes: list[MetaClass] = []
    for rule in ast.rules:
        features: dict[str, MetaFeature] = {}
        if rule.name not in abstract:
            for expr in _rule_exprs(rule):
                if not isinstance(expr, Assignment):
                    continue
                feat = _feature_of(rule, expr, enum_names)
                prev = features.get(feat.name)
                if prev is None:
                    features[feat.name] = feat
                elif (prev.kind, prev.type) != (feat.kind, feat.type):
                    raise MetamodelError(Diagnostic(
                        ErrorCategory.TRANSFORMATION,
                        f"conflicting types for feature '{feat.name}' in rule '{rule.name}'",
                        rule.line, rule.column, feat.name,
                    ))
                elif feat.many and not prev.many:
                    features[feat.name] = feat
        classes.append(MetaClass(
            name=rule.name,
            abstract=rule.name in abstract,
            supertypes=tuple(supertypes[rule.name]),
            features=tuple(features.values()),
        ))

    enums = tuple(MetaEnum(e.name, tuple(l.name for l in e.literals)) for e in ast.enums)
    return MetaModel(tuple(classes), enums)


def _feature_of(rule: Rule, expr: Assignment, enum_names: set[str]) -> MetaFeature:
    many = expr.operator == "+="
    t = expr.target
    if expr.operator == "?=":
        return MetaFeature(expr.feature, "attribute", "boolean", False)
    if isinstance(t, Keyword):
        return MetaFeature(expr.feature, "attribute", "string", many)
    if isinstance(t, TerminalCall):
        prim = {"ID": "string", "STRING": "string", "INT": "int"}[t.name]
        return MetaFeature(expr.feature, "attribute", prim, many)
    if isinstance(t, RuleCall):
        if t.name in enum_names:
            return MetaFeature(expr.feature, "attribute", t.name, many)
        return MetaFeature(expr.feature, "containment", t.name, many)
    if isinstance(t, CrossRef):
        return MetaFeature(expr.feature, "reference", t.target, many)
    raise TypeError(t)
