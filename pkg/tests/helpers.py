"""Builders shared by the unit and acceptance tests."""

from __future__ import annotations

import json
from pathlib import Path

from dslforge.gateway import Gateway, MockBackend
from dslforge.pipeline import Workbench
from dslforge.store import ProjectStore

VALID_TINY = "grammar Tiny\nRoot: 'hello' name=ID;\n"

# missing the closing ';' on the rule
FAULTY_TINY = "grammar Tiny\nRoot: 'hello' name=ID\n"


def dsl_answer(grammar: str, name: str = "Lang", description: str = "a language",
               adjustment: str | None = None) -> str:
    data = {"grammar": grammar, "name": name, "description": description}
    if adjustment is not None:
        data["adjustment"] = adjustment
    return json.dumps(data)


def example_answer(text: str, name: str = "sample", adjustment: str | None = None) -> str:
    data = {"text": text, "name": name}
    if adjustment is not None:
        data["adjustment"] = adjustment
    return json.dumps(data)


def make_workbench(root: Path, entries: list[dict]) -> Workbench:
    store = ProjectStore(root / "store")
    return Workbench(store, Gateway(MockBackend(entries)))
