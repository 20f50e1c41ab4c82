"""dslforge: an LLM-assisted workbench for developing textual DSLs.

A built-in grammar compiler (parsing, validation, meta-model derivation,
instance conformance) plus a versioned, prompt-driven workflow for creating,
extending, repairing, instantiating, and generalizing grammars with any
OpenAI-compatible model or a deterministic scripted mock.
"""

from .diagnostics import Diagnostic, ErrorCategory, Severity, classify_error, has_errors
from .gdl import GrammarAst, GrammarSource, parse_grammar, pretty_print
from .instances import InstanceModel, parse_instance, serialize_model, tokenize
from .metamodel import MetaModel, derive_metamodel
from .pipeline import RepairMode, RepairOutcome, Workbench
from .prompts import (
    BaseMode,
    PromptConfiguration,
    build_prompt,
    enumerate_configurations,
    parse_answer,
)
from .store import InputFormat, Project, ProjectStore, Status, Version, VersionKind
from .validation import validate_grammar

__version__ = "0.1.0"
