"""Prompt configurations, four-part prompt assembly, and answer parsing.

The configuration space is kind x input-format x base-mode = 2 x 3 x 3 = 18
points, of which exactly 12 are valid.  The six exclusions are kept in one
named constant so the set can be revised without code churn.
"""

from __future__ import annotations

import json
import re
from dataclasses import dataclass
from enum import Enum
from importlib import resources
from typing import Sequence

from .store import InputFormat, Version, VersionKind


class BaseMode(str, Enum):
    NONE = "none"
    BASE_WITHOUT_CONTEXT = "base_without_context"
    BASE_WITH_CONTEXT = "base_with_context"


@dataclass(frozen=True)
class PromptConfiguration:
    kind: VersionKind
    input_format: InputFormat
    base_mode: BaseMode

    def to_dict(self) -> dict:
        return {
            "kind": self.kind.value,
            "input_format": self.input_format.value,
            "base_mode": self.base_mode.value,
        }

    @staticmethod
    def from_dict(d: dict) -> "PromptConfiguration":
        return PromptConfiguration(
            VersionKind(d["kind"]), InputFormat(d["input_format"]), BaseMode(d["base_mode"])
        )


# The six excluded points of the raw 18-point space:
# x1: an error-message input needs a (faulty) base;
# x2: a definition input with a context thread is redundant (the thread
#     already holds the definition);
# x3: an example from a bare description must be anchored to some grammar;
# x4: importing a definition next to an ignored base is redundant with
#     importing it at a root.
EXCLUDED_CONFIGURATIONS: tuple[PromptConfiguration, ...] = (
    PromptConfiguration(VersionKind.DSL, InputFormat.ERROR_MESSAGE, BaseMode.NONE),
    PromptConfiguration(VersionKind.EXAMPLE, InputFormat.ERROR_MESSAGE, BaseMode.NONE),
    PromptConfiguration(VersionKind.DSL, InputFormat.DEFINITION, BaseMode.BASE_WITH_CONTEXT),
    PromptConfiguration(VersionKind.EXAMPLE, InputFormat.DEFINITION, BaseMode.BASE_WITH_CONTEXT),
    PromptConfiguration(VersionKind.EXAMPLE, InputFormat.PROPERTIES, BaseMode.NONE),
    PromptConfiguration(VersionKind.DSL, InputFormat.DEFINITION, BaseMode.BASE_WITHOUT_CONTEXT),
)


def enumerate_configurations() -> list[PromptConfiguration]:
    """The 12 valid prompt configurations, in a stable order."""
    out = []
    for kind in VersionKind:
        for input_format in InputFormat:
            for base_mode in BaseMode:
                config = PromptConfiguration(kind, input_format, base_mode)
                if config not in EXCLUDED_CONFIGURATIONS:
                    out.append(config)
    return out


def is_valid_configuration(config: PromptConfiguration) -> bool:
    return config not in EXCLUDED_CONFIGURATIONS


# ---------------------------------------------------------------------------
# Assembly

# Sent once per thread, verbatim, as the system-level message.
ASSISTANT_INSTRUCTIONS = "\n".join([
    "Don't justify your answers. Don't give information not mentioned in the CONTEXT INFORMATION.",
    "Return answer as JSON format, within the properties specified in the prompt.",
    "Always return code in plain text, that is, no markdown.",
    "If there are mentioned errors in the result, carefully read through the errors and "
    "try to CHANGE the result and do not just return the same result.",
])


def _template(name: str) -> str:
    return resources.files("dslforge.templates").joinpath(f"{name}.txt").read_text()


@dataclass(frozen=True)
class ThreadDirective:
    continue_thread: bool
    thread_id: str | None = None


@dataclass(frozen=True)
class Prompt:
    introduction: str
    context: str | None
    input_data: str
    output_indicator: str
    thread_directive: ThreadDirective

    def assemble(self) -> str:
        parts = [self.introduction]
        if self.context is not None:
            parts.append(self.context)
        parts.extend([self.input_data, self.output_indicator])
        return "\n\n".join(parts)


class PromptError(Exception):
    pass


class InvalidConfiguration(PromptError):
    pass


class MissingBase(PromptError):
    pass


def build_prompt(
    config: PromptConfiguration,
    payload: str | Sequence[str],
    base: Version | None = None,
    supplemental_definition: str | None = None,
) -> Prompt:
    """Assemble the four prompt parts for one valid configuration.

    ``payload`` may be a list for generalization prompts; each element is
    then wrapped separately.  The payload always appears verbatim.
    """
    if not is_valid_configuration(config):
        raise InvalidConfiguration(f"{config} is not one of the 12 valid configurations")
    if config.base_mode is not BaseMode.NONE and base is None:
        raise MissingBase(f"{config.base_mode.value} requires a base version")

    kind_tag = "dsl" if config.kind is VersionKind.DSL else "example"
    introduction = _template(f"intro_{kind_tag}")

    if config.input_format is InputFormat.ERROR_MESSAGE:
        input_tpl = _template("input_error")
    else:
        input_tpl = _template(f"input_{config.input_format.value}_{kind_tag}")
    payloads = [payload] if isinstance(payload, str) else list(payload)
    input_data = "\n\n".join(input_tpl.replace("<payload>", p) for p in payloads)

    # A definition is injected as context only when no thread carries it.
    context = None
    if config.base_mode is not BaseMode.BASE_WITH_CONTEXT:
        definition = supplemental_definition
        if definition is None and base is not None and (
            config.input_format is InputFormat.ERROR_MESSAGE
            or config.kind is VersionKind.EXAMPLE
        ):
            definition = base.definition
        if definition is not None:
            context = _template("context_definition").replace("<definition>", definition)

    output_indicator = _template(f"output_{kind_tag}")
    if config.input_format is InputFormat.ERROR_MESSAGE:
        output_indicator += "\n\n" + _template("output_adjustment")

    if config.base_mode is BaseMode.BASE_WITH_CONTEXT:
        directive = ThreadDirective(True, base.thread_id if base else None)
    else:
        directive = ThreadDirective(False)
    return Prompt(introduction, context, input_data, output_indicator, directive)


# ---------------------------------------------------------------------------
# Answer parsing

DSL_SCHEMA = ("grammar", "name", "description")
EXAMPLE_SCHEMA = ("text", "name")
DSL_REPAIR_SCHEMA = DSL_SCHEMA + ("adjustment",)
EXAMPLE_REPAIR_SCHEMA = EXAMPLE_SCHEMA + ("adjustment",)


def answer_schema(kind: VersionKind, repair: bool = False) -> tuple[str, ...]:
    if kind is VersionKind.DSL:
        return DSL_REPAIR_SCHEMA if repair else DSL_SCHEMA
    return EXAMPLE_REPAIR_SCHEMA if repair else EXAMPLE_SCHEMA


class MalformedAnswer(PromptError):
    pass


class MissingProperty(PromptError):
    def __init__(self, name: str):
        super().__init__(f"missing property '{name}'")
        self.property = name


_FENCE_RE = re.compile(r"^```[A-Za-z0-9_-]*\s*\n(.*)\n```\s*$", re.S)


def strip_fences(raw: str) -> str:
    m = _FENCE_RE.match(raw.strip())
    return m.group(1) if m else raw


def parse_answer(raw: str, schema: Sequence[str]) -> dict:
    """Extract required properties from a JSON answer.

    Markdown code fences are stripped first: the instruction says plain
    text, but real models violate it.  Extra properties are ignored.
    """
    text = strip_fences(raw)
    try:
        data = json.loads(text)
    except json.JSONDecodeError as exc:
        raise MalformedAnswer(f"answer is not a JSON object: {exc}") from exc
    if not isinstance(data, dict):
        raise MalformedAnswer("answer is not a JSON object")
    for prop in schema:
        if prop not in data:
            raise MissingProperty(prop)
    return {prop: data[prop] for prop in schema}
