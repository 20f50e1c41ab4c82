"""The version-processing pipeline and the automatic repair loop.

``process_version`` is the core cycle: build a prompt, run the
thread, parse the structured answer, validate the produced definition with
the grammar compiler (or the instance parser for examples), and persist a
version either way.  ``repair`` retries faulty grammars with the error
message as input, with or without the prior conversation context.
"""

from __future__ import annotations

from dataclasses import dataclass
from enum import Enum

from .diagnostics import Diagnostic, Severity, has_errors
from .gateway import Gateway, GatewayError, Thread
from .gdl import GrammarAst, parse_grammar
from .instances import InstanceModel, parse_instance
from .metamodel import MetaModel, derive_metamodel
from .prompts import (
    ASSISTANT_INSTRUCTIONS,
    BaseMode,
    InvalidConfiguration,
    MalformedAnswer,
    MissingProperty,
    PromptConfiguration,
    answer_schema,
    build_prompt,
    is_valid_configuration,
    parse_answer,
)
from .store import (
    InputFormat,
    ProjectStore,
    Status,
    Version,
    VersionDraft,
    VersionKind,
)


class RepairMode(str, Enum):
    WITH_CONTEXT = "with_context"
    WITHOUT_CONTEXT = "without_context"


class RepairPreconditionError(Exception):
    pass


@dataclass(frozen=True)
class RepairOutcome:
    fixed: bool
    attempts_used: int
    chain: tuple[str, ...]  # faulty root through final attempt
    mode: RepairMode

    def to_dict(self) -> dict:
        return {
            "fixed": self.fixed,
            "attempts_used": self.attempts_used,
            "chain": list(self.chain),
            "mode": self.mode.value,
        }


@dataclass(frozen=True)
class CombinedRepairOutcome:
    with_context: RepairOutcome
    without_context: RepairOutcome

    @property
    def fixed_any(self) -> bool:
        return self.with_context.fixed or self.without_context.fixed

    def to_dict(self) -> dict:
        return {
            "with": self.with_context.to_dict(),
            "without": self.without_context.to_dict(),
            "fixed_any": self.fixed_any,
        }


def first_error(diagnostics: list[Diagnostic]) -> Diagnostic:
    for d in diagnostics:
        if d.severity is Severity.ERROR:
            return d
    return diagnostics[0]


def validate_definition(
    kind: VersionKind, definition: str, governing_grammar: GrammarAst | None
) -> tuple[Status, str | None]:
    """Compile a grammar or parse an example; returns (status, error message)."""
    if kind is VersionKind.DSL:
        ast = parse_grammar(definition)
        if isinstance(ast, list):
            return Status.FAULTY, first_error(ast).render()
        from .validation import validate_grammar

        diags = validate_grammar(ast)
        if has_errors(diags):
            return Status.FAULTY, first_error(diags).render()
        return Status.VALID, None
    if governing_grammar is None:
        return Status.FAULTY, "Invalid state error at 1:1: no governing grammar for this example"
    result = parse_instance(definition, governing_grammar)
    if isinstance(result, list):
        return Status.FAULTY, first_error(result).render()
    return Status.VALID, None


class Workbench:
    """Store + gateway wired into the assisted-evolution workflows."""

    def __init__(self, store: ProjectStore, gateway: Gateway):
        self.store = store
        self.gateway = gateway

    # -- threads ------------------------------------------------------------

    def _open_thread(self, project_id: str) -> Thread:
        thread = self.gateway.open_thread(ASSISTANT_INSTRUCTIONS)
        self.store.save_thread(project_id, thread.id, thread.to_dict())
        return thread

    def _continue_thread(self, project_id: str, thread_id: str) -> Thread:
        if thread_id in self.gateway.threads:
            return self.gateway.threads[thread_id]
        from .gateway import Message

        data = self.store.load_thread(project_id, thread_id)
        thread = Thread(id=data["id"], messages=[Message(**m) for m in data["messages"]])
        self.gateway.threads[thread.id] = thread
        return thread

    # -- grammar context ----------------------------------------------------

    def governing_grammar_text(self, version: Version) -> str | None:
        """The grammar an example conforms to, via derived_from tracing."""
        current: Version | None = version
        seen: set[str] = set()
        while current is not None and current.id not in seen:
            seen.add(current.id)
            if current.kind is VersionKind.DSL:
                return current.definition
            if current.derived_from is not None:
                current = self.store.get_version(version.project_id, current.derived_from)
            elif current.base_ids:
                current = self.store.get_version(version.project_id, current.base_ids[0])
            else:
                current = None
        return None

    # -- the pipeline ---------------------------------------------------------

    def process_version(
        self,
        project_id: str,
        config: PromptConfiguration,
        payload: str | list[str],
        base_ids: tuple[str, ...] | list[str] = (),
        supplemental_definition: str | None = None,
    ) -> Version:
        if not is_valid_configuration(config):
            raise InvalidConfiguration(f"{config} is not a valid configuration")
        bases = [self.store.get_version(project_id, b) for b in base_ids]
        anchor = bases[0] if bases else None

        # Same-kind bases stay base links; a single cross-kind anchor is a
        # derived_from trace (never a base, so C1-C4 keep their stated form).
        derived_from: str | None = None
        graph_base_ids: tuple[str, ...]
        if len(bases) > 1:
            graph_base_ids = tuple(b.id for b in bases)
        elif len(bases) == 1 and bases[0].kind is not config.kind:
            derived_from = bases[0].id
            graph_base_ids = ()
        else:
            graph_base_ids = tuple(b.id for b in bases)

        governing: GrammarAst | None = None
        if config.kind is VersionKind.EXAMPLE:
            text = supplemental_definition
            if text is None and anchor is not None:
                text = anchor.definition if anchor.kind is VersionKind.DSL \
                    else self.governing_grammar_text(anchor)
            if text is not None:
                ast = parse_grammar(text)
                governing = ast if isinstance(ast, GrammarAst) else None
                if supplemental_definition is None:
                    supplemental_definition = text if config.base_mode is not BaseMode.BASE_WITH_CONTEXT else None

        prompt = build_prompt(config, payload, anchor, supplemental_definition)
        if prompt.thread_directive.continue_thread and prompt.thread_directive.thread_id:
            thread = self._continue_thread(project_id, prompt.thread_directive.thread_id)
        else:
            thread = self._open_thread(project_id)

        raw_answer = self.gateway.run(thread, prompt.assemble())  # gateway errors propagate
        self.store.save_thread(project_id, thread.id, thread.to_dict())

        schema = answer_schema(config.kind, repair=config.input_format is InputFormat.ERROR_MESSAGE)
        input_text = payload if isinstance(payload, str) else "\n\n".join(payload)
        try:
            answer = parse_answer(raw_answer, schema)
        except (MalformedAnswer, MissingProperty) as exc:
            draft = VersionDraft(
                kind=config.kind,
                input_format=config.input_format,
                input=input_text,
                definition=raw_answer,
                status=Status.FAULTY,
                error_message=f"malformed answer: {exc}",
                base_ids=graph_base_ids,
                with_context=config.base_mode is BaseMode.BASE_WITH_CONTEXT,
                thread_id=thread.id,
                derived_from=derived_from,
            )
            return self.store.add_version(project_id, draft)

        definition = answer["grammar"] if config.kind is VersionKind.DSL else answer["text"]
        definition = definition if isinstance(definition, str) else str(definition)
        status, error_message = validate_definition(config.kind, definition, governing)
        draft = VersionDraft(
            kind=config.kind,
            input_format=config.input_format,
            input=input_text,
            definition=definition,
            status=status,
            error_message=error_message,
            base_ids=graph_base_ids,
            with_context=config.base_mode is BaseMode.BASE_WITH_CONTEXT,
            thread_id=thread.id,
            derived_from=derived_from,
            name=str(answer["name"]) if answer.get("name") is not None else None,
            description=str(answer["description"]) if answer.get("description") is not None else None,
        )
        return self.store.add_version(project_id, draft)

    def add_manual_version(
        self,
        project_id: str,
        kind: VersionKind,
        definition: str,
        base_ids: tuple[str, ...] | list[str] = (),
        derived_from: str | None = None,
        name: str | None = None,
    ) -> Version:
        """A hand-written or hand-edited definition: validated, no LLM involved."""
        governing: GrammarAst | None = None
        if kind is VersionKind.EXAMPLE:
            text = None
            if derived_from is not None:
                text = self.store.get_version(project_id, derived_from).definition
            elif base_ids:
                base = self.store.get_version(project_id, base_ids[0])
                text = self.governing_grammar_text(base)
            if text is not None:
                ast = parse_grammar(text)
                governing = ast if isinstance(ast, GrammarAst) else None
        status, error_message = validate_definition(kind, definition, governing)
        draft = VersionDraft(
            kind=kind,
            input_format=InputFormat.DEFINITION,
            input=definition,
            definition=definition,
            status=status,
            error_message=error_message,
            base_ids=tuple(base_ids),
            derived_from=derived_from,
            name=name,
        )
        return self.store.add_version(project_id, draft)

    def metamodel_of(self, version: Version) -> MetaModel:
        ast = parse_grammar(version.definition)
        if isinstance(ast, list):
            raise ValueError(f"version {version.id} does not hold a parseable grammar")
        return derive_metamodel(ast)

    # -- repair ---------------------------------------------------------------

    def repair(
        self, version: Version, mode: RepairMode, max_attempts: int = 4
    ) -> RepairOutcome:
        if version.status is not Status.FAULTY:
            raise RepairPreconditionError("repair requires a faulty version")
        if version.kind is not VersionKind.DSL:
            raise RepairPreconditionError("only grammar versions are auto-repaired")
        chain = [version.id]
        current = version
        attempts = 0
        fixed = False
        for _ in range(max_attempts):
            use_thread = mode is RepairMode.WITH_CONTEXT and current.thread_id is not None
            config = PromptConfiguration(
                VersionKind.DSL,
                InputFormat.ERROR_MESSAGE,
                BaseMode.BASE_WITH_CONTEXT if use_thread else BaseMode.BASE_WITHOUT_CONTEXT,
            )
            supplemental = None if use_thread else current.definition
            try:
                new_version = self.process_version(
                    version.project_id,
                    config,
                    current.error_message or "unknown error",
                    base_ids=[current.id],
                    supplemental_definition=supplemental,
                )
            except GatewayError:
                break
            attempts += 1
            chain.append(new_version.id)
            current = new_version
            if current.status is Status.VALID:
                fixed = True
                break
        return RepairOutcome(fixed=fixed, attempts_used=attempts, chain=tuple(chain), mode=mode)

    def repair_combined(self, version: Version, max_attempts: int = 4) -> CombinedRepairOutcome:
        """Both strategies from the same faulty version, independent chains."""
        with_outcome = self.repair(version, RepairMode.WITH_CONTEXT, max_attempts)
        without_outcome = self.repair(version, RepairMode.WITHOUT_CONTEXT, max_attempts)
        return CombinedRepairOutcome(with_outcome, without_outcome)
