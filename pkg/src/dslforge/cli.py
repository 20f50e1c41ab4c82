"""Command-line interface.

Exit codes: 0 success, 1 domain error, 2 usage error.
"""

from __future__ import annotations

import argparse
import json
import os
import sys
from pathlib import Path

from .gateway import BackendConfig, Gateway, GatewayError, make_backend
from .gdl import GrammarAst, parse_grammar
from .harness import (
    emit_report,
    load_domains,
    run_generalization,
    run_generation,
    run_instantiation,
    run_repair_experiment,
)
from .instances import parse_instance, serialize_model
from .metamodel import MetamodelError, derive_metamodel
from .pipeline import RepairMode, RepairPreconditionError, Workbench
from .prompts import BaseMode, PromptConfiguration, PromptError
from .store import InputFormat, ProjectStore, Status, StoreError, VersionKind
from .validation import validate_grammar

DEFAULT_STORE = os.environ.get("DSL_FORGE_STORE", "dslforge_store")

_INPUT_FORMATS = {"properties": InputFormat.PROPERTIES,
                  "definition": InputFormat.DEFINITION,
                  "error": InputFormat.ERROR_MESSAGE}


class DomainError(Exception):
    pass


def parse_backend(spec: str | None) -> BackendConfig:
    if spec is None:
        raise DomainError("no backend configured; pass --backend mock:<transcript> or --backend <endpoint-url>")
    if spec.startswith("mock:"):
        return BackendConfig(mode="mock", transcript_path=spec[len("mock:"):])
    if spec.startswith(("http://", "https://")):
        model = os.environ.get("DSL_FORGE_MODEL", "gpt-4o")
        return BackendConfig(mode="http", endpoint=spec, model=model)
    raise DomainError(f"unrecognized backend spec '{spec}'")


def make_workbench(args: argparse.Namespace) -> Workbench:
    store = ProjectStore(args.store)
    gateway = Gateway(make_backend(parse_backend(args.backend)))
    return Workbench(store, gateway)


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="dslforge", description="LLM-assisted DSL workbench")
    parser.add_argument("--store", default=DEFAULT_STORE, help="project store directory")
    parser.add_argument("--backend", help="mock:<transcript.json> or an OpenAI-compatible endpoint URL")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("new", help="create a project")
    p.add_argument("name")

    p = sub.add_parser("versions", help="list versions of a project")
    p.add_argument("project")

    p = sub.add_parser("create", help="create a version through the LLM (or --manual)")
    p.add_argument("--project", required=True)
    p.add_argument("--kind", choices=["dsl", "example"], required=True)
    p.add_argument("--input", choices=list(_INPUT_FORMATS), default="properties")
    p.add_argument("--base", action="append", default=[], help="base version id (repeatable)")
    p.add_argument("--context", action="store_true", help="continue the base's thread")
    p.add_argument("--file", required=True, help="payload file (or definition file with --manual)")
    p.add_argument("--supplemental", help="grammar file injected as context")
    p.add_argument("--derived-from", help="cross-kind trace for --manual examples")
    p.add_argument("--manual", action="store_true", help="store the file verbatim, no LLM")

    p = sub.add_parser("repair", help="auto-repair a faulty grammar version")
    p.add_argument("version")
    p.add_argument("--mode", choices=["with", "without", "combined"], default="combined")
    p.add_argument("--attempts", type=int, default=4)

    p = sub.add_parser("delete", help="delete a leaf version")
    p.add_argument("version")

    p = sub.add_parser("validate", help="validate a grammar file (and optionally an example)")
    p.add_argument("grammar")
    p.add_argument("--example")

    p = sub.add_parser("metamodel", help="derive the meta-model of a version or grammar file")
    p.add_argument("target", help="version id or grammar file path")

    p = sub.add_parser("serve", help="run the REST API")
    p.add_argument("--port", type=int, default=8000)
    p.add_argument("--host", default="127.0.0.1")

    exp = sub.add_parser("experiment", help="batch experiments").add_subparsers(
        dest="experiment", required=True)

    p = exp.add_parser("generate", help="one-shot grammar generation over domain descriptions")
    p.add_argument("--domains", required=True, help="directory with .txt files + manifest.json")
    p.add_argument("--samples", type=int, default=12)
    p.add_argument("--out", default="report")
    p.add_argument("--repair-attempts", type=int, default=0,
                   help="also repair the faulty results with this cap (0 = skip)")

    p = exp.add_parser("repair", help="repair-rate measurement over faulty versions")
    p.add_argument("--version", action="append", required=True, dest="versions")
    p.add_argument("--attempts", type=int, default=5)
    p.add_argument("--out", default="report")

    p = exp.add_parser("instantiate", help="instantiate examples from three description kinds")
    p.add_argument("--grammar", required=True, help="valid grammar version id")
    p.add_argument("--general", required=True)
    p.add_argument("--non-technical", required=True)
    p.add_argument("--technical", required=True)
    p.add_argument("--ground-truth", required=True)

    p = exp.add_parser("generalize", help="generalize a grammar from example versions")
    p.add_argument("--example", action="append", required=True, dest="examples")
    p.add_argument("--attempts", type=int, default=4)
    return parser


def _print_diags(diags) -> None:
    for d in diags:
        print(f"{d.category.value} {d.line}:{d.column} {d.message}", file=sys.stderr)


def _cmd_validate(args) -> int:
    text = Path(args.grammar).read_text()
    ast = parse_grammar(text)
    if isinstance(ast, list):
        _print_diags(ast)
        return 1
    diags = validate_grammar(ast)
    errors = [d for d in diags if d.severity.value == "error"]
    _print_diags(diags)
    if errors:
        return 1
    print("valid")
    if args.example:
        result = parse_instance(Path(args.example).read_text(), ast)
        if isinstance(result, list):
            _print_diags(result)
            return 1
        print(serialize_model(result))
    return 0


def _cmd_metamodel(args) -> int:
    if Path(args.target).exists():
        ast = parse_grammar(Path(args.target).read_text())
        if isinstance(ast, list):
            _print_diags(ast)
            return 1
    else:
        store = ProjectStore(args.store)
        version = store.find_version(args.target)
        ast = parse_grammar(version.definition)
        if isinstance(ast, list):
            _print_diags(ast)
            return 1
    print(derive_metamodel(ast).to_text(), end="")
    return 0


def _cmd_create(args) -> int:
    store = ProjectStore(args.store)
    if args.manual:
        workbench = Workbench(store, gateway=None)  # type: ignore[arg-type]
        version = workbench.add_manual_version(
            args.project, VersionKind(args.kind), Path(args.file).read_text(),
            base_ids=args.base, derived_from=args.derived_from,
        )
    else:
        workbench = make_workbench(args)
        base_mode = BaseMode.NONE
        if args.base:
            base_mode = BaseMode.BASE_WITH_CONTEXT if args.context else BaseMode.BASE_WITHOUT_CONTEXT
        config = PromptConfiguration(VersionKind(args.kind), _INPUT_FORMATS[args.input], base_mode)
        supplemental = Path(args.supplemental).read_text() if args.supplemental else None
        version = workbench.process_version(
            args.project, config, Path(args.file).read_text(),
            base_ids=args.base, supplemental_definition=supplemental,
        )
    print(json.dumps(version.to_dict(), indent=2))
    return 0 if version.status is Status.VALID else 1


def _cmd_repair(args) -> int:
    workbench = make_workbench(args)
    version = workbench.store.find_version(args.version)
    if args.mode == "combined":
        outcome = workbench.repair_combined(version, args.attempts)
        print(json.dumps(outcome.to_dict(), indent=2))
        return 0 if outcome.fixed_any else 1
    mode = RepairMode.WITH_CONTEXT if args.mode == "with" else RepairMode.WITHOUT_CONTEXT
    outcome = workbench.repair(version, mode, args.attempts)
    print(json.dumps(outcome.to_dict(), indent=2))
    return 0 if outcome.fixed else 1


def _cmd_experiment(args) -> int:
    workbench = make_workbench(args)
    if args.experiment == "generate":
        domains = load_domains(args.domains)
        project = workbench.store.create_project("generation-experiment")
        report = run_generation(workbench, project.id, domains, args.samples)
        if args.repair_attempts > 0:
            faulty = [v for v in workbench.store.versions(project.id) if v.status is Status.FAULTY]
            run_repair_experiment(workbench, faulty, args.repair_attempts, report)
        for path in emit_report(report, args.out):
            print(path)
        return 0
    if args.experiment == "repair":
        versions = [workbench.store.find_version(v) for v in args.versions]
        report = run_repair_experiment(workbench, versions, args.attempts)
        for path in emit_report(report, args.out):
            print(path)
        return 0
    if args.experiment == "instantiate":
        grammar = workbench.store.find_version(args.grammar)
        descriptions = {
            "general": Path(args.general).read_text(),
            "non_technical": Path(args.non_technical).read_text(),
            "technical": Path(args.technical).read_text(),
        }
        results = run_instantiation(workbench, grammar, descriptions,
                                    Path(args.ground_truth).read_text())
        print(json.dumps(results, indent=2))
        return 0
    if args.experiment == "generalize":
        examples = [workbench.store.find_version(v) for v in args.examples]
        print(json.dumps(run_generalization(workbench, examples, args.attempts), indent=2))
        return 0
    return 2


def run(argv: list[str] | None = None) -> int:
    args = build_parser().parse_args(argv)
    try:
        if args.command == "new":
            store = ProjectStore(args.store)
            project = store.create_project(args.name)
            print(project.id)
            return 0
        if args.command == "versions":
            store = ProjectStore(args.store)
            for v in store.versions(args.project):
                print(json.dumps(v.to_dict()))
            return 0
        if args.command == "create":
            return _cmd_create(args)
        if args.command == "repair":
            return _cmd_repair(args)
        if args.command == "delete":
            store = ProjectStore(args.store)
            version = store.find_version(args.version)
            store.delete_version(version.project_id, version.id)
            return 0
        if args.command == "validate":
            return _cmd_validate(args)
        if args.command == "metamodel":
            return _cmd_metamodel(args)
        if args.command == "experiment":
            return _cmd_experiment(args)
        if args.command == "serve":
            import uvicorn

            from .api import create_app

            app = create_app(make_workbench(args))
            uvicorn.run(app, host=args.host, port=args.port)
            return 0
    except (StoreError, GatewayError, PromptError, MetamodelError,
            RepairPreconditionError, DomainError, FileNotFoundError, ValueError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    return 2


def main() -> None:
    sys.exit(run())


if __name__ == "__main__":
    main()
