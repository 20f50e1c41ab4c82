"""REST service wiring the workbench into one HTTP boundary.

The API is thin: every behavior is reachable through module operations, and
every inner error path maps to exactly one machine-readable code.  No stack
traces cross the boundary.
"""

from __future__ import annotations

from typing import Any

from fastapi import FastAPI, Request
from fastapi.responses import JSONResponse, Response
from pydantic import BaseModel

from .gateway import GatewayError, MockExhausted, Timeout, TransportError
from .gdl import GrammarAst, parse_grammar
from .instances import parse_instance, serialize_model
from .metamodel import MetamodelError, derive_metamodel
from .pipeline import RepairMode, RepairPreconditionError, Workbench
from .prompts import (
    BaseMode,
    InvalidConfiguration,
    MissingBase,
    PromptConfiguration,
    enumerate_configurations,
)
from .store import (
    ConstraintViolation,
    HasSuccessors,
    InputFormat,
    InvalidDraft,
    Status,
    StoreError,
    UnknownBase,
    UnknownProject,
    UnknownVersion,
    VersionKind,
)
from .validation import validate_grammar


class CreateProject(BaseModel):
    name: str


class CreateVersion(BaseModel):
    kind: str
    payload: str | list[str] | None = None
    input_format: str | None = None
    base_mode: str | None = None
    base_ids: list[str] = []
    supplemental_definition: str | None = None
    definition: str | None = None  # manual mode: validated verbatim, no LLM
    derived_from: str | None = None
    name: str | None = None


class RepairRequest(BaseModel):
    mode: str = "combined"
    attempts: int = 4


class ValidateRequest(BaseModel):
    grammar: str
    example: str | None = None


def _error(status: int, code: str, message: str) -> JSONResponse:
    return JSONResponse(status_code=status, content={"code": code, "message": message})


_ERROR_MAP: list[tuple[type, int, str | None]] = [
    (ConstraintViolation, 409, None),  # code carried by the exception
    (HasSuccessors, 409, "HAS_SUCCESSORS"),
    (UnknownProject, 404, "UNKNOWN_PROJECT"),
    (UnknownVersion, 404, "UNKNOWN_VERSION"),
    (UnknownBase, 404, "UNKNOWN_BASE"),
    (InvalidDraft, 400, "INVALID_DRAFT"),
    (InvalidConfiguration, 400, "INVALID_CONFIGURATION"),
    (MissingBase, 400, "MISSING_BASE"),
    (RepairPreconditionError, 409, "REPAIR_PRECONDITION"),
    (Timeout, 504, "GATEWAY_TIMEOUT"),
    (MockExhausted, 502, "MOCK_EXHAUSTED"),
    (TransportError, 502, "GATEWAY_TRANSPORT"),
    (GatewayError, 502, "GATEWAY_ERROR"),
    (MetamodelError, 409, "TRANSFORMATION_ERROR"),
    (StoreError, 400, "STORE_ERROR"),
]


def create_app(workbench: Workbench) -> FastAPI:
    app = FastAPI(title="dslforge", version="0.1.0")
    store = workbench.store

    @app.exception_handler(Exception)
    async def handle(request: Request, exc: Exception):  # noqa: ANN001
        for exc_type, status, code in _ERROR_MAP:
            if isinstance(exc, exc_type):
                return _error(status, code or getattr(exc, "code", "ERROR"), str(exc))
        if isinstance(exc, ValueError):
            return _error(400, "INVALID_REQUEST", str(exc))
        return _error(500, "INTERNAL", "internal error")

    for exc_type, _, _ in _ERROR_MAP:
        app.add_exception_handler(exc_type, handle)
    app.add_exception_handler(ValueError, handle)

    @app.get("/configurations")
    def configurations() -> list[dict]:
        return [c.to_dict() for c in enumerate_configurations()]

    @app.post("/projects", status_code=201)
    def create_project(body: CreateProject) -> dict:
        from dataclasses import asdict

        return asdict(store.create_project(body.name))

    @app.get("/projects")
    def list_projects() -> list[dict]:
        from dataclasses import asdict

        return [asdict(p) for p in store.list_projects()]

    @app.get("/projects/{project_id}")
    def get_project(project_id: str) -> dict:
        from dataclasses import asdict

        return asdict(store.get_project(project_id))

    @app.get("/projects/{project_id}/versions")
    def list_versions(project_id: str) -> list[dict]:
        return [v.to_dict() for v in store.versions(project_id)]

    @app.post("/projects/{project_id}/versions", status_code=201)
    def create_version(project_id: str, body: CreateVersion) -> dict:
        kind = VersionKind(body.kind)
        if body.definition is not None:
            version = workbench.add_manual_version(
                project_id, kind, body.definition,
                base_ids=body.base_ids, derived_from=body.derived_from, name=body.name,
            )
        else:
            if body.payload is None or body.input_format is None:
                raise ValueError("prompt mode requires payload and input_format")
            config = PromptConfiguration(
                kind, InputFormat(body.input_format), BaseMode(body.base_mode or "none")
            )
            version = workbench.process_version(
                project_id, config, body.payload,
                base_ids=body.base_ids,
                supplemental_definition=body.supplemental_definition,
            )
        return version.to_dict()

    @app.get("/versions/{version_id}")
    def get_version(version_id: str) -> dict:
        return store.find_version(version_id).to_dict()

    @app.delete("/versions/{version_id}", status_code=204)
    def delete_version(version_id: str) -> Response:
        version = store.find_version(version_id)
        store.delete_version(version.project_id, version.id)
        return Response(status_code=204)

    @app.post("/versions/{version_id}/repair")
    def repair(version_id: str, body: RepairRequest) -> dict:
        version = store.find_version(version_id)
        if body.mode == "combined":
            return workbench.repair_combined(version, body.attempts).to_dict()
        mode = RepairMode.WITH_CONTEXT if body.mode == "with" else RepairMode.WITHOUT_CONTEXT
        return workbench.repair(version, mode, body.attempts).to_dict()

    @app.get("/versions/{version_id}/metamodel")
    def metamodel(version_id: str) -> dict:
        version = store.find_version(version_id)
        mm = workbench.metamodel_of(version)
        return {"metamodel": mm.to_dict(), "text": mm.to_text()}

    @app.get("/versions/{version_id}/lineage")
    def lineage(version_id: str) -> list[dict]:
        version = store.find_version(version_id)
        return [v.to_dict() for v in store.lineage(version.project_id, version.id)]

    @app.post("/validate")
    def validate(body: ValidateRequest) -> dict:
        ast = parse_grammar(body.grammar)
        if isinstance(ast, list):
            return {"valid": False, "diagnostics": [d.to_dict() for d in ast]}
        diags = validate_grammar(ast)
        out: dict[str, Any] = {
            "valid": not any(d.severity.value == "error" for d in diags),
            "diagnostics": [d.to_dict() for d in diags],
        }
        if out["valid"] and body.example is not None:
            result = parse_instance(body.example, ast)
            if isinstance(result, list):
                out["example"] = {"parsed": False, "diagnostics": [d.to_dict() for d in result]}
            else:
                import json as _json

                out["example"] = {"parsed": True, "model": _json.loads(serialize_model(result))}
        return out

    return app
