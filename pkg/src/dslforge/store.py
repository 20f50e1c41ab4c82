"""Persistence of projects and the version DAG, with base tracing.

Each project is a directory of JSON files (``project.json``,
``versions/<id>.json``, ``threads/<id>.json``).  Four well-formedness
constraints are enforced on every insert:

  C1  more than one base only when a DSL generalizes several examples;
  C2  an error-message input depends on exactly one faulty base;
  C3  an error-message version has the same kind as its base;
  C4  any other single-base version has the base's kind and the base
      must have no other successors.

C4 is deliberately not applied to error-message versions: the combined
repair strategy grows two independent chains from one faulty base.
Cross-kind tracing (the grammar an example was instantiated from, or the
example a grammar was generalized from) uses ``derived_from``, never a base.
"""

from __future__ import annotations

import json
import secrets
import threading
from dataclasses import asdict, dataclass, field, replace
from datetime import datetime, timezone
from enum import Enum
from pathlib import Path


class VersionKind(str, Enum):
    DSL = "dsl"
    EXAMPLE = "example"


class InputFormat(str, Enum):
    DEFINITION = "definition"
    PROPERTIES = "properties"
    ERROR_MESSAGE = "error_message"


class Status(str, Enum):
    VALID = "valid"
    FAULTY = "faulty"


@dataclass(frozen=True)
class Project:
    id: str
    name: str
    created_at: str


@dataclass(frozen=True)
class Version:
    id: str
    project_id: str
    kind: VersionKind
    input_format: InputFormat
    input: str
    base_ids: tuple[str, ...]
    with_context: bool
    definition: str
    status: Status
    error_message: str | None
    thread_id: str | None
    derived_from: str | None
    name: str | None
    description: str | None
    created_at: str

    def to_dict(self) -> dict:
        d = asdict(self)
        d["kind"] = self.kind.value
        d["input_format"] = self.input_format.value
        d["status"] = self.status.value
        d["base_ids"] = list(self.base_ids)
        return d

    @staticmethod
    def from_dict(d: dict) -> "Version":
        return Version(
            id=d["id"],
            project_id=d["project_id"],
            kind=VersionKind(d["kind"]),
            input_format=InputFormat(d["input_format"]),
            input=d["input"],
            base_ids=tuple(d["base_ids"]),
            with_context=d["with_context"],
            definition=d["definition"],
            status=Status(d["status"]),
            error_message=d.get("error_message"),
            thread_id=d.get("thread_id"),
            derived_from=d.get("derived_from"),
            name=d.get("name"),
            description=d.get("description"),
            created_at=d["created_at"],
        )


@dataclass(frozen=True)
class VersionDraft:
    """A version before persistence: no id, no timestamp."""

    kind: VersionKind
    input_format: InputFormat
    input: str
    definition: str
    status: Status
    base_ids: tuple[str, ...] = ()
    with_context: bool = False
    error_message: str | None = None
    thread_id: str | None = None
    derived_from: str | None = None
    name: str | None = None
    description: str | None = None


class StoreError(Exception):
    code = "STORE_ERROR"


class UnknownProject(StoreError):
    code = "UNKNOWN_PROJECT"


class UnknownVersion(StoreError):
    code = "UNKNOWN_VERSION"


class UnknownBase(StoreError):
    code = "UNKNOWN_BASE"


class HasSuccessors(StoreError):
    code = "HAS_SUCCESSORS"


class InvalidDraft(StoreError):
    code = "INVALID_DRAFT"


class ConstraintViolation(StoreError):
    def __init__(self, constraint: str, message: str):
        super().__init__(f"{constraint}: {message}")
        self.constraint = constraint
        self.code = f"CONSTRAINT_{constraint}"


def _new_id() -> str:
    return secrets.token_hex(16)


def _now() -> str:
    return datetime.now(timezone.utc).isoformat()


def _dump(data: dict) -> str:
    return json.dumps(data, indent=2, sort_keys=True) + "\n"


class ProjectStore:
    """File-backed store; one writer at a time per project."""

    def __init__(self, root: str | Path):
        self.root = Path(root)
        self.root.mkdir(parents=True, exist_ok=True)
        self._lock = threading.RLock()
        self._project_locks: dict[str, threading.RLock] = {}

    # -- paths ------------------------------------------------------------

    def _project_dir(self, project_id: str) -> Path:
        return self.root / project_id

    def _version_path(self, project_id: str, version_id: str) -> Path:
        return self._project_dir(project_id) / "versions" / f"{version_id}.json"

    def _plock(self, project_id: str) -> threading.RLock:
        with self._lock:
            return self._project_locks.setdefault(project_id, threading.RLock())

    # -- projects ----------------------------------------------------------

    def create_project(self, name: str) -> Project:
        if not name:
            raise InvalidDraft("project name must be non-empty")
        project = Project(id=_new_id(), name=name, created_at=_now())
        pdir = self._project_dir(project.id)
        (pdir / "versions").mkdir(parents=True)
        (pdir / "threads").mkdir()
        (pdir / "project.json").write_text(_dump(asdict(project)))
        return project

    def get_project(self, project_id: str) -> Project:
        path = self._project_dir(project_id) / "project.json"
        if not path.exists():
            raise UnknownProject(project_id)
        return Project(**json.loads(path.read_text()))

    def list_projects(self) -> list[Project]:
        projects = []
        for pdir in sorted(self.root.iterdir()):
            meta = pdir / "project.json"
            if meta.exists():
                projects.append(Project(**json.loads(meta.read_text())))
        return projects

    # -- versions ----------------------------------------------------------

    def versions(self, project_id: str) -> list[Version]:
        self.get_project(project_id)
        vdir = self._project_dir(project_id) / "versions"
        out = [Version.from_dict(json.loads(p.read_text())) for p in vdir.glob("*.json")]
        return sorted(out, key=lambda v: (v.created_at, v.id))

    def get_version(self, project_id: str, version_id: str) -> Version:
        path = self._version_path(project_id, version_id)
        if not path.exists():
            raise UnknownVersion(version_id)
        return Version.from_dict(json.loads(path.read_text()))

    def find_version(self, version_id: str) -> Version:
        """Look a version up across all projects."""
        for project in self.list_projects():
            path = self._version_path(project.id, version_id)
            if path.exists():
                return Version.from_dict(json.loads(path.read_text()))
        raise UnknownVersion(version_id)

    def successors(self, project_id: str, version_id: str) -> list[Version]:
        return [v for v in self.versions(project_id) if version_id in v.base_ids]

    def add_version(self, project_id: str, draft: VersionDraft) -> Version:
        with self._plock(project_id):
            self.get_project(project_id)
            bases = []
            for base_id in draft.base_ids:
                path = self._version_path(project_id, base_id)
                if not path.exists():
                    raise UnknownBase(base_id)
                bases.append(Version.from_dict(json.loads(path.read_text())))
            self._check_constraints(project_id, draft, bases)
            self._check_coherence(project_id, draft)
            version = Version(
                id=_new_id(),
                project_id=project_id,
                created_at=_now(),
                kind=draft.kind,
                input_format=draft.input_format,
                input=draft.input,
                base_ids=tuple(draft.base_ids),
                with_context=draft.with_context,
                definition=draft.definition,
                status=draft.status,
                error_message=draft.error_message,
                thread_id=draft.thread_id,
                derived_from=draft.derived_from,
                name=draft.name,
                description=draft.description,
            )
            self._version_path(project_id, version.id).write_text(_dump(version.to_dict()))
            return version

    def _check_coherence(self, project_id: str, draft: VersionDraft) -> None:
        if (draft.status is Status.FAULTY) != (draft.error_message is not None):
            raise InvalidDraft("status faulty iff an error message is present")
        if draft.with_context and not draft.base_ids:
            raise InvalidDraft("with_context requires at least one base")
        if draft.derived_from is not None:
            origin = self.get_version(project_id, draft.derived_from)
            if origin.kind is draft.kind:
                raise InvalidDraft("derived_from must link a version of the other kind")

    def _check_constraints(self, project_id: str, draft: VersionDraft, bases: list[Version]) -> None:
        if len(bases) > 1:
            if draft.kind is not VersionKind.DSL or any(b.kind is not VersionKind.EXAMPLE for b in bases):
                raise ConstraintViolation(
                    "C1", "more than one base only for a DSL generalizing examples")
        if draft.input_format is InputFormat.ERROR_MESSAGE:
            if len(bases) != 1 or bases[0].status is not Status.FAULTY:
                raise ConstraintViolation(
                    "C2", "an error-message input must depend on exactly one faulty base")
            if draft.kind is not bases[0].kind:
                raise ConstraintViolation(
                    "C3", "an error-message version must have the kind of its base")
        elif len(bases) == 1:
            base = bases[0]
            if draft.kind is not base.kind:
                raise ConstraintViolation(
                    "C4", "a new version must have the same kind as its base")
            if self.successors(project_id, base.id):
                raise ConstraintViolation(
                    "C4", "the base must have no other successors")

    def delete_version(self, project_id: str, version_id: str) -> None:
        with self._plock(project_id):
            version = self.get_version(project_id, version_id)
            if self.successors(project_id, version_id):
                raise HasSuccessors(version_id)
            self._version_path(project_id, version.id).unlink()

    def lineage(self, project_id: str, version_id: str) -> list[Version]:
        """Root-to-version spine following first base links."""
        chain: list[Version] = []
        current = self.get_version(project_id, version_id)
        seen: set[str] = set()
        while True:
            chain.append(current)
            if not current.base_ids or current.id in seen:
                break
            seen.add(current.id)
            current = self.get_version(project_id, current.base_ids[0])
        chain.reverse()
        return chain

    # -- threads -----------------------------------------------------------

    def save_thread(self, project_id: str, thread_id: str, data: dict) -> None:
        path = self._project_dir(project_id) / "threads" / f"{thread_id}.json"
        path.write_text(_dump(data))

    def load_thread(self, project_id: str, thread_id: str) -> dict:
        path = self._project_dir(project_id) / "threads" / f"{thread_id}.json"
        if not path.exists():
            raise UnknownVersion(thread_id)
        return json.loads(path.read_text())
