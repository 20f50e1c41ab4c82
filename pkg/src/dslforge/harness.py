"""Batch experiments: one-shot generation, repair rates, instantiation,
generalization; metric computation and report emission.

Rates with an empty denominator are reported as null, never 0.  Combined
repair success is a union over version-id sets, never a sum of rates.
"""

from __future__ import annotations

import csv
import difflib
import json
from dataclasses import dataclass, field
from decimal import ROUND_HALF_UP, Decimal
from pathlib import Path

from .diagnostics import classify_error
from .gateway import GatewayError
from .gdl import GrammarAst, parse_grammar
from .pipeline import BaseMode, RepairMode, Workbench
from .prompts import PromptConfiguration
from .store import InputFormat, Status, Version, VersionKind

MAN_MADE = "man_made"
LLM_MADE = "llm_made"


@dataclass(frozen=True)
class DomainDescription:
    name: str
    origin: str  # MAN_MADE | LLM_MADE
    text: str


@dataclass
class DomainResult:
    name: str
    origin: str
    samples: int = 0
    first_shot_successes: int = 0
    aborted: int = 0

    @property
    def one_shot_rate(self) -> float | None:
        return None if self.samples == 0 else self.first_shot_successes / self.samples

    def to_dict(self) -> dict:
        return {
            "name": self.name,
            "origin": self.origin,
            "samples": self.samples,
            "first_shot_successes": self.first_shot_successes,
            "aborted": self.aborted,
            "one_shot_rate": self.one_shot_rate,
        }


@dataclass
class RepairStats:
    faulty_count: int = 0
    fixed_with: int = 0
    fixed_without: int = 0
    fixed_combined: int = 0

    def rate(self, fixed: int) -> float | None:
        return None if self.faulty_count == 0 else fixed / self.faulty_count

    def to_dict(self) -> dict:
        return {
            "faulty_count": self.faulty_count,
            "fixed_with": self.fixed_with,
            "fixed_without": self.fixed_without,
            "fixed_combined": self.fixed_combined,
            "rate_with": self.rate(self.fixed_with),
            "rate_without": self.rate(self.fixed_without),
            "rate_combined": self.rate(self.fixed_combined),
        }


@dataclass
class ExperimentReport:
    per_domain: list[DomainResult] = field(default_factory=list)
    repair: RepairStats = field(default_factory=RepairStats)
    error_histogram: dict[str, int] = field(default_factory=dict)
    faulty_grammar_texts: list[str] = field(default_factory=list)

    @property
    def overall_rate(self) -> float | None:
        samples = sum(d.samples for d in self.per_domain)
        if samples == 0:
            return None
        return sum(d.first_shot_successes for d in self.per_domain) / samples

    def origin_rate(self, origin: str) -> float | None:
        samples = sum(d.samples for d in self.per_domain if d.origin == origin)
        if samples == 0:
            return None
        return sum(d.first_shot_successes for d in self.per_domain if d.origin == origin) / samples

    @property
    def distinct_faulty_grammars(self) -> int:
        return len({_normalize(t) for t in self.faulty_grammar_texts})

    def to_dict(self) -> dict:
        return {
            "per_domain": [d.to_dict() for d in self.per_domain],
            "overall": {
                "one_shot_rate": self.overall_rate,
                "by_origin": {
                    MAN_MADE: self.origin_rate(MAN_MADE),
                    LLM_MADE: self.origin_rate(LLM_MADE),
                },
            },
            "repair": self.repair.to_dict(),
            "error_histogram": dict(self.error_histogram),
            "distinct_faulty_grammars": self.distinct_faulty_grammars,
        }


def _normalize(text: str) -> str:
    return "\n".join(line.rstrip() for line in text.splitlines()).rstrip()


def _fmt_rate(rate: float | None) -> str:
    if rate is None:
        return ""
    return str(Decimal(repr(rate)).quantize(Decimal("0.001"), rounding=ROUND_HALF_UP))


# ---------------------------------------------------------------------------
# Experiments


def load_domains(directory: str | Path) -> list[DomainDescription]:
    """A directory of ``.txt`` descriptions plus ``manifest.json`` origin tags."""
    directory = Path(directory)
    manifest = json.loads((directory / "manifest.json").read_text())
    out = []
    for name, origin in manifest.items():
        text = (directory / f"{name}.txt").read_text()
        out.append(DomainDescription(name=name, origin=origin, text=text))
    return out


def run_generation(
    workbench: Workbench,
    project_id: str,
    domains: list[DomainDescription],
    samples_per_domain: int,
) -> ExperimentReport:
    """Independent root DSL versions per domain; one-shot success = valid first answer."""
    report = ExperimentReport()
    config = PromptConfiguration(VersionKind.DSL, InputFormat.PROPERTIES, BaseMode.NONE)
    for domain in domains:
        result = DomainResult(name=domain.name, origin=domain.origin)
        for _ in range(samples_per_domain):
            try:
                version = workbench.process_version(project_id, config, domain.text)
            except GatewayError:
                result.aborted += 1
                continue
            result.samples += 1
            if version.status is Status.VALID:
                result.first_shot_successes += 1
            else:
                _record_fault(report, version)
        report.per_domain.append(result)
    return report


def _record_fault(report: ExperimentReport, version: Version) -> None:
    report.faulty_grammar_texts.append(version.definition)
    category = classify_error(version.error_message or "", "validate")
    report.error_histogram[category.value] = report.error_histogram.get(category.value, 0) + 1


def run_repair_experiment(
    workbench: Workbench,
    faulty_versions: list[Version],
    max_attempts: int = 5,
    report: ExperimentReport | None = None,
) -> ExperimentReport:
    """Combined-mode repair over faulty DSL versions; union on version-id sets."""
    report = report if report is not None else ExperimentReport()
    fixed_with: set[str] = set()
    fixed_without: set[str] = set()
    for version in faulty_versions:
        outcome = workbench.repair_combined(version, max_attempts)
        if outcome.with_context.fixed:
            fixed_with.add(version.id)
        if outcome.without_context.fixed:
            fixed_without.add(version.id)
        for chain in (outcome.with_context.chain, outcome.without_context.chain):
            for vid in chain[1:]:  # intermediate attempts; the root is recorded by generation
                v = workbench.store.get_version(version.project_id, vid)
                if v.status is Status.FAULTY:
                    _record_fault(report, v)
    report.repair = RepairStats(
        faulty_count=len(faulty_versions),
        fixed_with=len(fixed_with),
        fixed_without=len(fixed_without),
        fixed_combined=len(fixed_with | fixed_without),
    )
    return report


def token_diff(produced: str, ground_truth: str) -> list[str]:
    """Token-level diff summary (an aid to manual judgment, not a verdict)."""
    a, b = ground_truth.split(), produced.split()
    ops = difflib.SequenceMatcher(a=a, b=b, autojunk=False).get_opcodes()
    out = []
    for tag, i1, i2, j1, j2 in ops:
        if tag == "equal":
            continue
        out.append(f"{tag}: {' '.join(a[i1:i2])!r} -> {' '.join(b[j1:j2])!r}")
    return out


def run_instantiation(
    workbench: Workbench,
    grammar_version: Version,
    descriptions: dict[str, str],
    ground_truth: str,
) -> dict[str, dict]:
    """Synthesize an example per description kind and compare to the ground truth."""
    if grammar_version.status is not Status.VALID:
        raise ValueError("instantiation requires a valid grammar version")
    config = PromptConfiguration(
        VersionKind.EXAMPLE, InputFormat.PROPERTIES, BaseMode.BASE_WITHOUT_CONTEXT
    )
    results: dict[str, dict] = {}
    for kind, description in descriptions.items():
        version = workbench.process_version(
            grammar_version.project_id, config, description, base_ids=[grammar_version.id]
        )
        parsed = version.status is Status.VALID
        results[kind] = {
            "version_id": version.id,
            "parsed": parsed,
            "error": version.error_message,
            "deviations": token_diff(version.definition, ground_truth),
        }
    return results


def run_generalization(
    workbench: Workbench,
    example_versions: list[Version],
    repair_attempts: int = 4,
) -> dict:
    """Generalize a grammar from example versions, repairing if faulty, then
    check that every input example still parses under the produced grammar."""
    if not example_versions:
        raise ValueError("generalization needs at least one example version")
    project_id = example_versions[0].project_id
    config = PromptConfiguration(VersionKind.DSL, InputFormat.DEFINITION, BaseMode.NONE)
    payload = [v.definition for v in example_versions]
    version = workbench.process_version(
        project_id, config, payload, base_ids=[v.id for v in example_versions]
    )
    fixed_after: int | None = None
    final = version
    if version.status is Status.FAULTY:
        outcome = workbench.repair(version, RepairMode.WITH_CONTEXT, repair_attempts)
        if outcome.fixed:
            fixed_after = outcome.attempts_used
            final = workbench.store.get_version(project_id, outcome.chain[-1])
    reparses = False
    if final.status is Status.VALID:
        ast = parse_grammar(final.definition)
        if isinstance(ast, GrammarAst):
            from .instances import parse_instance

            reparses = all(
                not isinstance(parse_instance(v.definition, ast), list)
                for v in example_versions
            )
    return {
        "grammar_version": final.id,
        "initial_version": version.id,
        "fixed_after": fixed_after,
        "reparses_inputs": reparses,
    }


# ---------------------------------------------------------------------------
# Report emission


def emit_report(report: ExperimentReport, out_dir: str | Path, formats: set[str] = frozenset({"json", "csv"})) -> list[Path]:
    out_dir = Path(out_dir)
    out_dir.mkdir(parents=True, exist_ok=True)
    written: list[Path] = []
    if "json" in formats:
        path = out_dir / "report.json"
        path.write_text(json.dumps(report.to_dict(), indent=2) + "\n")
        written.append(path)
    if "csv" in formats:
        rates = out_dir / "rates.csv"
        with rates.open("w", newline="") as fh:
            writer = csv.writer(fh)
            writer.writerow(["name", "origin", "samples", "successes", "rate"])
            for d in report.per_domain:
                writer.writerow([d.name, d.origin, d.samples, d.first_shot_successes,
                                 _fmt_rate(d.one_shot_rate)])
        written.append(rates)
        errors = out_dir / "errors.csv"
        with errors.open("w", newline="") as fh:
            writer = csv.writer(fh)
            writer.writerow(["category", "count"])
            for category in sorted(report.error_histogram):
                writer.writerow([category, report.error_histogram[category]])
        written.append(errors)
    return written
