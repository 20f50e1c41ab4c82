#!/usr/bin/env python3
"""One-shot grammar generation experiment over a directory of domain
descriptions, with an optional repair pass over the faulty results.

Usage:
    python3 scripts/run_generation_experiment.py \
        --domains path/to/domains --backend https://api.example/v1 \
        --samples 12 --repair-attempts 5 --out report

The domains directory holds one ``<name>.txt`` per domain plus a
``manifest.json`` mapping each name to its origin (man_made or llm_made).
For a dry run without a live model, pass ``--backend mock:transcript.json``.
"""

import argparse
import sys
from pathlib import Path

sys.path.insert(0, str(Path(__file__).resolve().parents[1] / "src"))

from dslforge.cli import parse_backend
from dslforge.gateway import Gateway, make_backend
from dslforge.harness import emit_report, load_domains, run_generation, run_repair_experiment
from dslforge.pipeline import Workbench
from dslforge.store import ProjectStore, Status


def main() -> int:
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--domains", required=True)
    ap.add_argument("--backend", required=True,
                    help="mock:<transcript.json> or an OpenAI-compatible endpoint URL")
    ap.add_argument("--samples", type=int, default=12)
    ap.add_argument("--repair-attempts", type=int, default=5,
                    help="0 skips the repair pass")
    ap.add_argument("--store", default="experiment_store")
    ap.add_argument("--out", default="report")
    args = ap.parse_args()

    store = ProjectStore(args.store)
    workbench = Workbench(store, Gateway(make_backend(parse_backend(args.backend))))
    domains = load_domains(args.domains)
    project = store.create_project("generation-experiment")
    print(f"project {project.id}: {len(domains)} domains x {args.samples} samples")

    report = run_generation(workbench, project.id, domains, args.samples)
    for d in report.per_domain:
        rate = "n/a" if d.one_shot_rate is None else f"{d.one_shot_rate:.3f}"
        print(f"  {d.name:<24} {d.origin:<9} {d.first_shot_successes}/{d.samples}"
              f"  rate={rate}  aborted={d.aborted}")

    if args.repair_attempts > 0:
        faulty = [v for v in store.versions(project.id) if v.status is Status.FAULTY]
        print(f"repairing {len(faulty)} faulty versions "
              f"(combined, up to {args.repair_attempts} attempts each)")
        run_repair_experiment(workbench, faulty, args.repair_attempts, report)
        stats = report.repair
        print(f"  fixed with context:    {stats.fixed_with}/{stats.faulty_count}")
        print(f"  fixed without context: {stats.fixed_without}/{stats.faulty_count}")
        print(f"  fixed combined:        {stats.fixed_combined}/{stats.faulty_count}")

    for path in emit_report(report, args.out):
        print(f"wrote {path}")
    return 0


if __name__ == "__main__":
    sys.exit(main())
