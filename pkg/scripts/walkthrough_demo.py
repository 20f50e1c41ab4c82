#!/usr/bin/env python3
"""Self-contained walkthrough of the whole workbench, no network needed.

Runs the evolution story end to end against a scripted mock backend: create
a DSL from properties, extend it, backtrack, break it by hand, auto-repair
it, instantiate an example, overhaul the syntax, and add a hand-written
example.  Prints the resulting version graph.
"""

import json
import sys
import tempfile
from pathlib import Path

sys.path.insert(0, str(Path(__file__).resolve().parents[1] / "src"))

from dslforge.gateway import Gateway, MockBackend
from dslforge.pipeline import RepairMode, Workbench
from dslforge.prompts import BaseMode, PromptConfiguration
from dslforge.store import InputFormat, ProjectStore, VersionKind

G1 = "grammar Origami\nTutorial: 'tutorial' name=ID steps+=Step*;\nStep: 'step' text=STRING;\n"
G2 = ("grammar Origami\nTutorial: 'tutorial' name=ID steps+=Step*;\n"
      "Step: 'step' text=STRING fold=Fold?;\nFold: 'fold' at=INT;\n")
G2_BROKEN = G2.replace("fold=Fold?", "fold=Brokenness?")
G2_STILL_BROKEN = G2.replace("at=INT", "at=MissingBit")
G3 = G2.replace("'tutorial'", "'pattern'").replace("'step'", "'phase'")


def dsl(grammar, name="Origami", adjustment=None):
    data = {"grammar": grammar, "name": name, "description": "origami tutorials"}
    if adjustment:
        data["adjustment"] = adjustment
    return json.dumps(data)


TRANSCRIPT = [
    {"match": "folding tutorials", "answer": dsl(G1)},
    {"match": "fold positions", "answer": dsl(G2)},
    {"match": "fold positions again", "answer": dsl(G2)},
    {"match": "Brokenness", "answer": dsl(G2_STILL_BROKEN, adjustment="renamed the rule")},
    {"match": "MissingBit", "answer": dsl(G2, adjustment="restored the INT terminal")},
    {"match": "crane tutorial", "answer": json.dumps(
        {"text": 'tutorial crane step "base fold" fold 1', "name": "crane"})},
    {"match": "wordier keywords", "answer": dsl(G3)},
]

ROOT = PromptConfiguration(VersionKind.DSL, InputFormat.PROPERTIES, BaseMode.NONE)
EXTEND = PromptConfiguration(VersionKind.DSL, InputFormat.PROPERTIES, BaseMode.BASE_WITH_CONTEXT)
EXAMPLE = PromptConfiguration(VersionKind.EXAMPLE, InputFormat.PROPERTIES,
                              BaseMode.BASE_WITHOUT_CONTEXT)


def main() -> int:
    with tempfile.TemporaryDirectory() as tmp:
        store = ProjectStore(Path(tmp) / "store")
        wb = Workbench(store, Gateway(MockBackend(TRANSCRIPT)))
        p = store.create_project("origami-demo").id

        def show(label, version):
            print(f"{label:<22} {version.id[:8]}  {version.status.value:<6} "
                  f"bases={[b[:8] for b in version.base_ids]} "
                  f"trace={version.derived_from[:8] if version.derived_from else '-'}")
            return version

        v1 = show("root DSL", wb.process_version(p, ROOT, "folding tutorials"))
        v2 = show("extension", wb.process_version(p, EXTEND, "fold positions", [v1.id]))
        print(f"{'delete extension':<22} {v2.id[:8]}  (backtrack to the root)")
        store.delete_version(p, v2.id)
        v2b = show("re-extension", wb.process_version(p, EXTEND, "fold positions again", [v1.id]))
        v3 = show("manual faulty edit",
                  wb.add_manual_version(p, VersionKind.DSL, G2_BROKEN, base_ids=[v2b.id]))
        print(f"{'':<22} error: {v3.error_message}")
        outcome = wb.repair(v3, RepairMode.WITH_CONTEXT)
        print(f"{'auto-repair':<22} fixed={outcome.fixed} attempts={outcome.attempts_used} "
              f"chain={[c[:8] for c in outcome.chain]}")
        r2 = store.get_version(p, outcome.chain[-1])
        e1 = show("generated example", wb.process_version(p, EXAMPLE, "crane tutorial", [r2.id]))
        v4 = show("syntax overhaul", wb.process_version(p, EXTEND, "wordier keywords", [r2.id]))
        e2 = show("manual example",
                  wb.add_manual_version(p, VersionKind.EXAMPLE,
                                        'tutorial hat step "brim" fold 2', base_ids=[e1.id]))

        alive = store.versions(p)
        print(f"\n{len(alive)} live versions; lineage of the overhaul:")
        print("  " + " -> ".join(v.id[:8] for v in store.lineage(p, v4.id)))
        print("\nmeta-model of the final grammar:")
        print(wb.metamodel_of(v4).to_text())
        assert e2.status.value == "valid"
    return 0


if __name__ == "__main__":
    sys.exit(main())
