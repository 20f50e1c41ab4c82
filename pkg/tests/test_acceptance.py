"""Acceptance suite.

One test per criterion; each registers a single PASS/FAIL line that the
terminal summary echoes (see conftest).  Timing bounds are asserted with a
monotonic clock around the relevant work.
"""

import csv
import json
import random
import time

from conftest import criterion
from dslforge.diagnostics import ErrorCategory, Severity
from dslforge.gateway import Gateway, MockBackend
from dslforge.gdl import GrammarAst, parse_grammar
from dslforge.harness import (
    LLM_MADE,
    MAN_MADE,
    DomainDescription,
    _fmt_rate,
    emit_report,
    run_generation,
    run_repair_experiment,
)
from dslforge.instances import InstanceModel, accepts, parse_instance
from dslforge.metamodel import derive_metamodel
from dslforge.pipeline import RepairMode, Workbench
from dslforge.prompts import (
    BaseMode,
    EXCLUDED_CONFIGURATIONS,
    PromptConfiguration,
    enumerate_configurations,
)
from dslforge.store import (
    ConstraintViolation,
    InputFormat,
    ProjectStore,
    Status,
    StoreError,
    Version,
    VersionDraft,
    VersionKind,
)
from dslforge.validation import validate_grammar
from helpers import FAULTY_TINY, VALID_TINY, dsl_answer, example_answer, make_workbench
from oracle import all_words, alphabet_of, bounded_language, render
from samples import CHESS, COFFEE_MACHINE, INVENTORY, ORIGAMI, ROBOT, SCHOOL, SUITE

ROOT_DSL = PromptConfiguration(VersionKind.DSL, InputFormat.PROPERTIES, BaseMode.NONE)


# ---------------------------------------------------------------------------
# Criterion 1: configuration space and graph constraints


def _draft(kind=VersionKind.DSL, input_format=InputFormat.PROPERTIES,
           status=Status.VALID, base_ids=(), **kw) -> VersionDraft:
    return VersionDraft(
        kind=kind, input_format=input_format, input="in",
        definition=kw.pop("definition", VALID_TINY), status=status,
        error_message="Syntax error at 1:1: x" if status is Status.FAULTY else None,
        base_ids=tuple(base_ids), **kw,
    )


def test_criterion_1_configuration_space_and_constraints(tmp_path):
    with criterion(1, "12 valid prompt configurations; C1-C4 enforced on insert"):
        start = time.monotonic()

        configs = enumerate_configurations()
        assert len(configs) == 12 and len(set(configs)) == 12
        assert len(EXCLUDED_CONFIGURATIONS) == 6
        assert all(c not in configs for c in EXCLUDED_CONFIGURATIONS)

        store = ProjectStore(tmp_path / "store")
        p = store.create_project("constraints").id
        dsl = store.add_version(p, _draft())
        faulty = store.add_version(p, _draft(status=Status.FAULTY))
        e1 = store.add_version(p, _draft(kind=VersionKind.EXAMPLE, definition="x",
                                         derived_from=dsl.id))
        e2 = store.add_version(p, _draft(kind=VersionKind.EXAMPLE, definition="y",
                                         derived_from=dsl.id))

        # C1: multi-base is accepted only as a generalization
        gen = store.add_version(p, _draft(base_ids=[e1.id, e2.id]))
        assert gen.base_ids == (e1.id, e2.id)
        for bad in [
            _draft(kind=VersionKind.EXAMPLE, definition="z", base_ids=[e1.id, e2.id]),
            _draft(base_ids=[dsl.id, e1.id]),
            # C2: error input on a valid base, or with no base
            _draft(input_format=InputFormat.ERROR_MESSAGE, base_ids=[dsl.id]),
            _draft(input_format=InputFormat.ERROR_MESSAGE),
            # C3: error input must keep the base's kind
            _draft(kind=VersionKind.EXAMPLE, definition="z",
                   input_format=InputFormat.ERROR_MESSAGE, base_ids=[faulty.id]),
            # C4: cross-kind single base
            _draft(kind=VersionKind.EXAMPLE, definition="z", base_ids=[dsl.id]),
        ]:
            try:
                store.add_version(p, bad)
                raise AssertionError(f"accepted {bad}")
            except ConstraintViolation:
                pass

        # C2/C3 satisfied: a repair version is accepted
        repair = store.add_version(p, _draft(input_format=InputFormat.ERROR_MESSAGE,
                                             base_ids=[faulty.id]))
        assert repair.base_ids == (faulty.id,)
        # C4: the occupied base rejects a second same-kind successor
        ext = store.add_version(p, _draft(base_ids=[dsl.id]))
        try:
            store.add_version(p, _draft(base_ids=[dsl.id]))
            raise AssertionError("C4 not enforced")
        except ConstraintViolation as exc:
            assert exc.constraint == "C4"
        assert ext.base_ids == (dsl.id,)

        assert time.monotonic() - start < 1.0


# ---------------------------------------------------------------------------
# Criterion 2: six hand-written DSLs plus a 15-case mutation suite


MUTATIONS = [
    # deleted token
    (COFFEE_MACHINE.replace("target=[State];", "target=[State]"), ErrorCategory.SYNTAX),
    (SCHOOL.replace("SchoolClass: 'class'", "SchoolClass 'class'"), ErrorCategory.SYNTAX),
    (CHESS.replace("'game'", "'game"), ErrorCategory.SYNTAX),
    # renamed rule reference
    (ROBOT.replace("Command: Move |", "Command: Mov |"), ErrorCategory.LINKING),
    (COFFEE_MACHINE.replace("[State];", "[Stat];"), ErrorCategory.LINKING),
    (ORIGAMI.replace("steps+=Step", "steps+=Stepp"), ErrorCategory.LINKING),
    # duplicated rule
    (SCHOOL + "Teacher: 'aide' name=ID;\n", ErrorCategory.INVALID_STATE),
    (INVENTORY + "Item: 'thing' name=STRING;\n", ErrorCategory.INVALID_STATE),
    (CHESS + "enum Piece: Extra='extra';\n", ErrorCategory.INVALID_STATE),
    # left recursion
    (ROBOT.replace("Command: Move | Turn | Repeat;",
                   "Command: Command | Turn | Repeat;"), ErrorCategory.INVALID_STATE),
    (INVENTORY + "Loop: Loop 'x' | 'y';\n", ErrorCategory.INVALID_STATE),
    # wrongly used boolean assignment / type conflicts
    (COFFEE_MACHINE.replace("event=Event", "event?=Event"), ErrorCategory.TRANSFORMATION),
    (SCHOOL.replace("teacher=[Teacher];", "teacher=[Teacher] teacher=ID;"),
     ErrorCategory.TRANSFORMATION),
    (ORIGAMI.replace("kind=FoldKind 'at'", "kind=FoldKind kind=INT 'at'"),
     ErrorCategory.TRANSFORMATION),
    (CHESS.replace("number=INT ':'", "number=INT number+=INT ':'"),
     ErrorCategory.TRANSFORMATION),
]


def _error_categories(text: str) -> set:
    ast = parse_grammar(text)
    if isinstance(ast, list):
        return {d.category for d in ast}
    return {d.category for d in validate_grammar(ast) if d.severity is Severity.ERROR}


def test_criterion_2_grammar_suite_and_mutations():
    with criterion(2, "six DSLs validate with expected meta-models; 15/15 mutations classified"):
        for name, (grammar, example, expected_features, enum_count) in SUITE.items():
            ast = parse_grammar(grammar)
            assert isinstance(ast, GrammarAst), name
            diags = validate_grammar(ast)
            assert not any(d.severity is Severity.ERROR for d in diags), name
            mm = derive_metamodel(ast)
            assert {c.name: len(c.features) for c in mm.classes} == expected_features, name
            assert len(mm.enums) == enum_count, name
            model = parse_instance(example, ast)
            assert isinstance(model, InstanceModel), (name, model)

        assert len(MUTATIONS) == 15
        hits = sum(expected in _error_categories(text) for text, expected in MUTATIONS)
        assert hits == 15, f"only {hits}/15 mutations produced the expected category"
        # every mutated grammar is faulty to begin with
        assert all(_error_categories(text) for text, _ in MUTATIONS)


# ---------------------------------------------------------------------------
# Criterion 3: chart parser vs brute-force language oracle


PILOT_1 = "grammar P\nS: 'a' items+=I* 'b';\nI: name=ID | num=INT;"
PILOT_2 = "grammar Q\nS: expr=E;\nE: '(' inner=E ')' | value=INT;"


def test_criterion_3_parser_agrees_with_oracle():
    with criterion(3, "full agreement with the brute-force oracle up to 6 tokens"):
        start = time.monotonic()
        for pilot in (PILOT_1, PILOT_2):
            ast = parse_grammar(pilot)
            assert isinstance(ast, GrammarAst)
            alphabet = alphabet_of(ast)
            assert len(alphabet) <= 4
            members = bounded_language(ast, 6)
            assert members, "oracle found no member strings"
            checked = accepted = 0
            for word in all_words(alphabet, 6):
                expected = word in members
                got = accepts(render(word), ast)
                assert got == expected, (pilot, word, expected, got)
                checked += 1
                accepted += expected
            assert 0 < accepted < checked  # both outcomes are exercised
            assert checked == sum(len(alphabet) ** n for n in range(7))
        assert time.monotonic() - start < 30.0


# ---------------------------------------------------------------------------
# Criterion 4: repair loop semantics


def test_criterion_4_repair_semantics(tmp_path):
    with criterion(4, "repair outcomes: fix-on-2, attempt caps, combined union"):
        # (a) fixed on the second attempt
        wb = make_workbench(tmp_path / "a", [
            {"answer": dsl_answer(FAULTY_TINY)},
            {"answer": dsl_answer(FAULTY_TINY, adjustment="a")},
            {"answer": dsl_answer(VALID_TINY, adjustment="b")},
        ])
        p = wb.store.create_project("a").id
        root = wb.process_version(p, ROOT_DSL, "desc")
        outcome = wb.repair(root, RepairMode.WITH_CONTEXT)
        assert outcome.fixed is True
        assert outcome.attempts_used == 2
        assert len(outcome.chain) == 3 and outcome.chain[0] == root.id

        # (b) never fixed: 4 attempts by default, 5 under the experiment cap
        wb = make_workbench(tmp_path / "b", [
            {"answer": dsl_answer(FAULTY_TINY, adjustment=str(i))} for i in range(12)
        ])
        p = wb.store.create_project("b").id
        root = wb.process_version(p, ROOT_DSL, "desc")
        default_outcome = wb.repair(root, RepairMode.WITH_CONTEXT)
        assert not default_outcome.fixed and default_outcome.attempts_used == 4
        assert len(default_outcome.chain) == 5
        capped = wb.repair(root, RepairMode.WITHOUT_CONTEXT, max_attempts=5)
        assert not capped.fixed and capped.attempts_used == 5
        assert len(capped.chain) == 6

        # (c) combined success rate is the union over versions: 3 of 4 = 0.75
        fix_plan = [("valid", "faulty"), ("valid", "valid"),
                    ("faulty", "valid"), ("faulty", "faulty")]
        entries = [{"answer": dsl_answer(FAULTY_TINY)} for _ in fix_plan]
        for with_ctx, without_ctx in fix_plan:
            for kind in (with_ctx, without_ctx):
                grammar = VALID_TINY if kind == "valid" else FAULTY_TINY
                entries.append({"answer": dsl_answer(grammar, adjustment="try")})
        wb = make_workbench(tmp_path / "c", entries)
        p = wb.store.create_project("c").id
        roots = [wb.process_version(p, ROOT_DSL, f"desc {i}") for i in range(4)]
        report = run_repair_experiment(wb, roots, max_attempts=1)
        stats = report.repair
        assert stats.faulty_count == 4
        assert stats.fixed_with == 2 and stats.fixed_without == 2
        assert stats.fixed_combined == 3
        assert stats.rate(stats.fixed_combined) == 0.75


# ---------------------------------------------------------------------------
# Criterion 5: planted generation/repair experiment with exact rates


FAULTY_VARIANTS = [
    f"grammar Broken{k}\nRoot: 'go{k}' name=ID\n" for k in range(5)
]

MAN_PLAN = [7, 7, 7, 7, 6, 6]                      # 40 of 72
LLM_PLAN = [0, 7, 7, 6, 6, 6, 6, 6, 6, 6, 6, 6]    # 68 of 144


def test_criterion_5_planted_experiment(tmp_path):
    with criterion(5, "planted 18x12 run reproduces the exact pinned rates"):
        start = time.monotonic()
        domains = [DomainDescription(f"man_{i}", MAN_MADE, f"man domain {i}")
                   for i in range(len(MAN_PLAN))]
        domains += [DomainDescription(f"llm_{i}", LLM_MADE, f"llm domain {i}")
                    for i in range(len(LLM_PLAN))]
        entries = []
        fault_counter = 0
        for successes in MAN_PLAN + LLM_PLAN:
            for s in range(12):
                if s < successes:
                    entries.append({"answer": dsl_answer(VALID_TINY)})
                else:
                    text = FAULTY_VARIANTS[fault_counter % 5]
                    text += "\n" * (fault_counter % 3) + " " * (fault_counter % 4)
                    entries.append({"answer": dsl_answer(text)})
                    fault_counter += 1
        wb = make_workbench(tmp_path, entries)
        p = wb.store.create_project("planted").id
        report = run_generation(wb, p, domains, samples_per_domain=12)

        assert sum(d.samples for d in report.per_domain) == 216
        assert report.overall_rate == 108 / 216 == 0.5
        assert report.origin_rate(MAN_MADE) == 40 / 72
        assert report.origin_rate(LLM_MADE) == 68 / 144
        all_fail = [d for d in report.per_domain if d.name == "llm_0"][0]
        assert all_fail.one_shot_rate == 0.0
        assert report.error_histogram == {"syntax": 108}
        assert report.distinct_faulty_grammars == 5

        # repair leg: 6 of 7 faulty versions fixed -> 0.857
        faulty = [v for v in wb.store.versions(p) if v.status is Status.FAULTY][:7]
        assert len(faulty) == 7
        repair_entries = []
        for i in range(7):
            grammar = VALID_TINY if i < 6 else FAULTY_TINY
            repair_entries.append({"answer": dsl_answer(grammar, adjustment="w")})
            repair_entries.append({"answer": dsl_answer(FAULTY_TINY, adjustment="o")})
        wb2 = Workbench(wb.store, Gateway(MockBackend(repair_entries)))
        repair_report = run_repair_experiment(wb2, faulty, max_attempts=1)
        stats = repair_report.repair
        assert (stats.faulty_count, stats.fixed_combined) == (7, 6)
        assert _fmt_rate(stats.rate(stats.fixed_combined)) == "0.857"

        # emitted report keeps the one fixed schema
        paths = emit_report(report, tmp_path / "out")
        assert {x.name for x in paths} == {"report.json", "rates.csv", "errors.csv"}
        data = json.loads((tmp_path / "out" / "report.json").read_text())
        assert set(data) == {"per_domain", "overall", "repair",
                             "error_histogram", "distinct_faulty_grammars"}
        assert set(data["per_domain"][0]) == {"name", "origin", "samples",
                                              "first_shot_successes", "aborted",
                                              "one_shot_rate"}
        assert data["overall"]["one_shot_rate"] == 0.5
        with (tmp_path / "out" / "rates.csv").open() as fh:
            rows = list(csv.reader(fh))
        assert len(rows) == 19
        by_name = {row[0]: row for row in rows[1:]}
        assert by_name["llm_0"][4] == "0.000"
        assert by_name["man_0"][4] == "0.583"

        assert time.monotonic() - start < 10.0


# ---------------------------------------------------------------------------
# Criterion 6: randomized store operations keep every graph invariant


def _random_draft(rng: random.Random, alive: list) -> VersionDraft:
    kind = rng.choice(list(VersionKind))
    input_format = rng.choice(list(InputFormat))
    status = Status.FAULTY if rng.random() < 0.4 else Status.VALID
    base_ids: tuple = ()
    derived_from = None
    if alive and rng.random() < 0.7:
        if input_format is InputFormat.ERROR_MESSAGE and rng.random() < 0.7:
            faulty = [v for v in alive if v.status is Status.FAULTY]
            pool = faulty or alive
            base_ids = (rng.choice(pool).id,)
        else:
            picks = rng.sample(alive, k=min(len(alive), rng.choice((1, 1, 1, 2))))
            base_ids = tuple(v.id for v in picks)
    if alive and rng.random() < 0.2:
        derived_from = rng.choice(alive).id
    return VersionDraft(
        kind=kind, input_format=input_format, input="in",
        definition=f"def {rng.randrange(1000)}", status=status,
        error_message="Syntax error at 1:1: x" if status is Status.FAULTY else None,
        base_ids=base_ids, with_context=bool(base_ids) and rng.random() < 0.3,
        derived_from=derived_from,
    )


def _check_graph(versions: list) -> None:
    by_id = {v.id: v for v in versions}
    # acyclic over base and trace edges
    state: dict = {}

    def visit(vid: str) -> None:
        if state.get(vid) == "done":
            return
        assert state.get(vid) != "open", "cycle in version graph"
        state[vid] = "open"
        v = by_id[vid]
        for nxt in list(v.base_ids) + ([v.derived_from] if v.derived_from else []):
            if nxt in by_id:
                visit(nxt)
        state[vid] = "done"

    for v in versions:
        visit(v.id)

    successors: dict = {v.id: [] for v in versions}
    for v in versions:
        assert (v.status is Status.FAULTY) == (v.error_message is not None)
        bases = [by_id[b] for b in v.base_ids if b in by_id]
        assert len(bases) == len(v.base_ids), "dangling base link"
        for b in bases:
            successors[b.id].append(v)
        if len(bases) > 1:  # C1
            assert v.kind is VersionKind.DSL
            assert all(b.kind is VersionKind.EXAMPLE for b in bases)
        if v.input_format is InputFormat.ERROR_MESSAGE:  # C2, C3
            assert len(bases) == 1
            assert bases[0].status is Status.FAULTY
            assert bases[0].kind is v.kind
        elif len(bases) == 1:  # C4 kind rule
            assert v.kind is bases[0].kind
        if v.derived_from is not None and v.derived_from in by_id:
            assert by_id[v.derived_from].kind is not v.kind
    for vid, succ in successors.items():  # C4 occupancy rule
        single_plain = [
            s for s in succ
            if len(s.base_ids) == 1 and s.input_format is not InputFormat.ERROR_MESSAGE
        ]
        assert len(single_plain) <= 1, "base holds two plain successors"


def test_criterion_6_randomized_graph_invariants(tmp_path):
    with criterion(6, "1000 random op sequences: constraints, acyclicity, byte-stable files"):
        store = ProjectStore(tmp_path / "store")
        rng = random.Random(20260823)
        accepted_total = 0
        for seq in range(1000):
            project = store.create_project(f"p{seq}")
            alive: list = []
            for _ in range(rng.randint(3, 7)):
                if alive and rng.random() < 0.15:
                    referenced = {b for v in alive for b in v.base_ids}
                    referenced |= {v.derived_from for v in alive if v.derived_from}
                    deletable = [v for v in alive if v.id not in referenced]
                    if deletable:
                        victim = rng.choice(deletable)
                        store.delete_version(project.id, victim.id)
                        alive.remove(victim)
                    continue
                draft = _random_draft(rng, alive)
                before = len(alive)
                try:
                    alive.append(store.add_version(project.id, draft))
                    accepted_total += 1
                except StoreError:
                    assert len(store.versions(project.id)) == before
            stored = store.versions(project.id)
            assert {v.id for v in stored} == {v.id for v in alive}
            _check_graph(stored)
            for v in stored:
                path = tmp_path / "store" / project.id / "versions" / f"{v.id}.json"
                raw = path.read_bytes()
                reloaded = Version.from_dict(json.loads(raw))
                assert reloaded == v
                again = json.dumps(reloaded.to_dict(), indent=2, sort_keys=True) + "\n"
                assert again.encode() == raw
        assert accepted_total > 2000, "too few accepted operations to be meaningful"


# ---------------------------------------------------------------------------
# Criterion 7: the end-to-end evolution walkthrough over the CLI


G1 = "grammar Origami\nTutorial: 'tutorial' name=ID steps+=Step*;\nStep: 'step' text=STRING;\n"
G2 = ("grammar Origami\nTutorial: 'tutorial' name=ID steps+=Step*;\n"
      "Step: 'step' text=STRING fold=Fold?;\nFold: 'fold' at=INT;\n")
G2_BROKEN = G2.replace("fold=Fold?", "fold=Brokenness?")
G2_STILL_BROKEN = G2.replace("at=INT", "at=MissingBit")
G3 = G2.replace("'tutorial'", "'pattern'").replace("'step'", "'phase'")

EXAMPLE_1 = 'tutorial crane step "base fold" fold 1'
EXAMPLE_2 = 'tutorial hat step "brim" fold 2'


def test_criterion_7_evolution_walkthrough(tmp_path, capsys):
    from dslforge.cli import run

    with criterion(7, "CLI walkthrough: 9 versions created, 8 alive, 2 repair nodes, 1 trace"):
        transcript = [
            {"match": "ALPHA-ROOT", "answer": dsl_answer(G1, name="Origami")},
            {"match": "BETA-EXTEND", "answer": dsl_answer(G2)},
            {"match": "GAMMA-REEXTEND", "answer": dsl_answer(G2)},
            {"match": "Brokenness", "answer": dsl_answer(G2_STILL_BROKEN, adjustment="renamed")},
            {"match": "MissingBit", "answer": dsl_answer(G2, adjustment="restored INT")},
            {"match": "DELTA-EXAMPLE", "answer": example_answer(EXAMPLE_1)},
            {"match": "EPSILON-SYNTAX", "answer": dsl_answer(G3)},
        ]
        transcript_path = tmp_path / "transcript.json"
        transcript_path.write_text(json.dumps(transcript))
        store_dir = tmp_path / "store"

        def cli(*args: str) -> int:
            return run(["--store", str(store_dir),
                        "--backend", f"mock:{transcript_path}", *args])

        def out_json():
            return json.loads(capsys.readouterr().out)

        def write(name: str, content: str) -> str:
            path = tmp_path / name
            path.write_text(content)
            return str(path)

        created: list[str] = []

        # 1. a project and a root DSL from properties
        assert cli("new", "origami") == 0
        project_id = capsys.readouterr().out.strip()
        assert cli("create", "--project", project_id, "--kind", "dsl",
                   "--file", write("p1.txt", "ALPHA-ROOT folding tutorials")) == 0
        v1 = out_json()
        created.append(v1["id"])
        assert v1["status"] == "valid"

        # 2. extend it in the same conversation
        assert cli("create", "--project", project_id, "--kind", "dsl",
                   "--base", v1["id"], "--context",
                   "--file", write("p2.txt", "BETA-EXTEND add fold positions")) == 0
        v2 = out_json()
        created.append(v2["id"])
        assert v2["base_ids"] == [v1["id"]] and v2["with_context"]

        # 3. discard the extension and branch again from the root
        assert cli("delete", v2["id"]) == 0
        assert cli("create", "--project", project_id, "--kind", "dsl",
                   "--base", v1["id"], "--context",
                   "--file", write("p3.txt", "GAMMA-REEXTEND add fold positions")) == 0
        v2b = out_json()
        created.append(v2b["id"])
        assert v2b["status"] == "valid"

        # 4. a manual edit that breaks the grammar
        assert cli("create", "--project", project_id, "--kind", "dsl", "--manual",
                   "--base", v2b["id"], "--file", write("broken.gdl", G2_BROKEN)) == 1
        v3 = out_json()
        created.append(v3["id"])
        assert v3["status"] == "faulty" and "Brokenness" in v3["error_message"]

        # 5. automatic repair, two attempts
        assert cli("repair", v3["id"], "--mode", "with", "--attempts", "4") == 0
        outcome = out_json()
        assert outcome["fixed"] is True and outcome["attempts_used"] == 2
        assert outcome["chain"][0] == v3["id"]
        repair_nodes = outcome["chain"][1:]
        created.extend(repair_nodes)
        assert len(repair_nodes) == 2
        r2 = repair_nodes[-1]

        # 6. an example for the repaired grammar
        assert cli("create", "--project", project_id, "--kind", "example",
                   "--base", r2,
                   "--file", write("ex.txt", "DELTA-EXAMPLE a crane tutorial")) == 0
        e1 = out_json()
        created.append(e1["id"])
        assert e1["status"] == "valid"
        assert e1["derived_from"] == r2

        # 7. a syntax overhaul on top of the repaired grammar
        assert cli("create", "--project", project_id, "--kind", "dsl",
                   "--base", r2, "--context",
                   "--file", write("p4.txt", "EPSILON-SYNTAX wordier keywords")) == 0
        v4 = out_json()
        created.append(v4["id"])
        assert v4["status"] == "valid"

        # 8. a hand-written example following the first one
        assert cli("create", "--project", project_id, "--kind", "example", "--manual",
                   "--base", e1["id"], "--file", write("hat.txt", EXAMPLE_2)) == 0
        e2 = out_json()
        created.append(e2["id"])
        assert e2["status"] == "valid"

        # the walkthrough created 9 versions, one of which was deleted
        assert len(created) == len(set(created)) == 9
        store = ProjectStore(store_dir)
        alive = store.versions(project_id)
        assert len(alive) == 8
        assert {v.id for v in alive} == set(created) - {v2["id"]}
        by_id = {v.id: v for v in alive}
        chain_nodes = [v for v in alive if v.input_format is InputFormat.ERROR_MESSAGE]
        assert {v.id for v in chain_nodes} == set(repair_nodes)
        traced = [v for v in alive if v.derived_from is not None]
        assert [v.id for v in traced] == [e1["id"]]
        assert by_id[r2].status is Status.VALID
        assert by_id[v4["id"]].base_ids == (r2,)
        assert by_id[e2["id"]].base_ids == (e1["id"],)
        # lineage spine from the overhaul back to the root
        spine = [v.id for v in store.lineage(project_id, v4["id"])]
        assert spine == [v1["id"], v2b["id"], v3["id"], repair_nodes[0], r2, v4["id"]]
