import { describe, expect, it } from "vitest";

import { inDegree, layoutDag, successorIds } from "../src/graph.js";
import type { Version } from "../src/types.js";

let counter = 0;

function version(partial: Partial<Version>): Version {
  counter += 1;
  return {
    id: `v${counter}`,
    project_id: "p1",
    kind: "dsl",
    input_format: null,
    input: null,
    base_ids: [],
    with_context: false,
    definition: "grammar G\nR: name=ID;\n",
    status: "valid",
    error_message: null,
    thread_id: null,
    derived_from: null,
    name: null,
    description: null,
    created_at: `2026-08-23T00:00:${String(counter).padStart(2, "0")}+00:00`,
    ...partial,
  };
}

describe("layoutDag", () => {
  it("lays out a chain of three as three layers with two base edges", () => {
    const a = version({});
    const b = version({ base_ids: [a.id] });
    const c = version({ base_ids: [b.id] });
    const layout = layoutDag([a, b, c]);
    expect(layout.nodes).toHaveLength(3);
    expect(layout.edges).toHaveLength(2);
    expect(layout.edges.every((e) => e.kind === "base")).toBe(true);
    const layers = new Map(layout.nodes.map((n) => [n.id, n.layer]));
    expect(layers.get(a.id)).toBe(0);
    expect(layers.get(b.id)).toBe(1);
    expect(layers.get(c.id)).toBe(2);
  });

  it("gives a generalization with two example bases in-degree 2", () => {
    const e1 = version({ kind: "example", definition: "x" });
    const e2 = version({ kind: "example", definition: "y" });
    const g = version({ base_ids: [e1.id, e2.id] });
    const layout = layoutDag([e1, e2, g]);
    expect(inDegree(layout, g.id)).toBe(2);
    const node = layout.nodes.find((n) => n.id === g.id)!;
    expect(node.layer).toBe(1);
  });

  it("renders derived_from as a dashed trace edge, not a base edge", () => {
    const g = version({});
    const x = version({ kind: "example", definition: "x", derived_from: g.id });
    const layout = layoutDag([g, x]);
    expect(layout.edges).toEqual([{ from: g.id, to: x.id, kind: "trace" }]);
    expect(inDegree(layout, x.id)).toBe(0);
    expect(layout.nodes.find((n) => n.id === x.id)!.layer).toBe(1);
  });

  it("uses the deepest parent for the layer", () => {
    const a = version({});
    const b = version({ base_ids: [a.id] });
    const e = version({ kind: "example", definition: "x" });
    const g = version({ base_ids: [e.id, e.id] });
    const deep = version({ base_ids: [b.id] });
    const merged = version({ base_ids: [] , derived_from: deep.id });
    const layout = layoutDag([a, b, e, g, deep, merged]);
    const layers = new Map(layout.nodes.map((n) => [n.id, n.layer]));
    expect(layers.get(deep.id)).toBe(2);
    expect(layers.get(merged.id)).toBe(3);
  });

  it("keeps siblings on the same layer in distinct columns", () => {
    const a = version({});
    const b = version({ base_ids: [a.id] });
    const c = version({ base_ids: [a.id], input_format: "error_message" });
    const layout = layoutDag([a, b, c]);
    const nodes = layout.nodes.filter((n) => n.layer === 1);
    expect(nodes).toHaveLength(2);
    expect(new Set(nodes.map((n) => n.column)).size).toBe(2);
    expect(nodes[0].x).not.toBe(nodes[1].x);
  });

  it("handles an empty version list", () => {
    const layout = layoutDag([]);
    expect(layout.nodes).toEqual([]);
    expect(layout.edges).toEqual([]);
  });

  it("ignores edges to versions outside the list", () => {
    const orphan = version({ base_ids: ["gone"], derived_from: "also-gone" });
    const layout = layoutDag([orphan]);
    expect(layout.edges).toEqual([]);
    expect(layout.nodes[0].layer).toBe(0);
  });
});

describe("successorIds", () => {
  it("lists only base successors", () => {
    const a = version({});
    const b = version({ base_ids: [a.id] });
    const t = version({ kind: "example", definition: "x", derived_from: a.id });
    expect(successorIds([a, b, t], a.id)).toEqual([b.id]);
    expect(successorIds([a, b, t], b.id)).toEqual([]);
  });
});
