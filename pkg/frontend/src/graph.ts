/** Version-DAG layout: topological layering with stable column ordering.
 *
 * Nodes are versions; solid edges are base links, dashed edges are
 * derived_from traces. Layout is deterministic for a given version list so
 * the view is stable across refreshes.
 */

import type { Version } from "./types.js";

export interface DagNode {
  id: string;
  version: Version;
  layer: number;
  column: number;
  x: number;
  y: number;
}

export interface DagEdge {
  from: string;
  to: string;
  kind: "base" | "trace";
}

export interface DagLayout {
  nodes: DagNode[];
  edges: DagEdge[];
  width: number;
  height: number;
}

export const NODE_SPACING_X = 180;
export const NODE_SPACING_Y = 110;

function parentIds(version: Version): string[] {
  const parents = [...version.base_ids];
  if (version.derived_from) parents.push(version.derived_from);
  return parents;
}

/** Longest-path layering: a node sits one layer below its deepest parent. */
export function layoutDag(versions: Version[]): DagLayout {
  const byId = new Map(versions.map((v) => [v.id, v]));
  const layers = new Map<string, number>();

  const layerOf = (id: string, seen: Set<string>): number => {
    const cached = layers.get(id);
    if (cached !== undefined) return cached;
    if (seen.has(id)) throw new Error(`cycle through version ${id}`);
    seen.add(id);
    const version = byId.get(id);
    if (!version) return -1; // dangling parent (filtered view), treat as a root
    let layer = 0;
    for (const parent of parentIds(version)) {
      if (byId.has(parent)) layer = Math.max(layer, layerOf(parent, seen) + 1);
    }
    seen.delete(id);
    layers.set(id, layer);
    return layer;
  };
  for (const v of versions) layerOf(v.id, new Set());

  const columns = new Map<number, number>();
  const nodes: DagNode[] = [];
  const ordered = [...versions].sort(
    (a, b) => a.created_at.localeCompare(b.created_at) || a.id.localeCompare(b.id),
  );
  for (const version of ordered) {
    const layer = layers.get(version.id) ?? 0;
    const column = columns.get(layer) ?? 0;
    columns.set(layer, column + 1);
    nodes.push({
      id: version.id,
      version,
      layer,
      column,
      x: column * NODE_SPACING_X + NODE_SPACING_X / 2,
      y: layer * NODE_SPACING_Y + NODE_SPACING_Y / 2,
    });
  }

  const edges: DagEdge[] = [];
  for (const version of ordered) {
    for (const base of version.base_ids) {
      if (byId.has(base)) edges.push({ from: base, to: version.id, kind: "base" });
    }
    if (version.derived_from && byId.has(version.derived_from)) {
      edges.push({ from: version.derived_from, to: version.id, kind: "trace" });
    }
  }

  const maxColumn = Math.max(0, ...[...columns.values()]);
  const maxLayer = Math.max(0, ...[...layers.values()].map((l) => l + 1));
  return {
    nodes,
    edges,
    width: Math.max(1, maxColumn) * NODE_SPACING_X,
    height: Math.max(1, maxLayer) * NODE_SPACING_Y,
  };
}

/** Number of base edges pointing at a version (trace edges excluded). */
export function inDegree(layout: DagLayout, id: string): number {
  return layout.edges.filter((e) => e.to === id && e.kind === "base").length;
}

/** Ids of live versions that list `id` among their bases. */
export function successorIds(versions: Version[], id: string): string[] {
  return versions.filter((v) => v.base_ids.includes(id)).map((v) => v.id);
}
