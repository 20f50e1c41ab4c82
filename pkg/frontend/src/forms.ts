/** Prompt-form state and client-side submission checks.
 *
 * The set of valid configurations is always the one served by GET
 * /configurations, never hardcoded: the form can only offer and submit
 * triples present in that list. On top of configuration validity the form
 * blocks one graph constraint client-side: extending a version that already
 * has successors (the single-base no-successors rule), because that mistake
 * is cheap to catch before a round trip. All other graph constraints are
 * left to the server and surfaced inline from its error response.
 */

import { successorIds } from "./graph.js";
import type {
  BaseMode,
  Configuration,
  CreateVersionBody,
  InputFormat,
  Version,
  VersionKind,
} from "./types.js";

export interface PromptFormState {
  kind: VersionKind;
  inputFormat: InputFormat;
  baseMode: BaseMode;
  baseIds: string[];
  payload: string;
  supplementalDefinition?: string;
}

export class ConfigurationCatalog {
  private readonly keys: Set<string>;

  constructor(public readonly configurations: Configuration[]) {
    this.keys = new Set(configurations.map((c) => keyOf(c.kind, c.input_format, c.base_mode)));
  }

  isValid(kind: VersionKind, inputFormat: InputFormat, baseMode: BaseMode): boolean {
    return this.keys.has(keyOf(kind, inputFormat, baseMode));
  }

  /** Input formats that form at least one valid triple with the kind. */
  formatsFor(kind: VersionKind): InputFormat[] {
    const seen: InputFormat[] = [];
    for (const c of this.configurations) {
      if (c.kind === kind && !seen.includes(c.input_format)) seen.push(c.input_format);
    }
    return seen;
  }

  /** Base modes valid for the (kind, format) pair, in catalog order. */
  modesFor(kind: VersionKind, inputFormat: InputFormat): BaseMode[] {
    const seen: BaseMode[] = [];
    for (const c of this.configurations) {
      if (c.kind === kind && c.input_format === inputFormat && !seen.includes(c.base_mode)) {
        seen.push(c.base_mode);
      }
    }
    return seen;
  }
}

function keyOf(kind: string, inputFormat: string, baseMode: string): string {
  return `${kind}/${inputFormat}/${baseMode}`;
}

/** Reason the form must not be submitted, or null when it may go out. */
export function submissionBlocker(
  form: PromptFormState,
  catalog: ConfigurationCatalog,
  versions: Version[],
): string | null {
  if (!catalog.isValid(form.kind, form.inputFormat, form.baseMode)) {
    return `${form.kind} from ${form.inputFormat} (${form.baseMode.replace(/_/g, " ")}) is not a valid configuration`;
  }
  if (!form.payload.trim()) {
    return "the prompt input is empty";
  }
  const byId = new Map(versions.map((v) => [v.id, v]));
  for (const id of form.baseIds) {
    if (!byId.has(id)) return `unknown base version ${id}`;
  }
  if (form.baseMode === "none") {
    if (form.baseIds.length === 1) {
      return blockSameKindExtension(form, byId.get(form.baseIds[0])!, versions);
    }
    return null; // no base, or a multi-base generalization: server checks the rest
  }
  if (form.baseIds.length !== 1) {
    return "this configuration needs exactly one base version";
  }
  return blockSameKindExtension(form, byId.get(form.baseIds[0])!, versions);
}

function blockSameKindExtension(
  form: PromptFormState,
  base: Version,
  versions: Version[],
): string | null {
  if (form.inputFormat === "error_message" || base.kind !== form.kind) {
    return null; // repair chains and cross-kind traces may share a base
  }
  const successors = successorIds(versions, base.id);
  if (successors.length > 0) {
    return `version ${shortId(base.id)} already has ${successors.length} successor${successors.length === 1 ? "" : "s"}; extend a leaf or delete the successors first`;
  }
  return null;
}

export function toCreateBody(form: PromptFormState): CreateVersionBody {
  const body: CreateVersionBody = {
    kind: form.kind,
    payload: form.payload,
    input_format: form.inputFormat,
    base_mode: form.baseMode,
    base_ids: form.baseIds,
  };
  if (form.supplementalDefinition) body.supplemental_definition = form.supplementalDefinition;
  return body;
}

export function shortId(id: string): string {
  return id.slice(0, 8);
}
