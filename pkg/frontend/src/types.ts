/** Wire types mirroring the REST API's JSON bodies. */

export type VersionKind = "dsl" | "example";
export type InputFormat = "definition" | "properties" | "error_message";
export type BaseMode = "none" | "base_without_context" | "base_with_context";
export type Status = "valid" | "faulty";

export interface Configuration {
  kind: VersionKind;
  input_format: InputFormat;
  base_mode: BaseMode;
}

export interface Project {
  id: string;
  name: string;
  created_at: string;
}

export interface Version {
  id: string;
  project_id: string;
  kind: VersionKind;
  input_format: InputFormat | null;
  input: string | string[] | null;
  base_ids: string[];
  with_context: boolean;
  definition: string;
  status: Status;
  error_message: string | null;
  thread_id: string | null;
  derived_from: string | null;
  name: string | null;
  description: string | null;
  created_at: string;
}

export interface RepairOutcome {
  fixed: boolean;
  attempts_used: number;
  chain: string[];
  mode: string;
}

export interface CombinedRepairOutcome {
  with: RepairOutcome;
  without: RepairOutcome;
  fixed_any: boolean;
}

export interface Diagnostic {
  category: string;
  severity: string;
  line: number;
  column: number;
  message: string;
}

export interface ValidateResult {
  valid: boolean;
  diagnostics: Diagnostic[];
  example?: { parsed: boolean; diagnostics?: Diagnostic[]; model?: unknown };
}

export interface CreateVersionBody {
  kind: VersionKind;
  payload?: string | string[];
  input_format?: InputFormat;
  base_mode?: BaseMode;
  base_ids?: string[];
  supplemental_definition?: string;
  definition?: string;
  derived_from?: string;
  name?: string;
}
