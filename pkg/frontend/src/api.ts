/** Thin fetch-based client for the dslforge REST API.
 *
 * Every non-2xx response carries `{code, message}`; that pair is surfaced
 * as an ApiError so the view layer can map codes to inline messages.
 */

import type {
  CombinedRepairOutcome,
  Configuration,
  CreateVersionBody,
  Project,
  RepairOutcome,
  ValidateResult,
  Version,
} from "./types.js";

export class ApiError extends Error {
  constructor(
    public readonly status: number,
    public readonly code: string,
    message: string,
  ) {
    super(message);
    this.name = "ApiError";
  }
}

export class ApiClient {
  constructor(private readonly baseUrl: string = "") {}

  private async request<T>(method: string, path: string, body?: unknown): Promise<T> {
    const init: RequestInit = { method, headers: { "Content-Type": "application/json" } };
    if (body !== undefined) init.body = JSON.stringify(body);
    const response = await fetch(this.baseUrl + path, init);
    if (response.status === 204) return undefined as T;
    if (!response.ok) {
      let code = "ERROR";
      let message = response.statusText;
      try {
        const data = await response.json();
        code = data.code ?? code;
        message = data.message ?? message;
      } catch {
        // non-JSON error body, keep the status text
      }
      throw new ApiError(response.status, code, message);
    }
    return (await response.json()) as T;
  }

  configurations(): Promise<Configuration[]> {
    return this.request("GET", "/configurations");
  }

  listProjects(): Promise<Project[]> {
    return this.request("GET", "/projects");
  }

  createProject(name: string): Promise<Project> {
    return this.request("POST", "/projects", { name });
  }

  getProject(projectId: string): Promise<Project> {
    return this.request("GET", `/projects/${projectId}`);
  }

  listVersions(projectId: string): Promise<Version[]> {
    return this.request("GET", `/projects/${projectId}/versions`);
  }

  createVersion(projectId: string, body: CreateVersionBody): Promise<Version> {
    return this.request("POST", `/projects/${projectId}/versions`, body);
  }

  getVersion(versionId: string): Promise<Version> {
    return this.request("GET", `/versions/${versionId}`);
  }

  deleteVersion(versionId: string): Promise<void> {
    return this.request("DELETE", `/versions/${versionId}`);
  }

  repair(versionId: string, mode: "with" | "without", attempts = 4): Promise<RepairOutcome> {
    return this.request("POST", `/versions/${versionId}/repair`, { mode, attempts });
  }

  repairCombined(versionId: string, attempts = 4): Promise<CombinedRepairOutcome> {
    return this.request("POST", `/versions/${versionId}/repair`, { mode: "combined", attempts });
  }

  metamodel(versionId: string): Promise<{ metamodel: unknown; text: string }> {
    return this.request("GET", `/versions/${versionId}/metamodel`);
  }

  lineage(versionId: string): Promise<Version[]> {
    return this.request("GET", `/versions/${versionId}/lineage`);
  }

  validate(grammar: string, example?: string): Promise<ValidateResult> {
    const body: Record<string, string> = { grammar };
    if (example !== undefined) body.example = example;
    return this.request("POST", "/validate", body);
  }
}
