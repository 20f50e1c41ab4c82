/** Single-page view: version DAG, detail panel, prompt form, manual editor.
 *
 * All authoritative state lives on the server; every mutation is followed by
 * a full refetch, so a page reload reproduces the same view. The DOM is
 * plain HTML/SVG, no framework.
 */

import { ApiClient, ApiError } from "./api.js";
import {
  ConfigurationCatalog,
  PromptFormState,
  shortId,
  submissionBlocker,
  toCreateBody,
} from "./forms.js";
import { layoutDag } from "./graph.js";
import type { BaseMode, InputFormat, Version, VersionKind } from "./types.js";

const SVG_NS = "http://www.w3.org/2000/svg";

export class App {
  catalog: ConfigurationCatalog | null = null;
  versions: Version[] = [];
  projectId: string | null = null;
  selectedId: string | null = null;
  private lastAction: Promise<void> = Promise.resolve();

  constructor(
    private readonly root: HTMLElement,
    readonly api: ApiClient,
  ) {
    this.root.innerHTML = TEMPLATE;
    this.wire();
  }

  /** Resolves once the most recently triggered handler has settled. */
  whenIdle(): Promise<void> {
    return this.lastAction;
  }

  async open(projectId: string): Promise<void> {
    this.projectId = projectId;
    if (!this.catalog) {
      this.catalog = new ConfigurationCatalog(await this.api.configurations());
    }
    await this.refresh();
    this.renderFormOptions();
  }

  async refresh(): Promise<void> {
    if (!this.projectId) return;
    this.versions = await this.api.listVersions(this.projectId);
    this.renderDag();
    this.renderBasePicker();
    this.renderDetail();
  }

  private wire(): void {
    this.query("#prompt-form").addEventListener("submit", (event) => {
      event.preventDefault();
      this.track(this.submitPrompt());
    });
    this.query("#manual-form").addEventListener("submit", (event) => {
      event.preventDefault();
      this.track(this.submitManual());
    });
    this.query("#repair-button").addEventListener("click", () => {
      this.track(this.repairSelected());
    });
    this.query("#delete-button").addEventListener("click", () => {
      this.track(this.deleteSelected());
    });
    const kind = this.query<HTMLSelectElement>("#form-kind");
    const format = this.query<HTMLSelectElement>("#form-format");
    kind.addEventListener("change", () => this.renderFormOptions());
    format.addEventListener("change", () => this.renderModeOptions());
  }

  private track(action: Promise<void>): void {
    this.lastAction = action.catch((err) => {
      this.setFormError(describe(err));
    });
  }

  // ---- prompt form ----

  readForm(): PromptFormState {
    const selected = [...this.query<HTMLSelectElement>("#form-bases").selectedOptions];
    return {
      kind: this.query<HTMLSelectElement>("#form-kind").value as VersionKind,
      inputFormat: this.query<HTMLSelectElement>("#form-format").value as InputFormat,
      baseMode: this.query<HTMLSelectElement>("#form-mode").value as BaseMode,
      baseIds: selected.map((o) => o.value),
      payload: this.query<HTMLTextAreaElement>("#form-payload").value,
    };
  }

  async submitPrompt(): Promise<void> {
    if (!this.projectId || !this.catalog) return;
    const form = this.readForm();
    const blocker = submissionBlocker(form, this.catalog, this.versions);
    if (blocker) {
      this.setFormError(blocker);
      return;
    }
    this.setFormError("");
    try {
      await this.api.createVersion(this.projectId, toCreateBody(form));
    } catch (err) {
      this.setFormError(describe(err));
      return;
    }
    this.query<HTMLTextAreaElement>("#form-payload").value = "";
    await this.refresh();
  }

  async submitManual(): Promise<void> {
    if (!this.projectId) return;
    const definition = this.query<HTMLTextAreaElement>("#manual-definition").value;
    const kind = this.query<HTMLSelectElement>("#manual-kind").value as VersionKind;
    const baseId = this.query<HTMLSelectElement>("#manual-base").value;
    try {
      await this.api.createVersion(this.projectId, {
        kind,
        definition,
        base_ids: baseId ? [baseId] : [],
      });
    } catch (err) {
      this.setFormError(describe(err));
      return;
    }
    await this.refresh();
  }

  // ---- detail actions ----

  selectVersion(id: string | null): void {
    this.selectedId = id;
    this.renderDag();
    this.renderDetail();
  }

  selected(): Version | null {
    return this.versions.find((v) => v.id === this.selectedId) ?? null;
  }

  async repairSelected(): Promise<void> {
    const version = this.selected();
    if (!version || version.status !== "faulty") return;
    const outcome = await this.api.repair(version.id, "with");
    await this.refresh();
    this.query("#repair-result").textContent = outcome.fixed
      ? `repaired in ${outcome.attempts_used} attempt${outcome.attempts_used === 1 ? "" : "s"} (chain of ${outcome.chain.length})`
      : `not fixed after ${outcome.attempts_used} attempts`;
  }

  async deleteSelected(): Promise<void> {
    const version = this.selected();
    if (!version) return;
    await this.api.deleteVersion(version.id);
    this.selectedId = null;
    await this.refresh();
  }

  // ---- rendering ----

  private renderDag(): void {
    const host = this.query("#dag");
    host.innerHTML = "";
    if (this.versions.length === 0) {
      const empty = document.createElement("p");
      empty.className = "empty-state";
      empty.textContent = "No versions yet. Submit a prompt to create the root version.";
      host.appendChild(empty);
      return;
    }
    const layout = layoutDag(this.versions);
    const svg = document.createElementNS(SVG_NS, "svg");
    svg.setAttribute("width", String(layout.width));
    svg.setAttribute("height", String(layout.height));
    const position = new Map(layout.nodes.map((n) => [n.id, n]));
    for (const edge of layout.edges) {
      const from = position.get(edge.from)!;
      const to = position.get(edge.to)!;
      const line = document.createElementNS(SVG_NS, "line");
      line.setAttribute("x1", String(from.x));
      line.setAttribute("y1", String(from.y));
      line.setAttribute("x2", String(to.x));
      line.setAttribute("y2", String(to.y));
      line.setAttribute("class", `edge edge-${edge.kind}`);
      if (edge.kind === "trace") line.setAttribute("stroke-dasharray", "6 4");
      svg.appendChild(line);
    }
    for (const node of layout.nodes) {
      const group = document.createElementNS(SVG_NS, "g");
      const classes = ["node", `kind-${node.version.kind}`, `status-${node.version.status}`];
      if (node.id === this.selectedId) classes.push("selected");
      group.setAttribute("class", classes.join(" "));
      group.setAttribute("data-id", node.id);
      group.setAttribute("transform", `translate(${node.x}, ${node.y})`);
      const shape = document.createElementNS(SVG_NS, node.version.kind === "dsl" ? "rect" : "circle");
      if (shape.tagName === "rect") {
        shape.setAttribute("x", "-55");
        shape.setAttribute("y", "-22");
        shape.setAttribute("width", "110");
        shape.setAttribute("height", "44");
        shape.setAttribute("rx", "8");
      } else {
        shape.setAttribute("r", "26");
      }
      group.appendChild(shape);
      const label = document.createElementNS(SVG_NS, "text");
      label.setAttribute("text-anchor", "middle");
      label.setAttribute("dy", "4");
      label.textContent = node.version.name ?? shortId(node.id);
      group.appendChild(label);
      if (node.version.status === "faulty") {
        const badge = document.createElementNS(SVG_NS, "text");
        badge.setAttribute("class", "error-badge");
        badge.setAttribute("x", "48");
        badge.setAttribute("y", "-18");
        badge.textContent = "!";
        group.appendChild(badge);
      }
      group.addEventListener("click", () => this.selectVersion(node.id));
      svg.appendChild(group);
    }
    host.appendChild(svg);
  }

  private renderDetail(): void {
    const version = this.selected();
    const panel = this.query("#detail");
    const repairButton = this.query<HTMLButtonElement>("#repair-button");
    const deleteButton = this.query<HTMLButtonElement>("#delete-button");
    if (!version) {
      panel.classList.add("hidden");
      repairButton.disabled = true;
      deleteButton.disabled = true;
      return;
    }
    panel.classList.remove("hidden");
    this.query("#detail-title").textContent =
      `${version.kind} ${shortId(version.id)} (${version.status})`;
    this.query<HTMLTextAreaElement>("#detail-definition").value = version.definition;
    const diag = this.query("#detail-error");
    diag.textContent = version.error_message ?? "";
    diag.classList.toggle("hidden", version.error_message === null);
    repairButton.disabled = version.status !== "faulty";
    deleteButton.disabled = false;
  }

  private renderFormOptions(): void {
    if (!this.catalog) return;
    const kind = this.query<HTMLSelectElement>("#form-kind").value as VersionKind;
    const formatSelect = this.query<HTMLSelectElement>("#form-format");
    fillOptions(formatSelect, this.catalog.formatsFor(kind));
    this.renderModeOptions();
  }

  private renderModeOptions(): void {
    if (!this.catalog) return;
    const kind = this.query<HTMLSelectElement>("#form-kind").value as VersionKind;
    const format = this.query<HTMLSelectElement>("#form-format").value as InputFormat;
    fillOptions(this.query<HTMLSelectElement>("#form-mode"), this.catalog.modesFor(kind, format));
  }

  private renderBasePicker(): void {
    for (const id of ["#form-bases", "#manual-base"]) {
      const select = this.query<HTMLSelectElement>(id);
      const keep = new Set(
        [...select.selectedOptions].map((o) => o.value).filter((v) => v !== ""),
      );
      select.innerHTML = "";
      if (id === "#manual-base") {
        const none = document.createElement("option");
        none.value = "";
        none.textContent = "(no base)";
        select.appendChild(none);
      }
      for (const version of this.versions) {
        const option = document.createElement("option");
        option.value = version.id;
        option.textContent = `${version.kind} ${version.name ?? shortId(version.id)} (${version.status})`;
        option.selected = keep.has(version.id);
        select.appendChild(option);
      }
    }
  }

  setFormError(message: string): void {
    const slot = this.query("#form-error");
    slot.textContent = message;
    slot.classList.toggle("hidden", message === "");
  }

  private query<T extends HTMLElement = HTMLElement>(selector: string): T {
    const found = this.root.querySelector<T>(selector);
    if (!found) throw new Error(`missing element ${selector}`);
    return found;
  }
}

function fillOptions(select: HTMLSelectElement, values: string[]): void {
  const previous = select.value;
  const chosen = values.includes(previous) ? previous : values[0];
  select.innerHTML = "";
  for (const value of values) {
    const option = document.createElement("option");
    option.value = value;
    option.textContent = value.replace(/_/g, " ");
    option.selected = value === chosen;
    select.appendChild(option);
  }
  if (chosen !== undefined) select.value = chosen;
}

function describe(err: unknown): string {
  if (err instanceof ApiError) return `${err.code}: ${err.message}`;
  return err instanceof Error ? err.message : String(err);
}

const TEMPLATE = `
<div class="layout">
  <section class="dag-panel">
    <div id="dag" class="dag"></div>
  </section>
  <aside class="side-panel">
    <section id="detail" class="detail hidden">
      <h2 id="detail-title"></h2>
      <pre id="detail-error" class="diagnostics hidden"></pre>
      <textarea id="detail-definition" readonly rows="10"></textarea>
      <div class="actions">
        <button id="repair-button" type="button" disabled>Repair</button>
        <button id="delete-button" type="button" disabled>Delete</button>
      </div>
      <p id="repair-result"></p>
    </section>
    <form id="prompt-form">
      <h2>New version from prompt</h2>
      <label>Kind
        <select id="form-kind">
          <option value="dsl">dsl</option>
          <option value="example">example</option>
        </select>
      </label>
      <label>Input format <select id="form-format"></select></label>
      <label>Base mode <select id="form-mode"></select></label>
      <label>Bases <select id="form-bases" multiple size="4"></select></label>
      <label>Prompt input <textarea id="form-payload" rows="4"></textarea></label>
      <p id="form-error" class="form-error hidden"></p>
      <button type="submit">Submit</button>
    </form>
    <form id="manual-form">
      <h2>Manual version</h2>
      <label>Kind
        <select id="manual-kind">
          <option value="dsl">dsl</option>
          <option value="example">example</option>
        </select>
      </label>
      <label>Base <select id="manual-base"></select></label>
      <label>Definition <textarea id="manual-definition" rows="6"></textarea></label>
      <button type="submit">Create</button>
    </form>
  </aside>
</div>
`;
