/** Browser entry point: pick the first project (creating one if needed) and
 * mount the app. The API base URL comes from ?api=... or same-origin. */

import { ApiClient } from "./api.js";
import { App } from "./app.js";

async function boot(): Promise<void> {
  const params = new URLSearchParams(window.location.search);
  const api = new ApiClient(params.get("api") ?? "");
  const root = document.getElementById("app");
  if (!root) throw new Error("missing #app mount point");
  const app = new App(root, api);
  const projects = await api.listProjects();
  const project = projects[0] ?? (await api.createProject("workbench"));
  await app.open(project.id);
}

boot().catch((err) => {
  const root = document.getElementById("app");
  if (root) root.textContent = `failed to start: ${err instanceof Error ? err.message : err}`;
});
