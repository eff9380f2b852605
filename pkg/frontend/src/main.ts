import { defaultBaseUrl, HttpDuelApi } from "./api";
import {
  type Bounds,
  defaultBounds,
  presentationDimension,
} from "./presentation";
import {
  renderDuel,
  renderErrorBanner,
  renderHistory,
  renderPosterior,
  renderRecommendation,
} from "./render";
import { SessionController } from "./session";
import type { Presentation } from "./types";

const root = document.getElementById("app");
if (!root) throw new Error("missing #app root element");

root.innerHTML = `
  <h1>duel session</h1>
  <form id="setup">
    <label>server <input id="base-url" size="28"></label>
    <label>presentation
      <select id="presentation">
        <option value="color_rgb">colors (d=3)</option>
        <option value="point_2d">2-d points</option>
        <option value="raw_vector">raw vector</option>
      </select>
    </label>
    <label>dimension <input id="dimension" type="number" min="1" value="3" disabled></label>
    <label>rounds <input id="rounds" type="number" min="1" value="30"></label>
    <button id="start" type="submit">start session</button>
  </form>
  <div id="error"></div>
  <div id="duel"></div>
  <div id="recommendation"></div>
  <div id="posterior"></div>
  <div id="history"></div>
  <p id="session-line" class="status"></p>
`;

const byId = <T extends HTMLElement>(id: string) =>
  document.getElementById(id) as T;

const baseUrlInput = byId<HTMLInputElement>("base-url");
baseUrlInput.value = defaultBaseUrl();
const presentationSelect = byId<HTMLSelectElement>("presentation");
const dimensionInput = byId<HTMLInputElement>("dimension");
const roundsInput = byId<HTMLInputElement>("rounds");

presentationSelect.addEventListener("change", () => {
  const kind = presentationSelect.value as Presentation;
  const fixed = presentationDimension(kind);
  dimensionInput.disabled = fixed !== null;
  if (fixed !== null) dimensionInput.value = String(fixed);
});

let controller: SessionController | null = null;
let bounds: Bounds = defaultBounds(3);

async function refreshPanels(): Promise<void> {
  if (!controller) return;
  renderErrorBanner(byId("error"), controller);
  renderDuel(byId("duel"), controller, bounds);
  const kind = presentationSelect.value as Presentation;
  renderRecommendation(
    byId("recommendation"),
    controller.recommendation,
    kind,
    bounds,
  );
  byId("session-line").textContent = controller.id
    ? `session ${controller.id} — phase ${controller.phase} — position seed ${controller.positionSeed}`
    : "";
  // history + posterior come from the full-state endpoint; skip while a
  // submission is in flight to keep the lockstep strict
  if (
    controller.phase === "awaiting_feedback" ||
    controller.phase === "finished"
  ) {
    const state = await controller.fetchState();
    if (state) {
      renderHistory(byId("history"), state);
      renderPosterior(byId("posterior"), state.posterior, bounds);
    }
  }
}

byId<HTMLFormElement>("setup").addEventListener("submit", (event) => {
  event.preventDefault();
  const kind = presentationSelect.value as Presentation;
  const dimension =
    presentationDimension(kind) ?? Number(dimensionInput.value);
  bounds = defaultBounds(dimension);
  const api = new HttpDuelApi(baseUrlInput.value.replace(/\/$/, ""));
  controller = new SessionController(api);
  controller.onChange(() => void refreshPanels());
  void controller.create({
    dimension,
    presentation: kind,
    max_rounds: Number(roundsInput.value),
  });
});
