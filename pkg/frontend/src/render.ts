import {
  type Bounds,
  formatValue,
  pointPercent,
  swatchColor,
} from "./presentation";
import type { SessionController } from "./session";
import type { PosteriorGrid, Presentation, SessionState } from "./types";

// Vanilla-DOM rendering.  Every displayed model quantity is the exact
// value from the server payload (formatValue = String); colors and pixel
// positions are the only client-side mappings.

const SVG_NS = "http://www.w3.org/2000/svg";

function el<K extends keyof HTMLElementTagNameMap>(
  tag: K,
  className?: string,
  text?: string,
): HTMLElementTagNameMap[K] {
  const node = document.createElement(tag);
  if (className) node.className = className;
  if (text !== undefined) node.textContent = text;
  return node;
}

export function renderCandidate(
  payload: number[],
  kind: Presentation,
  bounds: Bounds,
): HTMLElement {
  const box = el("div", "candidate");
  if (kind === "color_rgb") {
    const swatch = el("div", "swatch");
    swatch.style.backgroundColor = swatchColor(payload, bounds);
    box.appendChild(swatch);
  } else if (kind === "point_2d") {
    const square = el("div", "domain-square");
    const marker = el("div", "marker");
    const pos = pointPercent(payload, bounds);
    marker.style.left = `${pos.x}%`;
    marker.style.top = `${pos.y}%`;
    square.appendChild(marker);
    box.appendChild(square);
  }
  const values = el("div", "values");
  payload.forEach((v, i) => {
    values.appendChild(el("span", "value", formatValue(v)));
    if (i < payload.length - 1) values.appendChild(el("span", "sep", ", "));
  });
  box.appendChild(values);
  return box;
}

export function renderDuel(
  container: HTMLElement,
  controller: SessionController,
  bounds: Bounds,
): void {
  container.replaceChildren();
  const view = controller.view;
  if (controller.phase === "finished") {
    container.appendChild(el("p", "status", "session finished"));
    return;
  }
  if (!view) {
    container.appendChild(el("p", "status", "no pending duel"));
    return;
  }
  const prompt = el("p", "status", `round ${view.round}: which is better?`);
  container.appendChild(prompt);
  const row = el("div", "duel-row");
  for (const side of ["left", "right"] as const) {
    const cell = el("div", "duel-cell");
    cell.appendChild(
      renderCandidate(view[side], view.presentation, bounds),
    );
    const button = el("button", "choose", `choose ${side}`);
    button.disabled = controller.phase !== "awaiting_feedback";
    button.addEventListener("click", () => void controller.choose(side));
    cell.appendChild(button);
    row.appendChild(cell);
  }
  container.appendChild(row);
  if (controller.phase === "submitting") {
    container.appendChild(el("p", "status", "waiting for the next pair…"));
  }
}

export function renderErrorBanner(
  container: HTMLElement,
  controller: SessionController,
): void {
  container.replaceChildren();
  if (controller.phase !== "failed" || !controller.lastError) return;
  const banner = el("div", "error-banner");
  banner.appendChild(el("span", "message", controller.lastError));
  const retry = el("button", "retry", "retry");
  retry.addEventListener("click", () => void controller.retry());
  banner.appendChild(retry);
  container.appendChild(banner);
}

export function renderRecommendation(
  container: HTMLElement,
  recommendation: number[] | null,
  kind: Presentation,
  bounds: Bounds,
): void {
  container.replaceChildren();
  container.appendChild(el("h3", undefined, "current recommendation"));
  if (!recommendation) {
    container.appendChild(el("p", "status", "none yet"));
    return;
  }
  container.appendChild(renderCandidate(recommendation, kind, bounds));
}

export function renderHistory(
  container: HTMLElement,
  state: SessionState,
): void {
  container.replaceChildren();
  container.appendChild(
    el("h3", undefined, `history (${state.history.length} duels)`),
  );
  const list = el("ol", "history");
  for (const entry of state.history) {
    const item = el("li");
    item.appendChild(
      el("span", "winner", entry.winner.map(formatValue).join(", ")),
    );
    item.appendChild(el("span", "sep", " beat "));
    item.appendChild(
      el("span", "loser", entry.loser.map(formatValue).join(", ")),
    );
    list.appendChild(item);
  }
  container.appendChild(list);
}

function svgEl(tag: string): SVGElement {
  return document.createElementNS(SVG_NS, tag);
}

/** 1-d posterior: credible band polygon + mean polyline, x from the grid
 *  coordinates, y scaled to the band's own range. */
export function renderPosterior1d(
  posterior: PosteriorGrid,
  bounds: Bounds,
  width = 420,
  height = 160,
): SVGElement {
  const svg = svgEl("svg");
  svg.setAttribute("viewBox", `0 0 ${width} ${height}`);
  svg.setAttribute("class", "posterior-1d");
  const [lo, hi] = bounds[0];
  const yLo = Math.min(...posterior.lower);
  const yHi = Math.max(...posterior.upper);
  const sx = (x: number) => ((x - lo) / (hi - lo || 1)) * width;
  const sy = (y: number) =>
    height - ((y - yLo) / (yHi - yLo || 1)) * (height - 8) - 4;
  const xs = posterior.points.map((p) => sx(p[0]));

  const band = svgEl("polygon");
  const upperPts = xs.map((x, i) => `${x},${sy(posterior.upper[i])}`);
  const lowerPts = xs
    .map((x, i) => `${x},${sy(posterior.lower[i])}`)
    .reverse();
  band.setAttribute("points", [...upperPts, ...lowerPts].join(" "));
  band.setAttribute("class", "band");
  svg.appendChild(band);

  const meanLine = svgEl("polyline");
  meanLine.setAttribute(
    "points",
    xs.map((x, i) => `${x},${sy(posterior.mean[i])}`).join(" "),
  );
  meanLine.setAttribute("class", "mean");
  meanLine.setAttribute("fill", "none");
  svg.appendChild(meanLine);
  return svg;
}

/** 2-d posterior: one absolutely-positioned cell per grid point, colored
 *  by the mean (min-max normalized for color only). */
export function renderPosterior2d(
  posterior: PosteriorGrid,
  bounds: Bounds,
): HTMLElement {
  const square = el("div", "domain-square posterior-2d");
  const mLo = Math.min(...posterior.mean);
  const mHi = Math.max(...posterior.mean);
  const n = Math.round(Math.sqrt(posterior.points.length));
  const cellPct = 100 / (n > 1 ? n - 1 : 1);
  posterior.points.forEach((p, i) => {
    const cell = el("div", "posterior-cell");
    const pos = pointPercent(p, bounds);
    cell.style.left = `${pos.x}%`;
    cell.style.top = `${pos.y}%`;
    cell.style.width = `${cellPct}%`;
    cell.style.height = `${cellPct}%`;
    const unit = mHi > mLo ? (posterior.mean[i] - mLo) / (mHi - mLo) : 0.5;
    const warm = Math.round(255 * unit);
    cell.style.backgroundColor = `rgb(${warm}, 64, ${255 - warm})`;
    cell.title = formatValue(posterior.mean[i]);
    square.appendChild(cell);
  });
  return square;
}

export function renderPosterior(
  container: HTMLElement,
  posterior: PosteriorGrid | null,
  bounds: Bounds,
): void {
  container.replaceChildren();
  if (!posterior) return;
  container.appendChild(el("h3", undefined, "posterior"));
  container.appendChild(
    posterior.shape === "grid1d"
      ? (renderPosterior1d(posterior, bounds) as unknown as HTMLElement)
      : renderPosterior2d(posterior, bounds),
  );
}
