// Pure HTML-string views: every screen is a function of console state
// plus any in-progress form input, nothing else.

import { formatParameter, sig4 } from "./format.js";
import { isComplete, preview, type MeasurementForm } from "./form.js";
import type { ConsoleState } from "./state.js";
import type { PendingCard, SurrogateDiagnostics } from "./types.js";

function escapeHtml(text: string): string {
  return text
    .replace(/&/g, "&amp;")
    .replace(/</g, "&lt;")
    .replace(/>/g, "&gt;")
    .replace(/"/g, "&quot;");
}

export function renderBanner(state: ConsoleState): string {
  if (state.connected) return "";
  return `<div class="banner reconnect">connection lost, retrying&hellip;</div>`;
}

export function renderPendingCard(card: PendingCard): string {
  const positions = card.configuration.positions
    .map(
      (params, index) =>
        `<li>position ${index}: ${params.map((p) => escapeHtml(formatParameter(p))).join(", ")}</li>`,
    )
    .join("");
  const speeds = card.configuration.wind_speeds.map(sig4).join(", ");
  return [
    `<article class="card pending" data-pending-id="${escapeHtml(card.pending_id)}">`,
    `<h3>${escapeHtml(card.pending_id)}</h3>`,
    `<ul>${positions}</ul>`,
    `<p>spacing ${sig4(card.configuration.spacing)}, wind speeds ${speeds}</p>`,
    `</article>`,
  ].join("");
}

export function renderPendingQueue(state: ConsoleState): string {
  if (state.pending.length === 0) {
    return `<section class="queue"><p>no measurements waiting</p></section>`;
  }
  return `<section class="queue">${state.pending.map(renderPendingCard).join("")}</section>`;
}

export function renderMeasurementForm(card: PendingCard, form: MeasurementForm): string {
  const speeds = card.configuration.wind_speeds;
  const cols = card.configuration.positions.length;
  const rows = speeds
    .map((speed, i) => {
      const inputs = Array.from({ length: cols }, (_, j) => {
        const value = escapeHtml(form.cells[i][j]);
        return `<td><input data-cell="${i},${j}" value="${value}"></td>`;
      }).join("");
      return `<tr><th>v = ${sig4(speed)}</th>${inputs}</tr>`;
    })
    .join("");
  const fitness = preview(form);
  const previewText = fitness === null ? "&mdash;" : sig4(fitness);
  const disabled = isComplete(form) ? "" : " disabled";
  return [
    `<form class="measurement" data-pending-id="${escapeHtml(form.pendingId)}">`,
    `<table><tbody>${rows}</tbody></table>`,
    `<p class="preview">aggregate preview: ${previewText}</p>`,
    `<button type="submit"${disabled}>submit</button>`,
    `</form>`,
  ].join("");
}

export function renderDashboard(state: ConsoleState): string {
  const run = state.run;
  if (run === null) return `<section class="dashboard"><p>no run loaded</p></section>`;
  const header =
    `<p>status ${escapeHtml(state.status ?? run.status)}, ` +
    `calls ${run.oracle_calls}/${run.budget}, ` +
    `best ${run.best_fitness === null ? "&mdash;" : sig4(run.best_fitness)}</p>`;
  const elites = run.elites
    .map((elite, index) =>
      elite === null
        ? `<li>position ${index}: &mdash;</li>`
        : `<li>position ${index}: ${elite.parameters
            .map((p) => escapeHtml(formatParameter(p)))
            .join(", ")} (fitness ${sig4(elite.fitness)})</li>`,
    )
    .join("");
  return [
    `<section class="dashboard">`,
    header,
    renderProgressChart(state),
    `<ul class="elites">${elites}</ul>`,
    state.error ? `<p class="error">${escapeHtml(state.error)}</p>` : "",
    `</section>`,
  ].join("");
}

/** Best fitness against oracle calls as an inline SVG polyline. */
export function renderProgressChart(
  state: ConsoleState,
  width = 320,
  height = 120,
): string {
  const points = state.progress;
  if (points.length === 0) return `<svg class="progress" width="${width}" height="${height}"></svg>`;
  const xMax = Math.max(...points.map((p) => p.oracle_calls), 1);
  const yValues = points.map((p) => p.best_fitness);
  const yMin = Math.min(...yValues, 0);
  const yMax = Math.max(...yValues, yMin + 1e-9);
  const coords = points
    .map((p) => {
      const x = (p.oracle_calls / xMax) * (width - 10) + 5;
      const y = height - 5 - ((p.best_fitness - yMin) / (yMax - yMin)) * (height - 10);
      return `${x.toFixed(1)},${y.toFixed(1)}`;
    })
    .join(" ");
  return (
    `<svg class="progress" width="${width}" height="${height}">` +
    `<polyline fill="none" stroke="currentColor" points="${coords}"/></svg>`
  );
}

/** Predicted-vs-measured scatter for one position's surrogate. */
export function renderDiagnostics(
  position: number,
  diag: SurrogateDiagnostics,
  size = 160,
): string {
  if (!diag.fitted || !diag.pairs) {
    return `<section class="diagnostics"><p>position ${position}: no model yet</p></section>`;
  }
  const values = diag.pairs.flatMap((p) => [p.predicted, p.measured]);
  const lo = Math.min(...values);
  const hi = Math.max(...values, lo + 1e-9);
  const scale = (v: number) => ((v - lo) / (hi - lo)) * (size - 10) + 5;
  const dots = diag.pairs
    .map(
      (p) =>
        `<circle cx="${scale(p.measured).toFixed(1)}" ` +
        `cy="${(size - scale(p.predicted)).toFixed(1)}" r="2"/>`,
    )
    .join("");
  return [
    `<section class="diagnostics">`,
    `<h3>position ${position}</h3>`,
    `<svg width="${size}" height="${size}">` +
      `<line x1="5" y1="${size - 5}" x2="${size - 5}" y2="5" stroke="#ccc"/>` +
      dots +
      `</svg>`,
    `<p>${diag.pairs.length} points, final loss ${sig4(diag.final_loss ?? 0)}</p>`,
    `</section>`,
  ].join("");
}
