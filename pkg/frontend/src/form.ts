import { aggregatePreview } from "./format.js";
import type { PendingCard } from "./types.js";

/** In-progress measurement entry for one pending card: a grid of raw
 *  text inputs indexed (wind speed x position), plus the idempotency
 *  key minted when the form was opened so retries of the same submit
 *  attempt are deduplicated by the service. */
export interface MeasurementForm {
  pendingId: string;
  cells: string[][];
  idempotencyKey: string;
}

export function newForm(card: PendingCard, idempotencyKey: string): MeasurementForm {
  const rows = card.configuration.wind_speeds.length;
  const cols = card.configuration.positions.length;
  return {
    pendingId: card.pending_id,
    cells: Array.from({ length: rows }, () => Array.from({ length: cols }, () => "")),
    idempotencyKey,
  };
}

export function setCell(
  form: MeasurementForm,
  row: number,
  col: number,
  text: string,
): MeasurementForm {
  const cells = form.cells.map((r) => [...r]);
  cells[row][col] = text;
  return { ...form, cells };
}

function parseCell(text: string): number | null {
  const trimmed = text.trim();
  if (trimmed === "") return null;
  const value = Number(trimmed);
  return Number.isFinite(value) ? value : null;
}

/** A form is submittable only when every cell parses to a finite number. */
export function isComplete(form: MeasurementForm): boolean {
  return form.cells.every((row) => row.every((cell) => parseCell(cell) !== null));
}

export function toMatrix(form: MeasurementForm): number[][] | null {
  if (!isComplete(form)) return null;
  return form.cells.map((row) => row.map((cell) => parseCell(cell) as number));
}

/** Live fitness preview, or null while the grid is incomplete. */
export function preview(form: MeasurementForm): number | null {
  const matrix = toMatrix(form);
  return matrix === null ? null : aggregatePreview(matrix);
}
