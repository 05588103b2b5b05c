import type { ParameterValue } from "./types.js";

/** Render a number with 4 significant figures, without exponent clutter
 *  for the magnitudes the console actually shows. */
export function sig4(x: number): string {
  if (!Number.isFinite(x)) return String(x);
  if (x === 0) return "0";
  const s = x.toPrecision(4);
  // strip trailing zeros after the decimal point ("0.6000" -> "0.6")
  return s.includes("e") ? s : s.replace(/\.?0+$/, "");
}

export function formatParameter(p: ParameterValue): string {
  const value = typeof p.value === "number" ? sig4(p.value) : p.value;
  const units = p.units && p.units !== "dimensionless" ? ` ${p.units}` : "";
  return `${p.name}: ${value}${units}`;
}

/** The service's fitness aggregate: mean over wind speeds of the
 *  per-speed totals across positions.  Used only for the live preview;
 *  the server's acknowledgment is the source of truth. */
export function aggregatePreview(readings: number[][]): number | null {
  if (readings.length === 0) return null;
  let sum = 0;
  for (const row of readings) {
    for (const cell of row) {
      if (!Number.isFinite(cell)) return null;
      sum += cell;
    }
  }
  return sum / readings.length;
}
