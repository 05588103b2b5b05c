import { describe, expect, it } from "vitest";

import { newForm, setCell } from "../src/form.js";
import { hydrate, initialState, setConnected } from "../src/state.js";
import type { PendingCard, RunState, SurrogateDiagnostics } from "../src/types.js";
import {
  renderBanner,
  renderDashboard,
  renderDiagnostics,
  renderMeasurementForm,
  renderPendingQueue,
  renderProgressChart,
} from "../src/views.js";

const run: RunState = {
  run_id: "r1",
  status: "running",
  oracle_calls: 12,
  budget: 50,
  round: 2,
  best_fitness: 2.345678,
  best_configuration: null,
  elites: [
    {
      fitness: 1.234567,
      parameters: [
        { name: "blades", value: 4, units: "count" },
        { name: "chord", value: 0.298765, units: "m" },
      ],
    },
  ],
  error: null,
};

function card(id: string, issuedAt: number): PendingCard {
  return {
    pending_id: id,
    issued_at: issuedAt,
    status: "awaiting",
    configuration: {
      positions: [
        [
          { name: "blades", value: 4, units: "count" },
          { name: "rotation", value: "CCW" },
        ],
      ],
      spacing: 0.75,
      wind_speeds: [1, 2],
    },
  };
}

describe("pending queue view", () => {
  it("renders cards ordered by issue time with raw values and units", () => {
    const state = hydrate(initialState(), run, [card("p2", 20), card("p1", 10)], []);
    const html = renderPendingQueue(state);
    expect(html.indexOf("p1")).toBeLessThan(html.indexOf("p2"));
    expect(html).toContain("blades: 4 count");
    expect(html).toContain("rotation: CCW");
    expect(html).toContain("spacing 0.75");
  });

  it("shows an empty message with no cards", () => {
    const state = hydrate(initialState(), run, [], []);
    expect(renderPendingQueue(state)).toContain("no measurements waiting");
  });
});

describe("measurement form view", () => {
  it("disables submit until the grid is complete, then shows the preview", () => {
    const pending = card("p1", 10);
    let form = newForm(pending, "k");
    expect(renderMeasurementForm(pending, form)).toContain("disabled");
    form = setCell(form, 0, 0, "1");
    form = setCell(form, 1, 0, "8");
    const html = renderMeasurementForm(pending, form);
    expect(html).not.toContain("disabled");
    expect(html).toContain("aggregate preview: 4.5");
  });
});

describe("dashboard view", () => {
  it("shows counters, elites at 4 significant figures, and the curve", () => {
    const state = hydrate(initialState(), run, [], [
      { oracle_calls: 1, best_fitness: 0.5 },
      { oracle_calls: 12, best_fitness: 2.345678 },
    ]);
    const html = renderDashboard(state);
    expect(html).toContain("calls 12/50");
    expect(html).toContain("best 2.346");
    expect(html).toContain("chord: 0.2988 m");
    expect(html).toContain("<polyline");
  });

  it("progress chart is empty with no points", () => {
    expect(renderProgressChart(initialState())).not.toContain("polyline");
  });
});

describe("diagnostics view", () => {
  it("plots predicted-vs-measured pairs", () => {
    const diag: SurrogateDiagnostics = {
      fitted: true,
      final_loss: 0.0123456,
      pairs: [
        { predicted: 0.5, measured: 0.6 },
        { predicted: 0.9, measured: 0.85 },
      ],
    };
    const html = renderDiagnostics(0, diag);
    expect(html.match(/<circle/g)).toHaveLength(2);
    expect(html).toContain("2 points");
  });

  it("reports an unfitted model", () => {
    expect(renderDiagnostics(1, { fitted: false })).toContain("no model yet");
  });
});

describe("reconnect banner", () => {
  it("appears only while disconnected", () => {
    let state = setConnected(initialState(), true);
    expect(renderBanner(state)).toBe("");
    state = setConnected(state, false);
    expect(renderBanner(state)).toContain("connection lost");
  });
});
