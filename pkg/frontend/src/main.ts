// Browser bootstrap: wire the pure views to the service and the event
// stream.  All state lives in `state` plus the in-progress forms; every
// render is a full repaint from that state.

import { ApiClient, newIdempotencyKey, SubmitRejectedError } from "./client.js";
import { subscribeEvents } from "./events.js";
import { newForm, setCell, toMatrix, type MeasurementForm } from "./form.js";
import {
  applyEvent,
  hydrate,
  initialState,
  markSubmitted,
  setConnected,
  type ConsoleState,
} from "./state.js";
import {
  renderBanner,
  renderDashboard,
  renderMeasurementForm,
  renderPendingQueue,
} from "./views.js";

export async function mount(root: HTMLElement, base: string, runId: string): Promise<() => void> {
  const client = new ApiClient(base);
  let state: ConsoleState = initialState();
  const forms = new Map<string, MeasurementForm>();

  function render(): void {
    const formHtml = state.pending
      .map((card) => {
        let form = forms.get(card.pending_id);
        if (!form) {
          form = newForm(card, newIdempotencyKey());
          forms.set(card.pending_id, form);
        }
        return renderMeasurementForm(card, form);
      })
      .join("");
    root.innerHTML =
      renderBanner(state) + renderDashboard(state) + renderPendingQueue(state) + formHtml;
  }

  root.addEventListener("input", (e) => {
    const input = e.target as HTMLInputElement;
    const cell = input.dataset.cell;
    const pendingId = input.closest("form")?.dataset.pendingId;
    if (!cell || !pendingId) return;
    const form = forms.get(pendingId);
    if (!form) return;
    const [row, col] = cell.split(",").map(Number);
    forms.set(pendingId, setCell(form, row, col, input.value));
    render();
  });

  root.addEventListener("submit", (e) => {
    const formEl = e.target as HTMLFormElement;
    e.preventDefault();
    const pendingId = formEl.dataset.pendingId;
    const form = pendingId ? forms.get(pendingId) : undefined;
    if (!pendingId || !form) return;
    const matrix = toMatrix(form);
    if (matrix === null) return;
    client
      .submitResult(runId, pendingId, matrix, form.idempotencyKey)
      .then(() => {
        forms.delete(pendingId);
        state = markSubmitted(state, pendingId);
        render();
      })
      .catch((err) => {
        if (err instanceof SubmitRejectedError) {
          // keep the form; mint a fresh key for the corrected attempt
          forms.set(pendingId, { ...form, idempotencyKey: newIdempotencyKey() });
        }
        render();
      });
  });

  const [run, pending, archive] = await Promise.all([
    client.getRun(runId),
    client.getPending(runId),
    client.getArchive(runId),
  ]);
  let best = -Infinity;
  const progress = archive.map((r) => {
    best = Math.max(best, r.fitness);
    return { oracle_calls: r.record_id, best_fitness: best };
  });
  state = hydrate(state, run, pending, progress);
  render();

  const unsubscribe = subscribeEvents(base, runId, {
    onEvent(event) {
      state = applyEvent(state, event);
      render();
    },
    onConnect() {
      state = setConnected(state, true);
      render();
    },
    onDisconnect() {
      state = setConnected(state, false);
      render();
    },
  });
  return unsubscribe;
}
