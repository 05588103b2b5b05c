import type { PendingCard, RunEvent, RunState, RunStatus } from "./types.js";

/** One point on the dashboard's best-fitness-vs-oracle-calls curve. */
export interface ProgressPoint {
  oracle_calls: number;
  best_fitness: number;
}

/** Everything the console renders.  It is reconstructed from service
 *  responses on load and then kept current by applying events, so a
 *  hard refresh loses nothing. */
export interface ConsoleState {
  run: RunState | null;
  status: RunStatus | null;
  pending: PendingCard[];
  submitted: string[];
  progress: ProgressPoint[];
  connected: boolean;
  error: string | null;
}

export function initialState(): ConsoleState {
  return {
    run: null,
    status: null,
    pending: [],
    submitted: [],
    progress: [],
    connected: false,
    error: null,
  };
}

/** Seed the state from a snapshot of the REST endpoints. */
export function hydrate(
  state: ConsoleState,
  run: RunState,
  pending: PendingCard[],
  progress: ProgressPoint[],
): ConsoleState {
  return {
    ...state,
    run,
    status: run.status,
    pending: sortPending(pending),
    progress,
    error: run.error,
  };
}

function sortPending(cards: PendingCard[]): PendingCard[] {
  return [...cards].sort((a, b) => a.issued_at - b.issued_at);
}

export function applyEvent(state: ConsoleState, event: RunEvent): ConsoleState {
  switch (event.kind) {
    case "pending": {
      if (state.pending.some((c) => c.pending_id === event.pending.pending_id)) return state;
      const card: PendingCard = { ...event.pending, status: "awaiting" };
      return { ...state, pending: sortPending([...state.pending, card]) };
    }
    case "record": {
      const progress = [
        ...state.progress,
        { oracle_calls: event.oracle_calls, best_fitness: event.best_fitness },
      ];
      const run =
        state.run === null
          ? null
          : {
              ...state.run,
              oracle_calls: event.oracle_calls,
              best_fitness: event.best_fitness,
              round: event.round,
            };
      return { ...state, progress, run };
    }
    case "status":
      return { ...state, status: event.status, error: event.error ?? state.error };
  }
}

/** A submit was acknowledged: the card leaves the queue for good. */
export function markSubmitted(state: ConsoleState, pendingId: string): ConsoleState {
  return {
    ...state,
    pending: state.pending.filter((c) => c.pending_id !== pendingId),
    submitted: [...state.submitted, pendingId],
  };
}

export function setConnected(state: ConsoleState, connected: boolean): ConsoleState {
  return { ...state, connected };
}
