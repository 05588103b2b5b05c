// Shapes returned by the run service's /api/v1 endpoints.

export type RunStatus = "running" | "awaiting-measurement" | "finished" | "cancelled";

export interface ParameterValue {
  name: string;
  value: number | string;
  units?: string;
  kind?: string;
}

export interface ArrayConfigurationView {
  positions: ParameterValue[][];
  spacing: number;
  wind_speeds: number[];
}

export interface PendingCard {
  pending_id: string;
  issued_at: number;
  status: string;
  configuration: ArrayConfigurationView;
}

export interface EliteView {
  fitness: number;
  parameters: ParameterValue[];
}

export interface RunState {
  run_id: string;
  status: RunStatus;
  oracle_calls: number;
  budget: number;
  round: number;
  best_fitness: number | null;
  best_configuration: ArrayConfigurationView | null;
  elites: (EliteView | null)[];
  error: string | null;
}

export interface ArchiveRecord {
  record_id: number;
  round: number;
  position: number;
  source: string;
  fitness: number;
  provenance: string;
}

export interface SurrogatePair {
  predicted: number;
  measured: number;
}

export interface SurrogateDiagnostics {
  fitted: boolean;
  epochs_run?: number;
  final_loss?: number;
  pairs?: SurrogatePair[];
}

export interface SubmitAck {
  pending_id: string;
  fitness: number;
  status: string;
}

export interface SubmitRejection {
  message: string;
  expected_shape: [number, number];
  cells: { speed_index: number; position: number; problem: string }[];
}

export type RunEvent =
  | { kind: "pending"; event_id: number; pending: Omit<PendingCard, "status"> }
  | {
      kind: "record";
      event_id: number;
      record_id: number;
      round: number;
      position: number;
      source: string;
      fitness: number;
      best_fitness: number;
      oracle_calls: number;
    }
  | { kind: "status"; event_id: number; status: RunStatus; error?: string };
