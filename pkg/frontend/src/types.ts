// Payload shapes of the duel session service.  These mirror the versioned
// JSON schemas published by the backend (schemas/*.v1.json); the client
// never derives model quantities itself, it only displays these.

export type Presentation = "color_rgb" | "point_2d" | "raw_vector";

export type SessionStatus = "awaiting_feedback" | "computing" | "finished";

export interface DuelPair {
  a: number[];
  b: number[];
}

export interface DuelResponse {
  session_id: string;
  status: SessionStatus;
  round: number;
  dimension: number;
  presentation: Presentation;
  recommendation: number[] | null;
  duel: DuelPair | null;
}

export interface HistoryEntry {
  winner: number[];
  loser: number[];
}

export interface PosteriorGrid {
  shape: "grid1d" | "grid2d";
  points: number[][];
  mean: number[];
  lower: number[];
  upper: number[];
}

export interface SessionState {
  session_id: string;
  status: SessionStatus;
  round: number;
  dimension: number;
  presentation: Presentation;
  method: string;
  history: HistoryEntry[];
  recommendation: number[] | null;
  pending_duel: DuelPair | null;
  posterior: PosteriorGrid | null;
}

export interface CreateSessionRequest {
  dimension: number;
  presentation?: Presentation;
  bounds?: [number, number][];
  method?: string;
  init_pairs?: number;
  max_rounds?: number;
  seed?: number;
}

export interface OutcomeRequest {
  winner: "a" | "b";
  round?: number;
}

export interface ErrorBody {
  error: string;
}
