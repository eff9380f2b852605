import { ApiError, type DuelApi } from "../src/api";
import type {
  CreateSessionRequest,
  DuelPair,
  DuelResponse,
  OutcomeRequest,
  SessionState,
  SessionStatus,
} from "../src/types";

// Scripted server: advances one round per accepted outcome, can be told to
// fail or conflict on the next submission.  Duel payloads encode the round
// so tests can tell pairs apart.

export class FakeApi implements DuelApi {
  round = 1;
  status: SessionStatus = "awaiting_feedback";
  submissions: OutcomeRequest[] = [];
  getDuelCalls = 0;
  failNextSubmit: Error | null = null;
  conflictNextSubmit = false;
  maxRounds = Infinity;
  history: SessionState["history"] = [];

  private duel(): DuelPair | null {
    if (this.status === "finished") return null;
    return {
      a: [this.round, 0.25],
      b: [this.round, 0.75],
    };
  }

  private response(): DuelResponse {
    return {
      session_id: "fake-session",
      status: this.status,
      round: this.round,
      dimension: 2,
      presentation: "point_2d",
      recommendation: this.history.length
        ? this.history[this.history.length - 1].winner
        : null,
      duel: this.duel(),
    };
  }

  async createSession(_req: CreateSessionRequest): Promise<DuelResponse> {
    return this.response();
  }

  async getDuel(_id: string): Promise<DuelResponse> {
    this.getDuelCalls += 1;
    return this.response();
  }

  async getSession(_id: string): Promise<SessionState> {
    return {
      ...this.response(),
      method: "hb_ei",
      history: this.history,
      pending_duel: this.duel(),
      posterior: null,
    };
  }

  async submitOutcome(
    _id: string,
    req: OutcomeRequest,
  ): Promise<DuelResponse> {
    if (this.failNextSubmit) {
      const err = this.failNextSubmit;
      this.failNextSubmit = null;
      throw err;
    }
    if (this.conflictNextSubmit) {
      this.conflictNextSubmit = false;
      throw new ApiError(
        409,
        `stale outcome for round ${req.round}; current round is ${this.round}`,
      );
    }
    this.submissions.push(req);
    const pair = this.duel()!;
    const winner = req.winner === "a" ? pair.a : pair.b;
    const loser = req.winner === "a" ? pair.b : pair.a;
    this.history.push({ winner, loser });
    this.round += 1;
    if (this.round > this.maxRounds) this.status = "finished";
    return this.response();
  }
}
