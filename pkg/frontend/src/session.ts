import { ApiError, type DuelApi } from "./api";
import type {
  CreateSessionRequest,
  DuelResponse,
  Presentation,
  SessionState,
} from "./types";

// One tab drives one session in strict request/response lockstep: a choice
// can only be made while the server says awaiting_feedback, and the phase
// flips synchronously on submit so a double click cannot produce a second
// request.

export type Phase =
  | "idle"
  | "creating"
  | "awaiting_feedback"
  | "submitting"
  | "finished"
  | "failed";

export interface RoundView {
  round: number;
  presentation: Presentation;
  // which server-side candidate ended up on the left of the screen
  leftIs: "a" | "b";
  left: number[];
  right: number[];
}

export interface AuditEntry {
  round: number;
  left_is: "a" | "b";
  picked_side?: "left" | "right";
}

// small client-local generator so the left/right shuffle is reproducible
// from the logged seed when auditing for position bias
export function lcg(seed: number): () => number {
  let s = seed >>> 0;
  return () => {
    s = (Math.imul(1664525, s) + 1013904223) >>> 0;
    return s / 2 ** 32;
  };
}

export class SessionController {
  phase: Phase = "idle";
  view: RoundView | null = null;
  recommendation: number[] | null = null;
  lastError: string | null = null;
  readonly positionSeed: number;
  readonly audit: AuditEntry[] = [];

  private sessionId: string | null = null;
  private readonly next01: () => number;
  private readonly listeners: Array<() => void> = [];

  constructor(
    private readonly api: DuelApi,
    positionSeed: number = Date.now() >>> 0,
  ) {
    this.positionSeed = positionSeed;
    this.next01 = lcg(positionSeed);
  }

  get id(): string | null {
    return this.sessionId;
  }

  onChange(listener: () => void): void {
    this.listeners.push(listener);
  }

  private emit(): void {
    for (const listener of this.listeners) listener();
  }

  async create(req: CreateSessionRequest): Promise<void> {
    if (this.phase !== "idle" && this.phase !== "failed") return;
    this.phase = "creating";
    this.emit();
    try {
      const res = await this.api.createSession(req);
      this.sessionId = res.session_id;
      this.accept(res);
    } catch (err) {
      this.fail(err);
    }
  }

  /** Submit the candidate shown on `side`.  A no-op unless a duel is
   *  currently awaiting feedback — this is the double-submit guard. */
  async choose(side: "left" | "right"): Promise<void> {
    if (this.phase !== "awaiting_feedback" || !this.view || !this.sessionId) {
      return;
    }
    const view = this.view;
    this.phase = "submitting"; // before any await: a second click is a no-op
    this.emit();
    const winner =
      side === "left" ? view.leftIs : view.leftIs === "a" ? "b" : "a";
    const entry = this.audit[this.audit.length - 1];
    if (entry && entry.round === view.round) entry.picked_side = side;
    try {
      const res = await this.api.submitOutcome(this.sessionId, {
        winner,
        round: view.round,
      });
      this.accept(res);
    } catch (err) {
      if (err instanceof ApiError && err.status === 409) {
        // the submission answered a stale round; the server's state wins
        await this.resync();
        return;
      }
      this.fail(err, view);
    }
  }

  /** Refetch the pending duel; used after conflicts and from the retry
   *  banner.  Keeps the lockstep: state comes only from the server. */
  async resync(): Promise<void> {
    if (!this.sessionId) return;
    try {
      this.accept(await this.api.getDuel(this.sessionId));
    } catch (err) {
      this.fail(err);
    }
  }

  retry(): Promise<void> {
    return this.resync();
  }

  /** Full state for the history and posterior panels. */
  async fetchState(): Promise<SessionState | null> {
    if (!this.sessionId) return null;
    return this.api.getSession(this.sessionId);
  }

  private accept(res: DuelResponse): void {
    this.recommendation = res.recommendation;
    this.lastError = null;
    if (res.status === "finished" || res.duel === null) {
      this.phase = "finished";
      this.view = null;
      this.emit();
      return;
    }
    const previous = this.audit[this.audit.length - 1];
    let leftIs: "a" | "b";
    if (previous && previous.round === res.round) {
      // the same round came back (conflict resync): keep its placement
      leftIs = previous.left_is;
    } else {
      leftIs = this.next01() < 0.5 ? "a" : "b";
      this.audit.push({ round: res.round, left_is: leftIs });
    }
    this.view = {
      round: res.round,
      presentation: res.presentation,
      leftIs,
      left: leftIs === "a" ? res.duel.a : res.duel.b,
      right: leftIs === "a" ? res.duel.b : res.duel.a,
    };
    this.phase = "awaiting_feedback";
    this.emit();
  }

  private fail(err: unknown, keepView?: RoundView): void {
    this.lastError = err instanceof Error ? err.message : String(err);
    this.phase = "failed";
    this.view = keepView ?? this.view;
    this.emit();
  }
}
