/** Client-side session store.
 *
 * The UI is stateless with respect to mining: everything here is a cache of
 * API responses keyed by archive generation, plus the transcript of feedback
 * commands submitted from this client. Feedback is shown optimistically as
 * pending and reconciled when the server acknowledges it. */

import type { ApiClient } from "./api.js";
import type {
  FeedbackAck,
  FeedbackRequest,
  ObjectiveName,
  ParetoResponse,
} from "./types.js";

export interface TranscriptEntry {
  command: FeedbackRequest;
  status: "pending" | "acknowledged" | "failed";
  archiveDelta?: number;
  error?: string;
}

export interface ParetoState {
  generation: number;
  x: ObjectiveName;
  y: ObjectiveName;
  points: ParetoResponse["points"];
}

export class SessionStore {
  pareto: ParetoState | null = null;
  transcript: TranscriptEntry[] = [];
  private commandCounter = 0;
  private listeners: Array<() => void> = [];

  constructor(
    private readonly api: ApiClient,
    readonly sessionId: string,
  ) {}

  onChange(listener: () => void): void {
    this.listeners.push(listener);
  }

  private emit(): void {
    for (const l of this.listeners) l();
  }

  /** Poll the front; resolves true when a newer generation arrived. */
  async poll(x: ObjectiveName, y: ObjectiveName): Promise<boolean> {
    const resp = await this.api.pareto(this.sessionId, x, y);
    const changed =
      this.pareto === null ||
      this.pareto.generation !== resp.generation ||
      this.pareto.x !== x ||
      this.pareto.y !== y ||
      JSON.stringify(this.pareto.points) !== JSON.stringify(resp.points);
    if (changed) {
      this.pareto = { generation: resp.generation, x, y, points: resp.points };
      this.emit();
    }
    return changed;
  }

  /** Optimistic submission: the entry is visible as pending immediately and
   * reconciled with the server's ack or error. */
  async submitFeedback(command: FeedbackRequest): Promise<TranscriptEntry> {
    this.commandCounter += 1;
    const withId: FeedbackRequest = {
      ...command,
      command_id: command.command_id ?? `ui-${this.sessionId}-${this.commandCounter}`,
    };
    const entry: TranscriptEntry = { command: withId, status: "pending" };
    this.transcript.push(entry);
    this.emit();
    try {
      const ack: FeedbackAck = await this.api.feedback(this.sessionId, withId);
      entry.status = "acknowledged";
      entry.archiveDelta = ack.archive_delta;
    } catch (err) {
      entry.status = "failed";
      entry.error = err instanceof Error ? err.message : String(err);
    }
    this.emit();
    return entry;
  }
}

export interface PollerHandle {
  stop(): void;
}

/** Periodic polling loop; interval configurable, errors reported and the
 * loop kept alive. */
export function startPolling(
  store: SessionStore,
  axes: () => { x: ObjectiveName; y: ObjectiveName },
  intervalMs: number,
  onError: (err: unknown) => void = () => undefined,
  schedule: (fn: () => void, ms: number) => unknown = (fn, ms) => setTimeout(fn, ms),
  cancel: (handle: unknown) => void = (h) => clearTimeout(h as number),
): PollerHandle {
  let stopped = false;
  let pending: unknown = null;

  const tick = async () => {
    if (stopped) return;
    try {
      const { x, y } = axes();
      await store.poll(x, y);
    } catch (err) {
      onError(err);
    }
    if (!stopped) pending = schedule(tick, intervalMs);
  };
  pending = schedule(tick, 0);
  return {
    stop() {
      stopped = true;
      if (pending !== null) cancel(pending);
    },
  };
}
