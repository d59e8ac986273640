/**
 * Planner state: current form, in-flight revision tracking, last response.
 *
 * Each submission bumps a revision counter; a response is applied only if
 * no newer request was issued meanwhile, so the displayed plan always
 * corresponds to the inputs that produced it.
 */

import {
  DesignId,
  PlanRequest,
  PlanResponse,
  PlanServiceClient,
  ServiceError,
} from "./api.js";

export interface PlannerView {
  design: DesignId;
  revision: number;
  status: "idle" | "loading" | "ready" | "error";
  response?: PlanResponse;
  error?: ServiceError;
}

export class PlannerState {
  private revision = 0;
  private applied = 0;
  private view: PlannerView = { design: "mean", revision: 0, status: "idle" };
  private listeners: ((view: PlannerView) => void)[] = [];

  constructor(private client: PlanServiceClient) {}

  subscribe(listener: (view: PlannerView) => void): void {
    this.listeners.push(listener);
  }

  current(): PlannerView {
    return this.view;
  }

  private emit(view: PlannerView): void {
    this.view = view;
    for (const listener of this.listeners) listener(view);
  }

  /** Submit a plan request; stale responses are discarded. */
  async submit(design: DesignId, body: PlanRequest): Promise<void> {
    const revision = ++this.revision;
    this.emit({ design, revision, status: "loading", response: this.view.response });
    try {
      const response = await this.client.plan(design, body);
      if (revision < this.revision || revision <= this.applied) return; // stale
      this.applied = revision;
      this.emit({ design, revision, status: "ready", response });
    } catch (err) {
      if (revision < this.revision || revision <= this.applied) return; // stale
      this.applied = revision;
      this.emit({
        design,
        revision,
        status: "error",
        error: err as ServiceError,
        response: undefined,
      });
    }
  }
}

/** Debounce helper for live slider/field recompute (~250 ms default). */
export function debounce<A extends unknown[]>(
  fn: (...args: A) => void,
  waitMs = 250,
  timers: { set: typeof setTimeout; clear: typeof clearTimeout } = {
    set: setTimeout,
    clear: clearTimeout,
  },
): (...args: A) => void {
  let handle: ReturnType<typeof setTimeout> | undefined;
  return (...args: A) => {
    if (handle !== undefined) timers.clear(handle);
    handle = timers.set(() => fn(...args), waitMs);
  };
}
