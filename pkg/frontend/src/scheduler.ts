/**
 * Debounced, last-write-wins decode scheduling.
 *
 * Slider input is debounced (100 ms) to bound request rate; concurrent
 * in-flight decodes resolve last-write-wins: a response is delivered only
 * if no newer request has been issued since, so rapid dragging always ends
 * on exactly one rendered image matching the final slider value.
 */

export const DEBOUNCE_MS = 100;

type Task<T> = () => Promise<T>;

export interface SchedulerHooks {
  setTimeout: (fn: () => void, ms: number) => unknown;
  clearTimeout: (handle: unknown) => void;
}

const defaultHooks: SchedulerHooks = {
  setTimeout: (fn, ms) => setTimeout(fn, ms),
  clearTimeout: (h) => clearTimeout(h as Parameters<typeof clearTimeout>[0]),
};

export class DecodeScheduler<T> {
  private timer: unknown = null;
  private seq = 0;
  private delivered = 0;

  constructor(
    private readonly onResult: (result: T) => void,
    private readonly onError: (err: unknown) => void,
    private readonly debounceMs: number = DEBOUNCE_MS,
    private readonly hooks: SchedulerHooks = defaultHooks,
  ) {}

  /** Queue a decode; earlier pending or in-flight requests lose. */
  request(task: Task<T>): void {
    if (this.timer !== null) this.hooks.clearTimeout(this.timer);
    this.timer = this.hooks.setTimeout(() => {
      this.timer = null;
      this.launch(task);
    }, this.debounceMs);
  }

  /** Bypass the debounce (used for the initial render). */
  requestNow(task: Task<T>): void {
    if (this.timer !== null) {
      this.hooks.clearTimeout(this.timer);
      this.timer = null;
    }
    this.launch(task);
  }

  private launch(task: Task<T>): void {
    const ticket = ++this.seq;
    task().then(
      (result) => {
        if (ticket > this.delivered && ticket === this.seq) {
          this.delivered = ticket;
          this.onResult(result);
        }
      },
      (err) => {
        if (ticket === this.seq) this.onError(err);
      },
    );
  }
}
