// Debounced request loop: at most one issue per delay window, responses
// applied in issue order, superseded responses discarded. After slider
// motion stops, exactly one settled request reflects the final values.

export interface SchedulerHooks<P, R> {
  issue: (params: P) => Promise<R>;
  apply: (result: R, params: P) => void;
  onError?: (err: unknown, params: P) => void;
  delayMs?: number;
  now?: () => number;
  setTimer?: (fn: () => void, ms: number) => unknown;
  clearTimer?: (handle: unknown) => void;
}

export class RequestScheduler<P, R> {
  private readonly issue: (params: P) => Promise<R>;
  private readonly apply: (result: R, params: P) => void;
  private readonly onError: (err: unknown, params: P) => void;
  private readonly delayMs: number;
  private readonly now: () => number;
  private readonly setTimer: (fn: () => void, ms: number) => unknown;
  private readonly clearTimer: (handle: unknown) => void;

  private timer: unknown = null;
  private pending: P | null = null;
  private lastIssueAt = -Infinity;
  private issued = 0;
  private applied = 0;
  private inFlight = new Set<Promise<void>>();

  constructor(hooks: SchedulerHooks<P, R>) {
    this.issue = hooks.issue;
    this.apply = hooks.apply;
    this.onError = hooks.onError ?? (() => undefined);
    this.delayMs = hooks.delayMs ?? 250;
    this.now = hooks.now ?? (() => Date.now());
    this.setTimer = hooks.setTimer ?? ((fn, ms) => setTimeout(fn, ms));
    this.clearTimer = hooks.clearTimer ?? ((h) => clearTimeout(h as number));
  }

  /** Latest params win; fires immediately when the rate window allows. */
  request(params: P): void {
    this.pending = params;
    if (this.timer !== null) return;
    const wait = this.lastIssueAt + this.delayMs - this.now();
    if (wait <= 0) {
      this.issueNow();
    } else {
      this.timer = this.setTimer(() => {
        this.timer = null;
        if (this.pending !== null) this.issueNow();
      }, wait);
    }
  }

  /** Cancel any scheduled wait, issue the pending params, await quiescence. */
  async flush(): Promise<void> {
    if (this.timer !== null) {
      this.clearTimer(this.timer);
      this.timer = null;
    }
    if (this.pending !== null) this.issueNow();
    while (this.inFlight.size > 0) {
      await Promise.allSettled([...this.inFlight]);
    }
  }

  get inFlightCount(): number {
    return this.inFlight.size;
  }

  get issuedCount(): number {
    return this.issued;
  }

  private issueNow(): void {
    const params = this.pending as P;
    this.pending = null;
    this.lastIssueAt = this.now();
    const id = ++this.issued;
    const task = this.issue(params)
      .then((result) => {
        // discard when a newer request has been issued meanwhile
        if (id === this.issued && id > this.applied) {
          this.applied = id;
          this.apply(result, params);
        }
      })
      .catch((err) => {
        if (id === this.issued && id > this.applied) {
          this.applied = id;
          this.onError(err, params);
        }
      })
      .finally(() => {
        this.inFlight.delete(task);
      });
    this.inFlight.add(task);
  }
}
