import { ApiClient } from "./api.js";
import { Axis, PRESET, Thresholds, TweetRecord } from "./types.js";

export const DEBOUNCE_MS = 250;

export function clamp(v: number): number {
  if (Number.isNaN(v)) return 0;
  return Math.min(100, Math.max(0, v));
}

export interface ViewState {
  thresholds: Thresholds;
  records: TweetRecord[];
  total: number;
  snapshotVersion: number;
  selectedId: string | null;
  error: string | null;
  pending: boolean;
}

type Listener = (s: ViewState) => void;

/** Slider state plus the single source of truth for filter results.
 *
 * Slider drags are debounced so at most one request goes out per 250 ms,
 * and responses are applied only if they belong to the newest request and
 * a snapshot at least as new as the one already displayed. */
export class FilterStore {
  private thresholds: Thresholds = { geo: 0, text: 0, user: 0, image: 0 };
  private records: TweetRecord[] = [];
  private total = 0;
  private snapshotVersion = 0;
  private selectedId: string | null = null;
  private error: string | null = null;
  private pending = false;

  private listeners: Listener[] = [];
  private timer: ReturnType<typeof setTimeout> | null = null;
  private seq = 0;
  private applied = 0;

  constructor(
    private readonly api: ApiClient,
    private readonly debounceMs: number = DEBOUNCE_MS,
  ) {}

  state(): ViewState {
    return {
      thresholds: { ...this.thresholds },
      records: this.records,
      total: this.total,
      snapshotVersion: this.snapshotVersion,
      selectedId: this.selectedId,
      error: this.error,
      pending: this.pending,
    };
  }

  subscribe(fn: Listener): () => void {
    this.listeners.push(fn);
    return () => {
      this.listeners = this.listeners.filter((l) => l !== fn);
    };
  }

  private notify(): void {
    const s = this.state();
    for (const fn of this.listeners) fn(s);
  }

  setThreshold(axis: Axis, value: number): void {
    this.thresholds = { ...this.thresholds, [axis]: clamp(value) };
    this.scheduleFetch();
    this.notify();
  }

  /** Jump straight to the recommended operating point. Bypasses the
   * debounce window: a button press is a deliberate single action. */
  applyPreset(): Promise<void> {
    this.thresholds = { ...PRESET };
    this.notify();
    return this.fetchNow();
  }

  select(tweetId: string | null): void {
    if (tweetId !== null && !this.records.some((r) => r.tweet_id === tweetId)) {
      tweetId = null;
    }
    this.selectedId = tweetId;
    this.notify();
  }

  private scheduleFetch(): void {
    if (this.timer !== null) clearTimeout(this.timer);
    this.timer = setTimeout(() => {
      this.timer = null;
      void this.fetchNow();
    }, this.debounceMs);
  }

  async fetchNow(): Promise<void> {
    const mySeq = ++this.seq;
    this.pending = true;
    this.notify();
    try {
      const res = await this.api.tweets(this.thresholds);
      // Discard stale responses: a newer request was issued meanwhile, or
      // the payload comes from an older snapshot than the one on screen.
      if (mySeq <= this.applied || res.snapshot_version < this.snapshotVersion) {
        return;
      }
      this.applied = mySeq;
      this.records = res.records;
      this.total = res.total;
      this.snapshotVersion = res.snapshot_version;
      if (this.selectedId !== null &&
          !this.records.some((r) => r.tweet_id === this.selectedId)) {
        this.selectedId = null;
      }
      this.error = null;
    } catch (e) {
      // Keep the previous results visible; surface the failure in a banner.
      this.error = e instanceof Error ? e.message : String(e);
    } finally {
      if (mySeq === this.seq) this.pending = false;
      this.notify();
    }
  }
}
