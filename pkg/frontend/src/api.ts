import {
  Axis,
  CdfResponse,
  SnapshotMeta,
  Thresholds,
  TweetDetail,
  TweetsResponse,
} from "./types.js";

export type FetchLike = (url: string) => Promise<{
  ok: boolean;
  status: number;
  json(): Promise<unknown>;
}>;

/** Thin typed client over the scoring service. The fetch implementation is
 * injectable so tests can serve canned snapshots. */
export class ApiClient {
  constructor(
    private readonly baseUrl: string,
    private readonly fetchFn: FetchLike = (url) => fetch(url),
  ) {}

  private async get<T>(path: string): Promise<T> {
    const res = await this.fetchFn(this.baseUrl + path);
    if (!res.ok) {
      throw new Error(`GET ${path} failed with status ${res.status}`);
    }
    return (await res.json()) as T;
  }

  meta(): Promise<SnapshotMeta> {
    return this.get("/snapshot/meta");
  }

  tweets(t: Thresholds, page = 0, pageSize = 200): Promise<TweetsResponse> {
    const q = new URLSearchParams({
      geo_min: String(t.geo),
      text_min: String(t.text),
      user_min: String(t.user),
      image_min: String(t.image),
      page: String(page),
      page_size: String(pageSize),
    });
    return this.get(`/tweets?${q.toString()}`);
  }

  cdf(axis: Axis): Promise<CdfResponse> {
    return this.get(`/cdf?axis=${axis}`);
  }

  detail(tweetId: string): Promise<TweetDetail> {
    return this.get(`/tweet/${encodeURIComponent(tweetId)}`);
  }
}
