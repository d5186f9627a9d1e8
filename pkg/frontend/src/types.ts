export const AXES = ["geo", "text", "user", "image"] as const;
export type Axis = (typeof AXES)[number];

export interface Thresholds {
  geo: number;
  text: number;
  user: number;
  image: number;
}

/** The paper-recommended operating point: 50 geo, 30 text, 85 user, 85 image. */
export const PRESET: Thresholds = { geo: 50, text: 30, user: 85, image: 85 };

export interface TweetRecord {
  tweet_id: string;
  geo: number;
  text: number;
  user: number;
  image: number;
  tags: Record<string, number>;
  created_at?: number;
  lat?: number;
  lon?: number;
  has_media?: boolean;
}

export interface TweetsResponse {
  total: number;
  page: number;
  page_size: number;
  snapshot_version: number;
  records: TweetRecord[];
}

export interface CdfPoint {
  threshold: number;
  fraction: number;
}

export interface CdfResponse {
  axis: Axis;
  points: CdfPoint[];
}

export interface MapContext {
  address: string;
  tile: string;
  street_view: string | null;
}

export interface TweetDetail {
  tweet_id: string;
  scores: Thresholds;
  tags: Record<string, number>;
  text?: string;
  created_at?: number;
  has_media?: boolean;
  author?: {
    user_id: string;
    followers_count: number;
    friends_count: number;
    statuses_count: number;
    verified: boolean;
  };
  map_context?: MapContext;
}

export interface SnapshotMeta {
  version: number;
  total: number;
  hash: string;
}
