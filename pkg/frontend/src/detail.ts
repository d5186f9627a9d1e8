import { AXES, TweetDetail } from "./types.js";

const TAG_ORDER = ["Flooding", "Windy", "Destruction"];

function row(className: string, label: string, value: string): HTMLElement {
  const div = document.createElement("div");
  div.className = className;
  const name = document.createElement("span");
  name.className = "label";
  name.textContent = label;
  const val = document.createElement("span");
  val.className = "value";
  val.textContent = value;
  div.append(name, val);
  return div;
}

/** Fill the side panel for one tweet: text, author stats, the four scores,
 * tag probability bars, and the map context. Null clears the panel. */
export function renderDetail(container: HTMLElement, detail: TweetDetail | null): void {
  container.innerHTML = "";
  if (detail === null) return;

  const title = document.createElement("h3");
  title.textContent = detail.tweet_id;
  container.appendChild(title);

  if (detail.text !== undefined) {
    const text = document.createElement("p");
    text.className = "tweet-text";
    text.textContent = detail.text;
    container.appendChild(text);
  }

  const scores = document.createElement("div");
  scores.className = "scores";
  for (const axis of AXES) {
    scores.appendChild(row(`score score-${axis}`, axis, detail.scores[axis].toFixed(2)));
  }
  container.appendChild(scores);

  if (detail.has_media === false || detail.scores.image === 0) {
    const badge = document.createElement("span");
    badge.className = "badge no-media";
    badge.textContent = "no media";
    container.appendChild(badge);
  }

  const tags = document.createElement("div");
  tags.className = "tags";
  for (const tag of TAG_ORDER) {
    const p = detail.tags[tag];
    if (p === undefined) continue;
    const wrap = document.createElement("div");
    wrap.className = `tag tag-${tag.toLowerCase()}`;
    const label = document.createElement("span");
    label.textContent = `${tag} ${(p * 100).toFixed(0)}%`;
    const bar = document.createElement("div");
    bar.className = "tag-bar";
    bar.style.width = `${(p * 100).toFixed(1)}%`;
    wrap.append(label, bar);
    tags.appendChild(wrap);
  }
  container.appendChild(tags);

  if (detail.author) {
    const a = detail.author;
    container.appendChild(
      row("author", a.user_id,
          `${a.followers_count} followers, ${a.statuses_count} tweets` +
          (a.verified ? ", verified" : "")),
    );
  }

  if (detail.map_context) {
    const ctx = document.createElement("div");
    ctx.className = "map-context";
    ctx.appendChild(row("address", "address", detail.map_context.address));
    const tile = document.createElement("img");
    tile.className = "tile";
    tile.setAttribute("data-src", detail.map_context.tile);
    tile.alt = detail.map_context.address;
    ctx.appendChild(tile);
    container.appendChild(ctx);
  }
}
