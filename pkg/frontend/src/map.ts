import { TweetRecord } from "./types.js";

const WIDTH = 480;
const HEIGHT = 360;
const SVG_NS = "http://www.w3.org/2000/svg";

/** Scatter the passing tweets on a plain lat/lon plane. Real tiles can be
 * layered underneath later; the contract here is one marker per record. */
export function renderMap(
  container: HTMLElement,
  records: TweetRecord[],
  onSelect?: (tweetId: string) => void,
): void {
  container.innerHTML = "";
  const located = records.filter((r) => r.lat !== undefined && r.lon !== undefined);
  if (located.length === 0) {
    const empty = document.createElement("p");
    empty.className = "map-empty";
    empty.textContent = "no located tweets pass the current thresholds";
    container.appendChild(empty);
    return;
  }

  const lats = located.map((r) => r.lat as number);
  const lons = located.map((r) => r.lon as number);
  const latMin = Math.min(...lats);
  const latMax = Math.max(...lats);
  const lonMin = Math.min(...lons);
  const lonMax = Math.max(...lons);
  const latSpan = latMax - latMin || 1;
  const lonSpan = lonMax - lonMin || 1;

  const svg = document.createElementNS(SVG_NS, "svg");
  svg.setAttribute("viewBox", `0 0 ${WIDTH} ${HEIGHT}`);
  svg.setAttribute("class", "tweet-map");

  for (const r of located) {
    const cx = ((r.lon as number) - lonMin) / lonSpan * (WIDTH - 12) + 6;
    const cy = HEIGHT - (((r.lat as number) - latMin) / latSpan * (HEIGHT - 12) + 6);
    const dot = document.createElementNS(SVG_NS, "circle");
    dot.setAttribute("cx", String(cx));
    dot.setAttribute("cy", String(cy));
    dot.setAttribute("r", "4");
    dot.setAttribute("class", "tweet-marker");
    dot.setAttribute("data-tweet-id", r.tweet_id);
    if (onSelect) {
      dot.addEventListener("click", () => onSelect(r.tweet_id));
    }
    svg.appendChild(dot);
  }
  container.appendChild(svg);
}
