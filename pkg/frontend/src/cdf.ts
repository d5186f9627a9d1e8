import { CdfPoint } from "./types.js";

const WIDTH = 320;
const HEIGHT = 120;
const SVG_NS = "http://www.w3.org/2000/svg";

function x(threshold: number): number {
  return (threshold / 100) * WIDTH;
}

function y(fraction: number): number {
  return HEIGHT - fraction * HEIGHT;
}

/** Draw one axis' pass-rate curve with a marker at the slider position.
 * The curve is monotone non-increasing by construction server-side. */
export function renderCdf(
  container: HTMLElement,
  points: CdfPoint[],
  sliderValue: number,
): void {
  container.innerHTML = "";
  if (points.length === 0) {
    const empty = document.createElement("p");
    empty.className = "cdf-empty";
    empty.textContent = "no data in snapshot";
    container.appendChild(empty);
    return;
  }

  const svg = document.createElementNS(SVG_NS, "svg");
  svg.setAttribute("viewBox", `0 0 ${WIDTH} ${HEIGHT}`);
  svg.setAttribute("class", "cdf-chart");

  const path = document.createElementNS(SVG_NS, "polyline");
  path.setAttribute(
    "points",
    points.map((p) => `${x(p.threshold)},${y(p.fraction)}`).join(" "),
  );
  path.setAttribute("class", "cdf-curve");
  path.setAttribute("fill", "none");
  svg.appendChild(path);

  const marker = document.createElementNS(SVG_NS, "line");
  marker.setAttribute("x1", String(x(sliderValue)));
  marker.setAttribute("x2", String(x(sliderValue)));
  marker.setAttribute("y1", "0");
  marker.setAttribute("y2", String(HEIGHT));
  marker.setAttribute("class", "cdf-marker");
  svg.appendChild(marker);

  container.appendChild(svg);
}
