import { ApiClient } from "./api.js";
import { renderCdf } from "./cdf.js";
import { renderDetail } from "./detail.js";
import { renderMap } from "./map.js";
import { FilterStore } from "./state.js";
import { AXES, Axis, CdfPoint } from "./types.js";

/** Wire the store to the static page: four sliders, the preset button, the
 * result header, the map, per-axis CDF charts, and the detail panel. */
export function mountApp(root: Document, api: ApiClient): FilterStore {
  const store = new FilterStore(api);
  const cdfSeries = new Map<Axis, CdfPoint[]>();

  const header = root.getElementById("result-total") as HTMLElement;
  const banner = root.getElementById("error-banner") as HTMLElement;
  const mapEl = root.getElementById("map") as HTMLElement;
  const detailEl = root.getElementById("detail") as HTMLElement;

  for (const axis of AXES) {
    const slider = root.getElementById(`slider-${axis}`) as HTMLInputElement;
    slider.addEventListener("input", () => {
      store.setThreshold(axis, Number(slider.value));
    });
  }

  const preset = root.getElementById("preset") as HTMLButtonElement;
  preset.addEventListener("click", () => {
    void store.applyPreset();
  });

  store.subscribe((s) => {
    header.textContent = `${s.total} passing`;
    banner.textContent = s.error ?? "";
    banner.hidden = s.error === null;
    for (const axis of AXES) {
      const slider = root.getElementById(`slider-${axis}`) as HTMLInputElement;
      if (Number(slider.value) !== s.thresholds[axis]) {
        slider.value = String(s.thresholds[axis]);
      }
      const chart = root.getElementById(`cdf-${axis}`) as HTMLElement;
      renderCdf(chart, cdfSeries.get(axis) ?? [], s.thresholds[axis]);
    }
    renderMap(mapEl, s.records, (id) => {
      store.select(id);
      void api.detail(id).then((d) => renderDetail(detailEl, d));
    });
    if (s.selectedId === null) renderDetail(detailEl, null);
  });

  for (const axis of AXES) {
    void api.cdf(axis).then((res) => {
      cdfSeries.set(axis, res.points);
      const chart = root.getElementById(`cdf-${axis}`) as HTMLElement;
      renderCdf(chart, res.points, store.state().thresholds[axis]);
    });
  }
  void store.fetchNow();
  return store;
}
