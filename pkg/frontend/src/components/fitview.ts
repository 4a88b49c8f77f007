/** Model-fit view: one dot per universe along a fit (NRMSE) axis with a
 * prune slider. Universes whose fit exceeds the cutoff are hidden; those
 * without a fit metric stay visible but are marked. */

import { select } from "d3-selection";
import { scaleLinear } from "d3-scale";

import type { Outcome } from "../api";

export interface FitViewHandlers {
  onCutoff(cutoff: number): void;
}

export interface FitView {
  root: HTMLElement;
  slider: HTMLInputElement;
  setCutoff(cutoff: number): void;
  hiddenUids(): number[];
}

export function renderFitView(
  container: HTMLElement,
  outcomes: Outcome[],
  handlers: FitViewHandlers,
  width = 640,
  height = 90,
): FitView {
  container.replaceChildren();
  const root = document.createElement("div");
  root.className = "fit-view";
  container.appendChild(root);

  const fits = outcomes.filter((o) => o.fit !== null).map((o) => o.fit as number);
  const maxFit = fits.length ? Math.max(...fits) : 1;
  const x = scaleLinear().domain([0, maxFit]).range([30, width - 20]).nice();

  const svg = select(root)
    .append("svg")
    .attr("width", width)
    .attr("height", height);
  svg
    .append("line")
    .attr("class", "axis-line")
    .attr("x1", x.range()[0])
    .attr("x2", x.range()[1])
    .attr("y1", height - 16)
    .attr("y2", height - 16);
  outcomes.forEach((o, i) => {
    if (o.fit === null) return;
    svg
      .append("circle")
      .attr("class", "fit-dot")
      .attr("data-uid", o.uid)
      .attr("data-fit", o.fit)
      .attr("cx", x(o.fit))
      .attr("cy", height - 26 - (i % 4) * 8)
      .attr("r", 4);
  });
  const cutoffLine = svg
    .append("line")
    .attr("class", "cutoff-line")
    .attr("y1", 4)
    .attr("y2", height - 16);

  const controls = document.createElement("div");
  controls.className = "fit-controls";
  const slider = document.createElement("input");
  slider.type = "range";
  slider.min = "0";
  slider.max = String(x.domain()[1]);
  slider.step = String(x.domain()[1] / 200 || 0.01);
  slider.value = slider.max;
  slider.className = "prune-slider";
  const readout = document.createElement("span");
  readout.className = "cutoff-readout";
  controls.append(slider, readout);
  root.appendChild(controls);

  const apply = (cutoff: number) => {
    readout.textContent = `fit ≤ ${cutoff.toFixed(3)}`;
    cutoffLine.attr("x1", x(cutoff)).attr("x2", x(cutoff));
    svg.selectAll<SVGCircleElement, unknown>("circle.fit-dot").each(function () {
      const fit = Number(this.getAttribute("data-fit"));
      this.classList.toggle("pruned", fit > cutoff);
    });
  };
  apply(Number(slider.value));

  slider.addEventListener("input", () => {
    const cutoff = Number(slider.value);
    apply(cutoff);
    handlers.onCutoff(cutoff);
  });

  const hiddenUids = () =>
    Array.from(root.querySelectorAll("circle.fit-dot.pruned")).map((el) =>
      Number(el.getAttribute("data-uid")),
    );

  return {
    root,
    slider,
    setCutoff(cutoff: number) {
      slider.value = String(cutoff);
      apply(cutoff);
      handlers.onCutoff(cutoff);
    },
    hiddenUids,
  };
}
