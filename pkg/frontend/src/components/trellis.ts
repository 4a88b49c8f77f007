/** Trellis view: one subplot per option of the faceting decision (or per
 * option pair for two decisions), each showing the estimates of the
 * universes in that cell as a strip of dots. */

import { select } from "d3-selection";
import { scaleLinear } from "d3-scale";

import type { FacetResponse } from "../api";

export function renderTrellis(
  container: HTMLElement,
  facet: FacetResponse,
  width = 640,
  subplotHeight = 70,
): HTMLElement {
  container.replaceChildren();
  const root = document.createElement("div");
  root.className = "trellis";
  root.dataset.d1 = facet.d1;
  if (facet.d2) root.dataset.d2 = facet.d2;
  container.appendChild(root);

  const all = facet.groups.flatMap((g) => g.estimates);
  const lo = Math.min(...all);
  const hi = Math.max(...all);
  const x = scaleLinear()
    .domain(lo < hi ? [lo, hi] : [lo - 1, lo + 1])
    .range([30, width - 20])
    .nice();

  for (const group of facet.groups) {
    const cell = document.createElement("div");
    cell.className = "trellis-cell";
    const label = Object.entries(group.key)
      .map(([d, opt]) => `${d} = ${opt || "(inactive)"}`)
      .join(", ");
    cell.dataset.key = label;

    const caption = document.createElement("div");
    caption.className = "trellis-caption";
    caption.textContent = `${label} — ${group.uids.length} universes`;
    cell.appendChild(caption);

    const svg = select(cell)
      .append("svg")
      .attr("width", width)
      .attr("height", subplotHeight);
    svg
      .append("line")
      .attr("class", "axis-line")
      .attr("x1", x.range()[0])
      .attr("x2", x.range()[1])
      .attr("y1", subplotHeight - 12)
      .attr("y2", subplotHeight - 12);
    group.estimates.forEach((est, i) => {
      svg
        .append("circle")
        .attr("class", "universe-dot")
        .attr("data-uid", group.uids[i])
        .attr("cx", x(est))
        .attr("cy", subplotHeight - 20 - (i % 4) * 8)
        .attr("r", 4);
    });
    root.appendChild(cell);
  }
  return root;
}
