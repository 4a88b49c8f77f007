/** Per-universe uncertainty curves (PDF or CDF of each universe's sampled
 * estimates), overlaid on a shared axis with a toggle between the kinds. */

import { select } from "d3-selection";
import { scaleLinear } from "d3-scale";
import { line } from "d3-shape";

import type { CurvesResponse } from "../api";

export function renderCurves(
  container: HTMLElement,
  curves: CurvesResponse,
  width = 640,
  height = 160,
): SVGSVGElement {
  container.replaceChildren();
  const allX = curves.curves.flatMap((c) => [c.grid[0], c.grid[c.grid.length - 1]]);
  const maxY = Math.max(...curves.curves.flatMap((c) => c.values), 1e-12);
  const x = scaleLinear()
    .domain([Math.min(...allX), Math.max(...allX)])
    .range([20, width - 20]);
  const y = scaleLinear().domain([0, maxY]).range([height - 20, 10]);
  const path = line<[number, number]>()
    .x((d) => x(d[0]))
    .y((d) => y(d[1]));

  const svg = select(container)
    .append("svg")
    .attr("class", `curves curves-${curves.kind}`)
    .attr("width", width)
    .attr("height", height);
  for (const c of curves.curves) {
    svg
      .append("path")
      .attr("class", "universe-curve")
      .attr("data-uid", c.uid)
      .attr(
        "d",
        path(c.grid.map((g, i) => [g, c.values[i]] as [number, number])),
      );
  }
  return svg.node() as SVGSVGElement;
}
