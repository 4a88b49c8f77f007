/** Outcome view: every universe's point estimate as a dot on a shared axis,
 * with the aggregate density as an area chart behind it and a draggable
 * horizontal brush that reports the selected estimate range. */

import { select } from "d3-selection";
import { scaleLinear } from "d3-scale";
import { area, curveBasis } from "d3-shape";

import type { Density, Outcome } from "../api";

export interface DotPlotHandlers {
  onBrush(lo: number, hi: number): void;
}

export interface DotPlot {
  svg: SVGSVGElement;
  /** Estimate range of the current brush, or null when cleared. */
  selection: () => [number, number] | null;
  /** Programmatic brushing in estimate units (also fires onBrush). */
  brushRange(lo: number, hi: number): void;
  highlight(uids: number[]): void;
}

export function renderDotPlot(
  container: HTMLElement,
  outcomes: Outcome[],
  density: Density | null,
  handlers: DotPlotHandlers,
  width = 640,
  height = 180,
): DotPlot {
  container.replaceChildren();
  const margin = { top: 10, right: 20, bottom: 24, left: 20 };
  const innerW = width - margin.left - margin.right;
  const innerH = height - margin.top - margin.bottom;

  const ests = outcomes
    .filter((o) => o.estimate !== null)
    .map((o) => ({ uid: o.uid, estimate: o.estimate as number }));
  const xs = ests.map((e) => e.estimate);
  const gridExtent = density
    ? [density.grid[0], density.grid[density.grid.length - 1]]
    : [Math.min(...xs), Math.max(...xs)];
  const x = scaleLinear()
    .domain([
      Math.min(gridExtent[0], ...xs),
      Math.max(gridExtent[1], ...xs),
    ])
    .range([0, innerW])
    .nice();

  const svg = select(container)
    .append("svg")
    .attr("class", "dot-plot")
    .attr("width", width)
    .attr("height", height);
  const g = svg
    .append("g")
    .attr("transform", `translate(${margin.left},${margin.top})`);

  if (density) {
    const y = scaleLinear()
      .domain([0, Math.max(...density.values) || 1])
      .range([innerH, 0]);
    const shape = area<[number, number]>()
      .x((d) => x(d[0]))
      .y0(innerH)
      .y1((d) => y(d[1]))
      .curve(curveBasis);
    const pairs = density.grid.map(
      (gx, i) => [gx, density.values[i]] as [number, number],
    );
    g.append("path").attr("class", "density-area").attr("d", shape(pairs));
  }

  // deterministic vertical jitter keeps overlapping estimates visible
  const dots = g.append("g").attr("class", "dots");
  ests.forEach((e, i) => {
    dots
      .append("circle")
      .attr("class", "universe-dot")
      .attr("data-uid", e.uid)
      .attr("cx", x(e.estimate))
      .attr("cy", innerH - 8 - (i % 5) * 6)
      .attr("r", 4);
  });

  const axis = g.append("g").attr("transform", `translate(0,${innerH})`);
  axis.append("line").attr("class", "axis-line").attr("x2", innerW);
  for (const t of x.ticks(6)) {
    const tick = axis
      .append("g")
      .attr("transform", `translate(${x(t)},0)`);
    tick.append("line").attr("y2", 5).attr("class", "axis-line");
    tick
      .append("text")
      .attr("y", 18)
      .attr("text-anchor", "middle")
      .text(String(t));
  }

  const brushRect = g
    .append("rect")
    .attr("class", "brush-selection")
    .attr("y", 0)
    .attr("height", innerH)
    .attr("display", "none");

  let current: [number, number] | null = null;

  const applyPixels = (px0: number, px1: number) => {
    const [a, b] = px0 <= px1 ? [px0, px1] : [px1, px0];
    brushRect
      .attr("display", null)
      .attr("x", a)
      .attr("width", Math.max(1, b - a));
    current = [x.invert(a), x.invert(b)];
    handlers.onBrush(current[0], current[1]);
  };

  const overlay = g
    .append("rect")
    .attr("class", "brush-overlay")
    .attr("width", innerW)
    .attr("height", innerH)
    .attr("fill", "transparent");

  let anchor: number | null = null;
  const toLocal = (ev: MouseEvent) => {
    const rect = (svg.node() as SVGSVGElement).getBoundingClientRect();
    return ev.clientX - rect.left - margin.left;
  };
  overlay.on("mousedown", (ev: MouseEvent) => {
    anchor = toLocal(ev);
  });
  overlay.on("mousemove", (ev: MouseEvent) => {
    if (anchor !== null) applyPixels(anchor, toLocal(ev));
  });
  overlay.on("mouseup", (ev: MouseEvent) => {
    if (anchor !== null) applyPixels(anchor, toLocal(ev));
    anchor = null;
  });

  const highlight = (uids: number[]) => {
    const keep = new Set(uids);
    dots.selectAll<SVGCircleElement, unknown>("circle").each(function () {
      const uid = Number(this.getAttribute("data-uid"));
      this.classList.toggle("brushed", keep.has(uid));
    });
  };

  return {
    svg: svg.node() as SVGSVGElement,
    selection: () => current,
    brushRange(lo: number, hi: number) {
      applyPixels(x(lo), x(hi));
    },
    highlight,
  };
}
