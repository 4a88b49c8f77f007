/** Decision-graph view: one circle per decision, sized by option count and
 * shaded by sensitivity; solid gray edges for temporal order, dashed edges
 * for procedural dependencies. Clicking a node facets the outcome view. */

import { select } from "d3-selection";
import { scaleLinear, scaleSqrt } from "d3-scale";

import type { GraphResponse } from "../api";
import { layeredLayout } from "../layout";

export interface GraphViewHandlers {
  onSelect(decision: string): void;
}

export function renderGraphView(
  container: HTMLElement,
  graph: GraphResponse,
  handlers: GraphViewHandlers,
  width = 640,
  height = 240,
): SVGSVGElement {
  container.replaceChildren();
  const svg = select(container)
    .append("svg")
    .attr("class", "graph-view")
    .attr("width", width)
    .attr("height", height)
    .attr("viewBox", `0 0 ${width} ${height}`);

  const names = graph.nodes.map((n) => n.name);
  const edges = [...graph.temporal_edges, ...graph.dependency_edges];
  const positions = new Map(
    layeredLayout(names, edges, { width, height }).map((p) => [p.name, p]),
  );

  const radius = scaleSqrt()
    .domain([1, Math.max(2, ...graph.nodes.map((n) => n.cardinality))])
    .range([8, 22]);
  const lo = graph.score_min ?? 0;
  const hi = graph.score_max ?? 1;
  const shade = scaleLinear<number>()
    .domain(hi > lo ? [lo, hi] : [lo, lo + 1])
    .range([0.15, 0.95])
    .clamp(true);

  const edgeLayer = svg.append("g").attr("class", "edges");
  const drawEdge = (a: string, b: string, cls: string) => {
    const pa = positions.get(a);
    const pb = positions.get(b);
    if (!pa || !pb) return;
    edgeLayer
      .append("line")
      .attr("class", cls)
      .attr("x1", pa.x)
      .attr("y1", pa.y)
      .attr("x2", pb.x)
      .attr("y2", pb.y);
  };
  for (const [a, b] of graph.temporal_edges) drawEdge(a, b, "edge-temporal");
  for (const [a, b] of graph.dependency_edges) drawEdge(a, b, "edge-dependency");

  const nodeLayer = svg.append("g").attr("class", "nodes");
  for (const node of graph.nodes) {
    const p = positions.get(node.name)!;
    const score =
      node.sensitivity === "inf"
        ? hi
        : node.sensitivity === null
          ? lo
          : node.sensitivity;
    const g = nodeLayer
      .append("g")
      .attr("class", "graph-node")
      .attr("data-decision", node.name)
      .attr("transform", `translate(${p.x},${p.y})`);
    g.append("circle")
      .attr("r", radius(node.cardinality))
      .attr("fill-opacity", shade(score))
      .append("title")
      .text(
        `${node.name} (${node.cardinality} options), sensitivity ${
          node.sensitivity ?? "n/a"
        }`,
      );
    g.append("text")
      .attr("dy", radius(node.cardinality) + 12)
      .attr("text-anchor", "middle")
      .text(node.name);
    g.on("click", () => handlers.onSelect(node.name));
  }
  return svg.node() as SVGSVGElement;
}
