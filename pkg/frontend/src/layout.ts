/** Layered layout for the decision graph.
 *
 * Pure geometry: assign each node the longest-path depth implied by the
 * union of temporal and dependency edges, then spread the members of each
 * layer evenly. Cycles cannot occur (temporal edges form a chain and
 * dependency edges point at later-used decisions), but a defensive check
 * keeps a malformed payload from hanging the layout.
 */

export interface Positioned {
  name: string;
  layer: number;
  x: number;
  y: number;
}

export interface LayoutOptions {
  width: number;
  height: number;
  marginX?: number;
  marginY?: number;
}

export function layerAssignment(
  names: string[],
  edges: [string, string][],
): Map<string, number> {
  const layer = new Map<string, number>(names.map((n) => [n, 0]));
  const relevant = edges.filter(
    ([a, b]) => layer.has(a) && layer.has(b) && a !== b,
  );
  // longest-path layering by relaxation; |V| passes suffice for a DAG
  for (let pass = 0; pass < names.length + 1; pass++) {
    let changed = false;
    for (const [a, b] of relevant) {
      const want = layer.get(a)! + 1;
      if (layer.get(b)! < want) {
        layer.set(b, want);
        changed = true;
      }
    }
    if (!changed) return layer;
  }
  throw new Error("decision graph contains a cycle");
}

export function layeredLayout(
  names: string[],
  edges: [string, string][],
  opts: LayoutOptions,
): Positioned[] {
  const marginX = opts.marginX ?? 40;
  const marginY = opts.marginY ?? 30;
  const layers = layerAssignment(names, edges);
  const maxLayer = Math.max(0, ...layers.values());
  const byLayer = new Map<number, string[]>();
  for (const name of names) {
    const l = layers.get(name)!;
    if (!byLayer.has(l)) byLayer.set(l, []);
    byLayer.get(l)!.push(name);
  }
  const span = Math.max(1, opts.width - 2 * marginX);
  const out: Positioned[] = [];
  for (const name of names) {
    const l = layers.get(name)!;
    const peers = byLayer.get(l)!;
    const idx = peers.indexOf(name);
    const x = marginX + (maxLayer === 0 ? span / 2 : (l / maxLayer) * span);
    const y =
      marginY +
      ((idx + 1) / (peers.length + 1)) * Math.max(1, opts.height - 2 * marginY);
    out.push({ name, layer: l, x, y });
  }
  return out;
}
