/** Option-ratio bars: for each decision, the share of each option inside the
 * brushed subset, with a tick at the full-multiverse baseline. Options whose
 * share exceeds their baseline are flagged as dominant. */

import type { OptionRatio } from "../api";

export function renderRatioBars(
  container: HTMLElement,
  ratios: OptionRatio[],
  barWidth = 260,
): HTMLElement {
  container.replaceChildren();
  const root = document.createElement("div");
  root.className = "ratio-bars";
  container.appendChild(root);

  const byDecision = new Map<string, OptionRatio[]>();
  for (const r of ratios) {
    if (!byDecision.has(r.decision)) byDecision.set(r.decision, []);
    byDecision.get(r.decision)!.push(r);
  }

  for (const [decision, rows] of byDecision) {
    const block = document.createElement("div");
    block.className = "ratio-decision";
    block.dataset.decision = decision;
    const title = document.createElement("div");
    title.className = "ratio-title";
    title.textContent = decision;
    block.appendChild(title);

    for (const row of rows) {
      const line = document.createElement("div");
      line.className = "ratio-row" + (row.dominant ? " dominant" : "");
      line.dataset.option = row.option;
      line.dataset.fraction = row.fraction.toFixed(6);
      line.dataset.baseline = row.baseline.toFixed(6);

      const label = document.createElement("span");
      label.className = "ratio-label";
      label.textContent = row.option;

      const track = document.createElement("span");
      track.className = "ratio-track";
      track.style.width = `${barWidth}px`;

      const fill = document.createElement("span");
      fill.className = "ratio-fill";
      fill.style.width = `${Math.round(row.fraction * barWidth)}px`;

      const baseline = document.createElement("span");
      baseline.className = "ratio-baseline";
      baseline.style.left = `${Math.round(row.baseline * barWidth)}px`;

      const pct = document.createElement("span");
      pct.className = "ratio-pct";
      pct.textContent = `${(row.fraction * 100).toFixed(0)}%`;

      track.append(fill, baseline);
      line.append(label, track, pct);
      block.appendChild(line);
    }
    root.appendChild(block);
  }
  return root;
}
