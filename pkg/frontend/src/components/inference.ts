/** Inference panel: pick a mode and weighting, enter inference, and show
 * the resulting aggregate densities and per-universe null intervals.
 * Entering is one-way — on success (or on a 423 from a racing request) the
 * session state disables every exploration control. */

import { select } from "d3-selection";
import { scaleLinear } from "d3-scale";
import { line } from "d3-shape";

import type { ApiClient, Density, InferenceBundle } from "../api";
import { SessionState } from "../state";

export interface InferencePanel {
  root: HTMLElement;
  enterButton: HTMLButtonElement;
  modeSelect: HTMLSelectElement;
  weightingSelect: HTMLSelectElement;
  /** Resolves with the inference bundle once entered. */
  enter(): Promise<InferenceBundle | null>;
}

function drawDensityPair(
  host: HTMLElement,
  observed: Density,
  nullDensity: Density | undefined,
  nullLine: number | undefined,
  width = 640,
  height = 140,
): void {
  const allGrid = [...observed.grid, ...(nullDensity?.grid ?? [])];
  const x = scaleLinear()
    .domain([Math.min(...allGrid), Math.max(...allGrid)])
    .range([20, width - 20]);
  const maxVal = Math.max(
    ...observed.values,
    ...(nullDensity?.values ?? [0]),
  );
  const y = scaleLinear().domain([0, maxVal || 1]).range([height - 20, 10]);
  const path = line<[number, number]>()
    .x((d) => x(d[0]))
    .y((d) => y(d[1]));

  const svg = select(host)
    .append("svg")
    .attr("class", "inference-densities")
    .attr("width", width)
    .attr("height", height);
  const pairs = (d: Density) =>
    d.grid.map((g, i) => [g, d.values[i]] as [number, number]);
  svg
    .append("path")
    .attr("class", "observed-curve")
    .attr("d", path(pairs(observed)));
  if (nullDensity) {
    svg
      .append("path")
      .attr("class", "null-curve")
      .attr("d", path(pairs(nullDensity)));
  }
  if (nullLine !== undefined) {
    svg
      .append("line")
      .attr("class", "null-line")
      .attr("x1", x(nullLine))
      .attr("x2", x(nullLine))
      .attr("y1", 10)
      .attr("y2", height - 20);
  }
}

export function renderInferencePanel(
  container: HTMLElement,
  client: ApiClient,
  state: SessionState,
): InferencePanel {
  container.replaceChildren();
  const root = document.createElement("div");
  root.className = "inference-panel";
  container.appendChild(root);

  const form = document.createElement("div");
  form.className = "inference-form";
  const modeSelect = document.createElement("select");
  modeSelect.className = "inference-mode";
  for (const mode of ["simple", "null"]) {
    const opt = document.createElement("option");
    opt.value = mode;
    opt.textContent = mode === "null" ? "permutation null" : "simple (zero line)";
    modeSelect.appendChild(opt);
  }
  const weightingSelect = document.createElement("select");
  weightingSelect.className = "inference-weighting";
  for (const w of ["none", "prune", "stacking"]) {
    const opt = document.createElement("option");
    opt.value = w;
    opt.textContent = w;
    weightingSelect.appendChild(opt);
  }
  const enterButton = document.createElement("button");
  enterButton.className = "enter-inference";
  enterButton.textContent = "Enter inference";
  form.append(modeSelect, weightingSelect, enterButton);
  root.appendChild(form);

  const output = document.createElement("div");
  output.className = "inference-output";
  root.appendChild(output);

  const showBundle = (bundle: InferenceBundle) => {
    output.replaceChildren();
    drawDensityPair(
      output,
      bundle.observed_density,
      bundle.null_density,
      bundle.null_line,
    );
    const summary = document.createElement("p");
    summary.className = "inference-summary";
    if (bundle.intervals) {
      summary.textContent =
        `${bundle.outside_count} of ${bundle.intervals.length} universes ` +
        `fall outside their 95% null intervals; mean distance ` +
        `${bundle.mean_distance?.toFixed(3)} vs spread ${bundle.spread?.toFixed(3)}.`;
    } else {
      summary.textContent =
        `Aggregate of ${bundle.included.length} universes; ` +
        `mean ${bundle.observed_mean.toFixed(3)} against a null line at 0.`;
    }
    output.appendChild(summary);
    if (bundle.intervals) {
      const listing = document.createElement("ul");
      listing.className = "interval-list";
      for (const it of bundle.intervals) {
        const li = document.createElement("li");
        li.dataset.uid = String(it.uid);
        li.className = it.outside ? "outside" : "inside";
        li.textContent = `universe ${it.uid}: ${it.estimate.toFixed(3)} in ` +
          `[${it.lo.toFixed(3)}, ${it.hi.toFixed(3)}]`;
        listing.appendChild(li);
      }
      output.appendChild(listing);
    }
  };

  const enter = async (): Promise<InferenceBundle | null> => {
    enterButton.disabled = true;
    try {
      const bundle = await client.inference(
        modeSelect.value as "null" | "simple",
        weightingSelect.value as "none" | "prune" | "stacking",
      );
      state.enterInference();
      showBundle(bundle);
      return bundle;
    } catch (err) {
      state.absorbError(err);
      enterButton.disabled = state.locked;
      const note = document.createElement("p");
      note.className = "inference-error";
      note.textContent = err instanceof Error ? err.message : String(err);
      output.replaceChildren(note);
      return null;
    }
  };

  enterButton.addEventListener("click", () => {
    void enter();
  });

  return { root, enterButton, modeSelect, weightingSelect, enter };
}
