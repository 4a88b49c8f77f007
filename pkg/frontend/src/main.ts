/** Application shell: loads everything from the API, renders the views, and
 * wires node clicks -> trellis faceting, brushing -> option ratios, the
 * prune slider -> server-side prune, and the one-way inference flow. */

import { ApiClient } from "./api";
import { SessionState, disableable } from "./state";
import { renderGraphView } from "./components/graphview";
import { renderDotPlot, type DotPlot } from "./components/dotplot";
import { renderCurves } from "./components/curves";
import { renderTrellis } from "./components/trellis";
import { renderRatioBars } from "./components/ratios";
import { renderFitView } from "./components/fitview";
import { renderInferencePanel } from "./components/inference";

export interface App {
  state: SessionState;
  refreshFacet(decision: string): Promise<void>;
}

export async function bootstrap(
  root: HTMLElement,
  client: ApiClient = new ApiClient(),
): Promise<App> {
  const state = new SessionState();
  root.replaceChildren();

  const section = (title: string, cls: string): HTMLElement => {
    const el = document.createElement("section");
    el.className = cls;
    const h = document.createElement("h2");
    h.textContent = title;
    el.appendChild(h);
    const body = document.createElement("div");
    body.className = "section-body";
    el.appendChild(body);
    root.appendChild(el);
    return body;
  };

  const graphHost = section("Decisions", "section-graph");
  const outcomeHost = section("Outcomes", "section-outcomes");
  const curveHost = section("Uncertainty", "section-curves");
  const trellisHost = section("Facets", "section-trellis");
  const ratioHost = section("Option ratios", "section-ratios");
  const fitHost = section("Model fit", "section-fit");
  const inferenceHost = section("Inference", "section-inference");

  const [graph, outcomes, curves] = await Promise.all([
    client.graph(),
    client.outcomes(),
    client.curves("pdf"),
  ]);
  let density = null;
  try {
    density = await client.density("draws");
  } catch {
    try {
      density = await client.density("estimates");
    } catch {
      density = null;
    }
  }

  let dotPlot: DotPlot;
  const refreshRatios = async (lo: number, hi: number) => {
    try {
      const brush = await client.brush(lo, hi);
      dotPlot.highlight(brush.uids);
      renderRatioBars(ratioHost, brush.ratios);
    } catch (err) {
      state.absorbError(err);
    }
  };

  renderGraphView(graphHost, graph, {
    onSelect: (decision) => {
      if (!state.locked) void refreshFacet(decision);
    },
  });
  dotPlot = renderDotPlot(outcomeHost, outcomes, density, {
    onBrush: (lo, hi) => {
      if (!state.locked) void refreshRatios(lo, hi);
    },
  });
  renderCurves(curveHost, curves);

  const refreshFacet = async (decision: string) => {
    try {
      renderTrellis(trellisHost, await client.facet(decision));
    } catch (err) {
      state.absorbError(err);
    }
  };
  if (graph.nodes.length > 0) await refreshFacet(graph.nodes[0].name);

  const fitView = renderFitView(fitHost, outcomes, {
    onCutoff: (cutoff) => {
      if (!state.locked) {
        client.prune(cutoff).catch((err) => state.absorbError(err));
      }
    },
  });

  renderInferencePanel(inferenceHost, client, state);

  // exploration controls freeze permanently once inference is entered
  state.registerExplorationControl(disableable(fitView.slider));
  state.registerExplorationControl(disableable(graphHost));
  state.registerExplorationControl(disableable(outcomeHost));
  state.registerExplorationControl(disableable(trellisHost));
  state.registerExplorationControl(disableable(ratioHost));

  return { state, refreshFacet };
}

const mount = document.getElementById("app");
if (mount) {
  void bootstrap(mount);
}
