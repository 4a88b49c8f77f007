/** Typed client for the explorer's HTTP API.
 *
 * The server is the single source of truth for the analysis session: a 423
 * response means the session has entered the inference stage and exploration
 * is locked, which callers surface through {@link LockedError}.
 */

export class ApiError extends Error {
  constructor(public status: number, message: string) {
    super(message);
    this.name = "ApiError";
  }
}

export class LockedError extends ApiError {
  constructor(message: string) {
    super(423, message);
    this.name = "LockedError";
  }
}

export interface GraphNode {
  name: string;
  kind: "placeholder" | "block";
  options: string[];
  cardinality: number;
  sensitivity: number | null | "inf";
}

export interface GraphResponse {
  nodes: GraphNode[];
  temporal_edges: [string, string][];
  dependency_edges: [string, string][];
  score_min: number | null;
  score_max: number | null;
  method: "ks" | "f";
}

export interface Outcome {
  uid: number;
  estimate: number | null;
  p: number | null;
  fit: number | null;
  status: "ok" | "failed" | "timeout";
}

export interface Density {
  grid: number[];
  values: number[];
  scale_factor: number;
}

export interface CurvesResponse {
  kind: "pdf" | "cdf";
  curves: { uid: number; grid: number[]; values: number[] }[];
  estimates: { uid: number; estimate: number }[];
}

export interface FacetGroup {
  key: Record<string, string>;
  uids: number[];
  estimates: number[];
}

export interface FacetResponse {
  d1: string;
  d2: string | null;
  groups: FacetGroup[];
}

export interface UniverseDetail {
  uid: number;
  estimate: number | null;
  p: number | null;
  fit: number | null;
  status: string;
  assignment: Record<string, string>;
  observed: number[];
  predicted: number[];
  quantile_sampled: boolean;
  has_draws: boolean;
  similar: number[];
}

export interface SensitivityEntry {
  name: string;
  method: "ks" | "f";
  score: number | null | "inf";
  group_sizes: Record<string, number>;
}

export interface OptionRatio {
  decision: string;
  option: string;
  fraction: number;
  baseline: number;
  dominant: boolean;
}

export interface BrushResponse {
  uids: number[];
  ratios: OptionRatio[];
}

export interface PruneResponse {
  cutoff: number;
  kept: number[];
  missing_fit: number[];
  empty: boolean;
}

export interface NullIntervalEntry {
  uid: number;
  lo: number;
  hi: number;
  estimate: number;
  outside: boolean;
}

export interface InferenceBundle {
  mode: "null" | "simple";
  weighting: "none" | "prune" | "stacking";
  included: number[];
  observed_density: Density;
  observed_mean: number;
  observed_spread: number;
  stacking: { weights: Record<string, number>; objective: number } | null;
  null_line?: number;
  null_density?: Density;
  null_mean?: number;
  mean_distance?: number;
  spread?: number;
  intervals?: NullIntervalEntry[];
  outside_count?: number;
  skipped?: number[];
}

export class ApiClient {
  constructor(private base: string = "") {}

  private async request<T>(path: string, init?: RequestInit): Promise<T> {
    const resp = await fetch(this.base + path, init);
    if (!resp.ok) {
      let detail = resp.statusText;
      try {
        detail = (await resp.json()).detail ?? detail;
      } catch {
        /* non-JSON error body */
      }
      if (resp.status === 423) throw new LockedError(detail);
      throw new ApiError(resp.status, detail);
    }
    return (await resp.json()) as T;
  }

  private post<T>(path: string, body: unknown): Promise<T> {
    return this.request<T>(path, {
      method: "POST",
      headers: { "content-type": "application/json" },
      body: JSON.stringify(body),
    });
  }

  graph(method?: "ks" | "f"): Promise<GraphResponse> {
    const q = method ? `?method=${method}` : "";
    return this.request(`/api/graph${q}`);
  }

  outcomes(): Promise<Outcome[]> {
    return this.request("/api/outcomes");
  }

  density(source: "draws" | "estimates" = "draws"): Promise<Density> {
    return this.request(`/api/density?source=${source}`);
  }

  curves(kind: "pdf" | "cdf" = "pdf"): Promise<CurvesResponse> {
    return this.request(`/api/curves?kind=${kind}`);
  }

  facet(d1: string, d2?: string): Promise<FacetResponse> {
    const q = d2 ? `&d2=${encodeURIComponent(d2)}` : "";
    return this.request(`/api/facet?d1=${encodeURIComponent(d1)}${q}`);
  }

  universe(uid: number, k = 5): Promise<UniverseDetail> {
    return this.request(`/api/universe/${uid}?k=${k}`);
  }

  sensitivity(method?: "ks" | "f"): Promise<SensitivityEntry[]> {
    const q = method ? `?method=${method}` : "";
    return this.request(`/api/sensitivity${q}`);
  }

  brush(
    lo: number,
    hi: number,
    facet?: Record<string, string>,
  ): Promise<BrushResponse> {
    return this.post("/api/brush", { lo, hi, ...(facet ? { facet } : {}) });
  }

  prune(cutoff: number): Promise<PruneResponse> {
    return this.post("/api/prune", { cutoff });
  }

  inference(
    mode: "null" | "simple" = "simple",
    weighting: "none" | "prune" | "stacking" = "none",
  ): Promise<InferenceBundle> {
    return this.post("/api/inference", { mode, weighting });
  }
}
