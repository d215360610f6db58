// Typed client for the wirelay /v1 service. The UI never computes
// geometry or energy itself; everything displayed comes from these
// payloads.

export interface MeshPayload {
  vertices2d: [number, number][];
  faces: [number, number, number][];
  pieces: number[];
  boundaryEdges: [number, number][];
  bounds: { min: [number, number]; max: [number, number] };
  wd: number;
}

export interface HeatmapPayload {
  density: number[];
  binEdges: number[];
  logScale: boolean;
  variant: string;
}

export type TerminalEntry =
  | { vertex: number }
  | { face: number; bary: [number, number, number] };

export interface TreePayload {
  edges: number[];
  edgeVertices: [number, number][];
  weight: number;
  length: number;
  terminals: number[];
  solverKind: string;
}

export interface SegmentPayload {
  type: "line" | "arc";
  p0?: [number, number];
  p1?: [number, number];
  center?: [number, number];
  radius?: number;
  startAngle?: number;
  sweep?: number;
}

export interface MetricsPayload {
  deformationEnergy: number;
  maxElongationRate: number;
  avgElongationRate: number;
  totalLength: number;
  perSequence: { name: string; max: number; avg: number }[];
}

export interface SolvePayload {
  solveId: string;
  baseline: boolean;
  eta: number;
  tree: TreePayload;
  layout: { wd: number; smoothedBranches: { segments: SegmentPayload[] }[] };
  metrics: MetricsPayload;
}

export interface HealthPayload {
  status: string;
  fieldReady: boolean;
  fieldError: string | null;
}

export class ApiError extends Error {
  constructor(public status: number, message: string) {
    super(message);
  }
}

export class WirelayClient {
  constructor(private baseUrl: string, public session: string = "default") {}

  private url(path: string, withSession = false): string {
    const u = `${this.baseUrl}${path}`;
    return withSession ? `${u}?session=${encodeURIComponent(this.session)}` : u;
  }

  private async handle<T>(resp: Response): Promise<T> {
    const text = await resp.text();
    if (!resp.ok) {
      let detail = text;
      try {
        detail = (JSON.parse(text) as { error?: string }).error ?? text;
      } catch {
        // non-JSON error body, keep raw text
      }
      throw new ApiError(resp.status, detail);
    }
    return JSON.parse(text) as T;
  }

  health(): Promise<HealthPayload> {
    return fetch(this.url("/v1/health")).then((r) => this.handle<HealthPayload>(r));
  }

  mesh(): Promise<MeshPayload> {
    return fetch(this.url("/v1/mesh")).then((r) => this.handle<MeshPayload>(r));
  }

  heatmap(): Promise<HeatmapPayload> {
    return fetch(this.url("/v1/heatmap")).then((r) => this.handle<HeatmapPayload>(r));
  }

  setTerminals(terminals: TerminalEntry[]): Promise<{ count: number }> {
    return fetch(this.url("/v1/terminals", true), {
      method: "POST",
      headers: { "Content-Type": "application/json" },
      body: JSON.stringify({ terminals }),
    }).then((r) => this.handle<{ count: number }>(r));
  }

  solve(options: { baseline?: boolean; eta?: number | "auto" } = {}): Promise<SolvePayload> {
    return fetch(this.url("/v1/solve", true), {
      method: "POST",
      headers: { "Content-Type": "application/json" },
      body: JSON.stringify(options),
    }).then((r) => this.handle<SolvePayload>(r));
  }
}
