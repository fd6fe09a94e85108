/** Thin typed client over the read-only explorer HTTP API. */

export interface ComponentsResponse {
  count: number;
  eigenvalues: number[];
}

export interface LatentRow {
  id: string;
  x: number | null;
  y: number | null;
  values: number[];
}

export interface ExtremeEntry {
  id: string;
  value: number;
  image_url: string;
}

export interface ExtremesResponse {
  component: number;
  lowest: ExtremeEntry[];
  highest: ExtremeEntry[];
}

export interface MapPoint {
  id: string;
  x: number;
  y: number;
  value: number;
}

export interface MapResponse {
  component: number;
  points: MapPoint[];
}

export interface HealthResponse {
  status: string;
  version: string;
  items: number;
  components: number;
}

export type FetchLike = (
  input: string,
  init?: RequestInit,
) => Promise<Response>;

export class ApiError extends Error {
  constructor(
    readonly status: number,
    message: string,
  ) {
    super(message);
  }
}

export class ApiClient {
  constructor(
    private readonly base: string = "",
    private readonly fetchImpl: FetchLike = (u, i) => fetch(u, i),
  ) {}

  private async getJson<T>(path: string): Promise<T> {
    const res = await this.fetchImpl(this.base + path);
    if (!res.ok) throw new ApiError(res.status, `GET ${path} -> ${res.status}`);
    return (await res.json()) as T;
  }

  health(): Promise<HealthResponse> {
    return this.getJson("/api/health");
  }

  components(): Promise<ComponentsResponse> {
    return this.getJson("/api/components");
  }

  latents(limit: number): Promise<{ rows: LatentRow[] }> {
    return this.getJson(`/api/latents?limit=${limit}`);
  }

  extremes(k: number, n: number): Promise<ExtremesResponse> {
    return this.getJson(`/api/extremes/${k}?n=${n}`);
  }

  map(k: number): Promise<MapResponse> {
    return this.getJson(`/api/map/${k}`);
  }

  /** Decode component values into a PNG blob URL-able payload. */
  async decode(values: number[]): Promise<Blob> {
    const res = await this.fetchImpl("/api/decode", {
      method: "POST",
      headers: { "Content-Type": "application/json" },
      body: JSON.stringify({ values }),
    });
    if (!res.ok) {
      throw new ApiError(res.status, `POST /api/decode -> ${res.status}`);
    }
    return res.blob();
  }

  itemImageUrl(id: string): string {
    return `${this.base}/api/items/${id}/image`;
  }
}
