// Typed client for the sprawlkit HTTP/JSON API. The UI renders only what
// these calls return; nothing is re-derived client-side.

export interface AttributeInfo {
  name: string;
  units: string;
  minimum: number;
  maximum: number;
  bin_labels: string[];
}

export interface AttributeCatalog {
  attributes: AttributeInfo[];
  target: string;
}

export interface Prediction {
  label: "Y" | "N";
  confidence: number;
  explanation: string[];
  provenance: string;
}

export interface RuleView {
  antecedent: string[];
  consequent: string[];
  support: number;
  confidence: number;
  text: string;
}

export interface ImpactReport {
  a: string;
  b: string;
  a_value: number | null;
  a_token: string | null;
  headline: string | null;
  rules: RuleView[];
  note: string | null;
}

export interface MapFeature {
  type: "Feature";
  geometry: { type: "Polygon"; coordinates: number[][][] };
  properties: { key: string; name: string; sprawl: "Y" | "N"; fill: string };
}

export interface MapDocument {
  type: "FeatureCollection";
  year: number;
  features: MapFeature[];
}

export class ApiError extends Error {
  readonly code: string;
  readonly status: number;

  constructor(status: number, code: string, message: string) {
    super(message);
    this.code = code;
    this.status = status;
  }
}

async function request<T>(path: string, init?: RequestInit): Promise<T> {
  const response = await fetch(path, init);
  if (!response.ok) {
    let code = "HttpError";
    let message = `request failed with status ${response.status}`;
    try {
      const body = await response.json();
      if (body && body.error) {
        code = body.error.code ?? code;
        message = body.error.message ?? message;
      }
    } catch {
      // non-JSON error body; keep the generic message
    }
    throw new ApiError(response.status, code, message);
  }
  return (await response.json()) as T;
}

export function fetchAttributes(): Promise<AttributeCatalog> {
  return request<AttributeCatalog>("/api/attributes");
}

export function postPredict(
  assignment: Record<string, number>,
): Promise<Prediction> {
  return request<Prediction>("/api/predict", {
    method: "POST",
    headers: { "Content-Type": "application/json" },
    body: JSON.stringify(assignment),
  });
}

export function postImpact(
  a: string,
  b: string,
  aValue: number | null,
): Promise<ImpactReport> {
  const body: Record<string, unknown> = { a, b };
  if (aValue !== null) {
    body.a_value = aValue;
  }
  return request<ImpactReport>("/api/impact", {
    method: "POST",
    headers: { "Content-Type": "application/json" },
    body: JSON.stringify(body),
  });
}

export function fetchMap(year: number): Promise<MapDocument> {
  return request<MapDocument>(`/api/map/${year}.geojson`);
}
