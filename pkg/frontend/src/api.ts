// Typed client for the gateway /v1 contract. Every request the portal makes
// goes through request() below, so tests can audit the full set of endpoints
// the app touches.

export interface JobSummary {
  id: string;
  owner: string;
  vo: string;
  state: string;
  ce: string | null;
  rb: string;
  direct: boolean;
  submitted_at: number;
  reason: string;
}

export interface JobEvent {
  t: number;
  seq: number;
  job: string;
  component: string;
  from: string;
  to: string;
  reason: string;
}

export interface OutputListing {
  id: string;
  state: string;
  files: { name: string; size: number }[];
}

export interface ResourceEntry {
  dn: string;
  objectClasses: string[];
  attributes: Record<string, string[]>;
}

export interface ReplicaInfo {
  protocol: string;
  se: string;
  path: string;
  size: number;
  url: string;
}

export interface VoInfo {
  name: string;
  members: string[];
  signed: string[];
}

export interface BrokerInfo {
  id: string;
  glue_aware: boolean;
  strict_data: boolean;
  info_primary: string;
  info_backup: string;
  site: string;
}

export interface MapService {
  id: string;
  kind: string;
  status: string;
  latency_ms: number;
  detail: string;
}

export interface MapSite {
  id: string;
  lat: number;
  lon: number;
  country: string;
  continent: string;
  rollup: string;
  color: string;
  services: MapService[];
  metrics: Record<string, number>;
}

export interface MapDocument {
  t: number;
  filter: { kind: string; value: string };
  sites: MapSite[];
}

export class ApiError extends Error {
  constructor(
    public code: string,
    message: string,
    public status: number,
  ) {
    super(message);
  }
}

export type RequestRecord = { method: string; path: string };

export class GatewayClient {
  // filled during tests to audit which endpoints the portal exercises
  readonly calls: RequestRecord[] = [];

  constructor(
    private baseUrl: string = "",
    private fetchFn: typeof fetch = (...args) => fetch(...args),
  ) {}

  private async request<T>(
    method: string,
    path: string,
    options: { query?: Record<string, string>; body?: BodyInit; contentType?: string; text?: boolean } = {},
  ): Promise<T> {
    this.calls.push({ method, path });
    let url = this.baseUrl + path;
    if (options.query && Object.keys(options.query).length > 0) {
      url += "?" + new URLSearchParams(options.query).toString();
    }
    const headers: Record<string, string> = {};
    if (options.contentType) headers["content-type"] = options.contentType;
    const response = await this.fetchFn(url, { method, headers, body: options.body });
    if (!response.ok) {
      let code = "HttpError";
      let message = `HTTP ${response.status}`;
      try {
        const payload = (await response.json()) as { error?: { code: string; message: string } };
        if (payload.error) {
          code = payload.error.code;
          message = payload.error.message;
        }
      } catch {
        // non-JSON error body: keep the generic message
      }
      throw new ApiError(code, message, response.status);
    }
    if (options.text) return (await response.text()) as unknown as T;
    return (await response.json()) as T;
  }

  vos(): Promise<VoInfo[]> {
    return this.request<{ vos: VoInfo[] }>("GET", "/v1/vos").then((r) => r.vos);
  }

  brokers(): Promise<BrokerInfo[]> {
    return this.request<{ brokers: BrokerInfo[] }>("GET", "/v1/brokers").then((r) => r.brokers);
  }

  submitJob(jdlText: string, user: string, target: { rb?: string; ce?: string }): Promise<JobSummary> {
    const query: Record<string, string> = { user };
    if (target.ce) query.ce = target.ce;
    else if (target.rb) query.rb = target.rb;
    return this.request<JobSummary>("POST", "/v1/jobs", {
      query,
      body: jdlText,
      contentType: "text/plain",
    });
  }

  jobs(filter: { owner?: string; state?: string } = {}): Promise<JobSummary[]> {
    const query: Record<string, string> = {};
    if (filter.owner) query.owner = filter.owner;
    if (filter.state) query.state = filter.state;
    return this.request<{ jobs: JobSummary[] }>("GET", "/v1/jobs", { query }).then((r) => r.jobs);
  }

  job(id: string): Promise<JobSummary> {
    return this.request<JobSummary>("GET", `/v1/jobs/${id}`);
  }

  events(id: string): Promise<JobEvent[]> {
    return this.request<{ events: JobEvent[] }>("GET", `/v1/jobs/${id}/events`).then(
      (r) => r.events,
    );
  }

  output(id: string): Promise<OutputListing> {
    return this.request<OutputListing>("GET", `/v1/jobs/${id}/output`);
  }

  cancel(id: string): Promise<{ id: string; cancelled: boolean; state: string }> {
    return this.request("DELETE", `/v1/jobs/${id}`);
  }

  resources(schemaClass: "edg" | "glue", query: string): Promise<ResourceEntry[]> {
    const params: Record<string, string> = { class: schemaClass };
    if (query) params.query = query;
    return this.request<{ resources: ResourceEntry[] }>("GET", "/v1/resources", {
      query: params,
    }).then((r) => r.resources);
  }

  replicas(lfn: string): Promise<{ lfn: string; replicas: ReplicaInfo[] }> {
    return this.request("GET", `/v1/replicas/${encodeURIComponent(lfn)}`);
  }

  monitorMap(filter?: { kind: string; value: string }): Promise<MapDocument> {
    const query: Record<string, string> = {};
    if (filter && filter.kind !== "none") query.filter = `${filter.kind}:${filter.value}`;
    return this.request<MapDocument>("GET", "/v1/monitor/map", { query });
  }

  simTime(): Promise<number> {
    return this.request<{ now: number }>("GET", "/v1/sim/time").then((r) => r.now);
  }
}
