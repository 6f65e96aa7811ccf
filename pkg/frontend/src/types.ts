/** Wire contracts of the orchestration API. The console renders only what
 * these shapes carry; it never invents client-side state. */

export type NsState =
  | "Defined"
  | "Deploying"
  | "Running"
  | "Reconfiguring"
  | "Terminating"
  | "Terminated"
  | "Error";

export interface VnfRecord {
  vnf_id: string;
  member_id: string;
  vnfd_ref: string;
  state: string;
  node_id: string | null;
}

export interface NsRecord {
  ns_id: string;
  nsd_ref: string;
  state: NsState;
  vnf_instances: VnfRecord[];
  carrier_refs: string[];
  created_at: number;
  state_changed_at: number;
  downtime_log: [number, number][];
  error_reason: string;
}

export interface EventRecord {
  seq: number;
  t: number;
  kind: string;
  [field: string]: unknown;
}

export type Sample = [number, number];

export interface SeriesKey {
  scope: string;
  scope_id: string;
  metric: string;
}

export interface MetricsResponse {
  series: SeriesKey;
  samples: Sample[];
}

export interface CarrierRecord {
  assignment_id: string;
  band_id: string;
  frontend_id: string;
  site_id: string;
  center_hz: number;
  bw_hz: number;
  owner_ns_id: string;
}

export interface SpectrumBandRecord {
  band_id: string;
  low_hz: number;
  high_hz: number;
  raster_hz: number;
  assignments: CarrierRecord[];
  occupancy_by_site: Record<string, number>;
}

export interface SpectrumResponse {
  bands: SpectrumBandRecord[];
}

export interface TaskRecord {
  task_id: string;
  ns_id: string;
  kind: string;
  state: string;
  attempts: number;
  detail: string;
}

export interface HealthResponse {
  status: string;
  version: string;
  t: number;
}

export function seriesPath(key: SeriesKey): string {
  return `${key.scope}/${key.scope_id}/${key.metric}`;
}
