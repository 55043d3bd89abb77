/** Payload shapes of the mining-session HTTP API. */

export type ObjectiveName =
  | "complexity"
  | "feature_count"
  | "missed_remark_count"
  | "missed_remark_log"
  | "saved_record_count"
  | "saved_records_trimmed_mean"
  | "saved_java_loc";

export const MINIMIZED: ObjectiveName[] = [
  "complexity",
  "feature_count",
  "missed_remark_count",
  "missed_remark_log",
];

export const MAXIMIZED: ObjectiveName[] = [
  "saved_record_count",
  "saved_records_trimmed_mean",
  "saved_java_loc",
];

export const ALL_OBJECTIVES: ObjectiveName[] = [...MINIMIZED, ...MAXIMIZED];

export type ObjectiveVector = Record<ObjectiveName, number>;

export interface ParetoPoint {
  x: number;
  y: number;
  ruleset_id: string;
}

export interface ParetoResponse {
  generation: number;
  x: ObjectiveName;
  y: ObjectiveName;
  points: ParetoPoint[];
}

export interface RulesetDetail {
  ruleset_id: string;
  text: string;
  objectives: ObjectiveVector;
  break_even: { per_record: number | null; per_loc: number | null };
}

export interface BaselineResponse {
  share: number;
  seeds: number;
  objectives: ObjectiveVector;
}

export interface EvaluateResponse {
  objectives: ObjectiveVector;
  break_even: { per_record: number | null; per_loc: number | null };
  costs: Record<string, number>;
}

export interface SampledRecord {
  record_id: string;
  ticket_id: string;
  path: string;
  diff_old: string[];
  diff_new: string[];
  features: Record<string, number | string | boolean | null>;
  matching_rules: string[];
  remarks: string[];
}

export interface SampleResponse {
  ruleset_id: string;
  records: SampledRecord[];
}

export type FeedbackKind =
  | "REJECT_RULE"
  | "PIN_RULE"
  | "BLACKLIST_FEATURE"
  | "EXCLUDE_TICKET"
  | "SET_FOCUS"
  | "PURGE_ARCHIVE";

export interface FeedbackRequest {
  command: FeedbackKind;
  rule_text?: string;
  feature?: string;
  ticket?: string;
  weights?: Record<string, number>;
  predicate?: [string, string, number];
  command_id?: string;
}

export interface FeedbackAck {
  acknowledged: boolean;
  archive_delta: number;
}

export interface SessionInfo {
  session_id: string;
  state: "IDLE" | "RUNNING" | "PAUSED";
  generation: number;
}
