// Shapes of the service's JSON responses. All numbers arrive as fixed
// 4-decimal strings; the dashboard never converts them to floats for display.

export interface TraceEntryDoc {
  rule_id: string;
  factor: string;
  reason: string;
}

export interface LineDoc {
  service_id: string;
  vpu_base: string;
  modifier_factor: string;
  slicer: string | null;
  vpu_final: string;
  trace: TraceEntryDoc[];
  flags: string[];
}

export interface StatementDoc {
  staff_id: string;
  month: string;
  vpu_base_total: string;
  vpu_final_total: string;
  target: string;
  productivity_percentage: string;
  lines: LineDoc[];
  flags: string[];
}

export interface FeedbackDoc {
  staff_id: string;
  as_of: string;
  month_to_date_vpu: string;
  target: string;
  pace: string;
  productivity_percentage: string;
  flags: string[];
}

export interface ProjectionDoc {
  statement: StatementDoc;
  warnings: string[];
  rejected: string[];
}

export interface HealthDoc {
  status: string;
  version: string;
  counts: Record<string, number>;
}

export interface ProposedRow {
  service_type: string;
  payer_id: string;
  duration_hours: number;
  expected_revenue: number;
}

export interface WhatIfDraft {
  staff_id: string;
  month: string;
  proposed: ProposedRow[];
  last_projection?: ProjectionDoc;
}
