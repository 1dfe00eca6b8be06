// Wire types for the simplification service. Field names mirror the
// JSON the server sends; keep them snake_case.

export type ErrorProbs = {
  probs: number[];
  classifier_id: string;
};

export type Candidate = {
  text: string;
  raw_probability: number;
  candidate_index: number;
  error_probs: ErrorProbs | null;
  calibrated_probability: number | null;
};

export type CheckResult = {
  rule: string;
  passed: boolean;
  detail: string;
};

export type ValidationReport = {
  pair_id: string;
  passed: boolean;
  checks: CheckResult[];
};

export type PlanAction = {
  technique: string;
  description: string;
};

export type Plan = {
  thoughts: string;
  actions: PlanAction[];
};

export type StepOutcome = {
  step_id: number;
  original_text: string;
  plan: Plan;
  candidates: Candidate[];
  validation: ValidationReport[];
  chosen_index: number | null;
  chosen_text: string;
  display_text: string;
  model_version: number;
};

export type SimplifyResponse = {
  manual_id: string;
  model_version: number;
  steps: StepOutcome[];
};

export type ManualStep = {
  step_id: number;
  original_text: string;
  simplified_text: string | null;
  status: string;
  spatial_snapshot: unknown;
};

export type Manual = {
  manual_id: string;
  title: string;
  steps: ManualStep[];
  tags: string[];
  version: number;
  created_at: string;
  updated_at: string;
};

export type ManualSummary = {
  manual_id: string;
  title: string;
  version: number;
  tags: string[];
  updated_at: string;
};

export type ReviewItem = {
  manual_id: string;
  title: string;
  version: number;
  step_id: number;
  original_text: string;
  simplified_text: string | null;
  plan: Plan | null;
  candidates: Candidate[] | null;
  validation: ValidationReport[] | null;
  chosen_index: number | null;
};

export type GoldSample = {
  original_text: string;
  simplified_text: string;
  verdict: 0 | 1;
  error_label: string | null;
  source: string;
  raw_probability: number | null;
};

export type Verdict =
  | { verdict: "accept" }
  | { verdict: "reject"; error_class: string }
  | { verdict: "edit"; text: string };

export type VerdictResponse = {
  manual_id: string;
  step_id: number;
  status: string;
  version: number;
  gold: GoldSample;
  validation: ValidationReport | null;
};

export type CalibrationModel = {
  w_diag: number[];
  b: number;
  error_registry_hash: string;
  trained_on: number;
  version: number;
};

export type TrainRequest = {
  learning_rate?: number;
  epochs?: number;
  seed?: number;
};

export type TrainResponse = {
  model: CalibrationModel;
  trained_on: number;
  loss_curve: number[];
  final_loss: number;
  warnings: string[];
};

export type DisplayResponse = {
  manual_id: string;
  step_id: number;
  version: number;
  status: string;
  text: string;
  lines: number;
};

export type HealthResponse = {
  status: string;
  model_version: number;
};
