/** Wire types of the workbench HTTP service. */

export type NodeKind = "statement" | "condition" | "terminal";

export type LeafStatus = "covered" | "uncovered" | "infeasible" | "bound-exceeded";

export interface TreeNodeJson {
  id: number;
  kind: NodeKind;
  label: string;
  outcome?: boolean;
  status?: string;
  children: number[];
}

export interface TreeJson {
  nodes: TreeNodeJson[];
  rootId: number;
  leaves: Record<string, number>;
}

export interface ExampleInfo {
  name: string;
  description: string;
  source: string;
  entry: string;
}

export interface VariantStep {
  kind: string;
  text: string;
  provenanceNodeId: number;
  assertExpected?: boolean;
}

export interface VariantJson {
  id: string;
  steps: VariantStep[];
  boundExceeded: boolean;
  prunedInfeasible: boolean;
}

export interface PathDetail {
  pathId: string;
  text: string;
  variant: VariantJson;
  status: LeafStatus;
  outcomes: boolean[];
}

export interface TrialJson {
  path_id: string;
  trial_index: number;
  prompt_text: string;
  test_text: string | null;
  verdict: "covered" | "diverged" | "parseError" | "runtimeError";
  assert_text: string | null;
  message: string | null;
  user_authored: boolean;
  timestamp: number;
}

export interface RunSnapshot {
  runId: string;
  status: "idle" | "running" | "done" | "cancelled";
  backend: string;
  trialLimit: number;
  trials: Record<string, TrialJson[]>;
  covered: string[];
  error: string | null;
}

export interface VerifyResponse {
  pathId: string;
  verdict: "covered" | "diverged" | "parseError" | "runtimeError";
  assert?: string;
  message?: string;
  displayStepIndex?: number;
}

export interface LocateResponse {
  pathId: string | null;
  reason: string;
  outcomes: boolean[];
}

export interface SessionConfig {
  loopBound: number;
  recursionBound: number;
  maxPaths: number;
  entryFunction: string | null;
  symbolicFunctions: string[];
}

export interface PromptResponse {
  pathId: string;
  promptText: string;
  overridden: boolean;
}

export interface RunStartBody {
  backend: string;
  script?: Record<string, string[]> | string[];
  endpoint?: { baseUrl: string; model: string; temperature?: number };
  trialLimit?: number;
}
