/** Typed client for the elicitation service. Every mutation funnels
 * through here; errors arrive as the service's single envelope. */

export interface ApiErrorBody {
  code: "not_found" | "invalid_input" | "state_conflict" | "solver_failure";
  message: string;
}

export interface Progress {
  answered: number;
  budget: number | null;
  target_accuracy: number | null;
}

export interface QuestionPayload {
  alternative_id: string;
  performances: Record<string, number>;
  categories: number[];
}

export interface NormalizedPayload {
  utilities: number[][];
  thresholds: number[];
  epsilon: number;
}

export interface FinalPayload {
  assignments: Record<string, number>;
  model: {
    criteria: { name: string; breakpoints: number[]; utilities: number[] }[];
    thresholds: number[];
    epsilon: number;
  };
  normalized: NormalizedPayload;
  objective: number;
  inconsistency: number;
  early: boolean;
  accuracy_all: number | null;
  accuracy_nonref: number | null;
}

export interface SessionPayload {
  id: string;
  dataset_id: string;
  status: "selecting" | "awaiting_answer" | "finished";
  iteration: number;
  pending_question: string | null;
  reference_ids: string[];
  candidate_ids: string[];
  q: number;
  strategy: string;
  progress: Progress;
  history: { iteration: number; asked: string; answer: number }[];
  question?: QuestionPayload;
  scores?: Record<string, number>;
  final?: FinalPayload;
}

export interface ModelPayload {
  criteria: { name: string; breakpoints: number[]; utilities: number[] }[];
  thresholds: number[];
  epsilon: number;
  normalized: NormalizedPayload;
  iteration: number;
  assignments: Record<string, number>;
  scores: Record<string, number>;
}

export interface CandidatesPayload {
  iteration: number;
  candidate_ids: string[];
  scores: Record<string, number>;
  probabilities: Record<string, number[]>;
}

export type ApiResult<T> =
  | { ok: true; value: T }
  | { ok: false; error: ApiErrorBody; status: number };

async function request<T>(
  base: string,
  path: string,
  init?: RequestInit,
): Promise<ApiResult<T>> {
  const response = await fetch(base + path, {
    headers: { "content-type": "application/json" },
    ...init,
  });
  const body = await response.json();
  if (!response.ok) {
    return { ok: false, error: body as ApiErrorBody, status: response.status };
  }
  return { ok: true, value: body as T };
}

export class ServiceClient {
  constructor(private readonly base: string = "") {}

  fetchSession(id: string, wait = false): Promise<ApiResult<SessionPayload>> {
    const suffix = wait ? "?wait=true" : "";
    return request(this.base, `/sessions/${id}${suffix}`);
  }

  submitAnswer(
    id: string,
    alternativeId: string,
    category: number,
    wait = false,
  ): Promise<ApiResult<SessionPayload>> {
    const suffix = wait ? "?wait=true" : "";
    return request(this.base, `/sessions/${id}/answer${suffix}`, {
      method: "POST",
      body: JSON.stringify({ alternative_id: alternativeId, category }),
    });
  }

  fetchModel(id: string): Promise<ApiResult<ModelPayload>> {
    return request(this.base, `/sessions/${id}/model`);
  }

  fetchCandidates(id: string): Promise<ApiResult<CandidatesPayload>> {
    return request(this.base, `/sessions/${id}/candidates`);
  }

  createDataset(csv: string): Promise<ApiResult<{ id: string; n: number; m: number }>> {
    return request(this.base, "/datasets", {
      method: "POST",
      body: JSON.stringify({ csv }),
    });
  }

  createSession(body: unknown, wait = true): Promise<ApiResult<SessionPayload>> {
    const suffix = wait ? "?wait=true" : "";
    return request(this.base, `/sessions${suffix}`, {
      method: "POST",
      body: JSON.stringify(body),
    });
  }
}
