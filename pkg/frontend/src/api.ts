/**
 * Typed client for the reasoning service. One base-URL setting; every
 * response is schema-validated before it reaches the view model.
 */

import {
  type InputError,
  type QueryResponse,
  type ScenarioList,
  type SessionDoc,
  inputErrorSchema,
  parseWith,
  queryResponseSchema,
  scenarioListSchema,
  sessionDocSchema,
} from "./schema.js";

export class ServiceError extends Error {
  constructor(
    readonly status: number,
    readonly detail: unknown,
    message?: string,
  ) {
    super(message ?? `service responded ${status}`);
    this.name = "ServiceError";
  }
}

/** 422 with a position the form can mark; anything else stays ServiceError. */
export class InputRejected extends ServiceError {
  constructor(
    status: number,
    readonly input: InputError,
    detail: unknown,
  ) {
    super(status, detail, input.message);
    this.name = "InputRejected";
  }
}

async function throwFor(response: Response): Promise<never> {
  let body: unknown = null;
  try {
    body = await response.json();
  } catch {
    /* non-JSON error body; fall through with null detail */
  }
  const detail =
    typeof body === "object" && body !== null && "detail" in body
      ? (body as { detail: unknown }).detail
      : body;
  if (response.status === 422) {
    const parsed = inputErrorSchema.safeParse(detail);
    if (parsed.success) {
      throw new InputRejected(response.status, parsed.data, detail);
    }
  }
  throw new ServiceError(response.status, detail);
}

export class ServiceClient {
  constructor(readonly baseUrl: string = "http://127.0.0.1:8000") {}

  private async request(path: string, init?: RequestInit): Promise<unknown> {
    const response = await fetch(`${this.baseUrl}${path}`, {
      headers: { "content-type": "application/json" },
      ...init,
    });
    if (!response.ok) await throwFor(response);
    return response.json();
  }

  async createSession(baseScenario?: string): Promise<string> {
    const body = await this.request("/sessions", {
      method: "POST",
      body: JSON.stringify(baseScenario ? { baseScenario } : {}),
    });
    return (body as { sessionId: string }).sessionId;
  }

  async getSession(sessionId: string): Promise<SessionDoc> {
    const body = await this.request(`/sessions/${sessionId}`);
    return parseWith(sessionDocSchema, body, "session document");
  }

  async addEvidence(sessionId: string, fact: string): Promise<number> {
    const body = await this.request(`/sessions/${sessionId}/evidence`, {
      method: "POST",
      body: JSON.stringify({ fact }),
    });
    return (body as { seq: number }).seq;
  }

  async retractEvidence(sessionId: string, seq: number): Promise<void> {
    await this.request(`/sessions/${sessionId}/evidence/${seq}`, {
      method: "DELETE",
    });
  }

  async runQuery(
    sessionId: string,
    goal: string,
    config?: Record<string, unknown>,
  ): Promise<QueryResponse> {
    const body = await this.request(`/sessions/${sessionId}/query`, {
      method: "POST",
      body: JSON.stringify(config ? { goal, config } : { goal }),
    });
    return parseWith(queryResponseSchema, body, "query response");
  }

  async explanationText(
    sessionId: string,
    qid: string,
    answer = 0,
  ): Promise<string> {
    const response = await fetch(
      `${this.baseUrl}/sessions/${sessionId}/explanations/${qid}` +
        `?format=text&answer=${answer}`,
    );
    if (!response.ok) await throwFor(response);
    return response.text();
  }

  async scenarios(): Promise<ScenarioList> {
    const body = await this.request("/scenarios");
    return parseWith(scenarioListSchema, body, "scenario list");
  }
}
