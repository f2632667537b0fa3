// Thin client for the verification service HTTP API.

import type { ReportJson, ReviseResponseJson } from './types.js';

export class ApiError extends Error {
  status: number;
  retriable: boolean;

  constructor(status: number, message: string, retriable = false) {
    super(message);
    this.status = status;
    this.retriable = retriable;
  }
}

async function post<T>(baseUrl: string, path: string, body: unknown): Promise<T> {
  let response: Response;
  try {
    response = await fetch(`${baseUrl}${path}`, {
      method: 'POST',
      headers: { 'Content-Type': 'application/json' },
      body: JSON.stringify(body),
    });
  } catch (err) {
    throw new ApiError(0, `network error: ${err}`, true);
  }
  if (!response.ok) {
    let detail = response.statusText;
    try {
      const parsed = await response.json();
      detail = typeof parsed.detail === 'string'
        ? parsed.detail
        : JSON.stringify(parsed.detail ?? parsed);
    } catch {
      // keep the status text
    }
    throw new ApiError(response.status, detail, response.status >= 500);
  }
  return response.json() as Promise<T>;
}

export class ServiceClient {
  constructor(readonly baseUrl: string) {}

  ask(query: string): Promise<{ response_text: string }> {
    return post(this.baseUrl, '/api/ask', { query });
  }

  verify(text: string): Promise<ReportJson> {
    return post(this.baseUrl, '/api/verify', { text });
  }

  revise(report: ReportJson): Promise<ReviseResponseJson> {
    return post(this.baseUrl, '/api/revise', { report });
  }

  async health(): Promise<boolean> {
    try {
      const response = await fetch(`${this.baseUrl}/api/health`);
      return response.ok;
    } catch {
      return false;
    }
  }
}
