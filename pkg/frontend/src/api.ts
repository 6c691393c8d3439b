/** Thin typed client for the suggestion service. The client never computes
 * scores or ranks itself; every displayed number comes from these calls. */

import type { MetaResponse, RequestParams, SuggestResponse } from "./types.js";

export class ApiError extends Error {
  constructor(public status: number, detail: string) {
    super(detail);
  }
}

async function detailOf(resp: Response): Promise<string> {
  try {
    const body = await resp.json();
    if (typeof body.detail === "string") return body.detail;
    return JSON.stringify(body.detail ?? body);
  } catch {
    return resp.statusText || `HTTP ${resp.status}`;
  }
}

export async function fetchMeta(base: string): Promise<MetaResponse> {
  const resp = await fetch(`${base}/api/meta`);
  if (!resp.ok) throw new ApiError(resp.status, await detailOf(resp));
  return (await resp.json()) as MetaResponse;
}

export async function postSuggest(
  base: string,
  queryText: string,
  params: RequestParams,
): Promise<SuggestResponse> {
  const resp = await fetch(`${base}/api/suggest`, {
    method: "POST",
    headers: { "Content-Type": "application/json" },
    body: JSON.stringify({ query_text: queryText, ...params }),
  });
  if (!resp.ok) throw new ApiError(resp.status, await detailOf(resp));
  return (await resp.json()) as SuggestResponse;
}
