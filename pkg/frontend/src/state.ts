/** Session state and parameter handling.
 *
 * Draft text lives only here (the service is stateless); state survives
 * suggestion refreshes but not page reloads. Parameter edits are clamped to
 * the bounds served by /api/meta and only apply to the next request.
 */

import type { Bound, MetaResponse, RequestParams, SuggestResponse } from "./types.js";

export interface SessionState {
  draftText: string;
  lastQuery: string;
  lastResponse: SuggestResponse | null;
  params: RequestParams;
  meta: MetaResponse | null;
}

export function initialState(): SessionState {
  return {
    draftText: "",
    lastQuery: "",
    lastResponse: null,
    params: { algorithm: "set_cover", t: 5, r: 10, rho: 0.5 },
    meta: null,
  };
}

export function applyMeta(state: SessionState, meta: MetaResponse): SessionState {
  return { ...state, meta, params: { ...meta.defaults } };
}

export interface ClampResult {
  value: number;
  clamped: boolean;
}

export function clampToBound(raw: number, bound: Bound): ClampResult {
  if (Number.isNaN(raw)) return { value: bound.min, clamped: true };
  if (raw < bound.min) return { value: bound.min, clamped: true };
  if (raw > bound.max) return { value: bound.max, clamped: true };
  return { value: raw, clamped: false };
}

/** Update one numeric parameter from (possibly invalid) manual input. */
export function setParam(
  state: SessionState,
  name: "t" | "r" | "rho",
  raw: number,
): { state: SessionState; clamped: boolean } {
  const bound = state.meta?.bounds[name] ?? { min: 0, max: Number.MAX_SAFE_INTEGER };
  const { value, clamped } = clampToBound(raw, bound);
  const rounded = name === "rho" ? value : Math.round(value);
  return {
    state: { ...state, params: { ...state.params, [name]: rounded } },
    clamped,
  };
}

export function setAlgorithm(state: SessionState, algorithm: string): SessionState {
  return { ...state, params: { ...state.params, algorithm } };
}

export function recordResponse(
  state: SessionState,
  query: string,
  response: SuggestResponse,
): SessionState {
  return { ...state, lastQuery: query, lastResponse: response };
}

/** Accepting a suggestion appends its text to the draft and clears the
 * query box; the next request starts from the accepted idea. */
export function acceptSuggestion(state: SessionState, text: string): SessionState {
  const joiner = state.draftText && !state.draftText.endsWith(" ") ? " " : "";
  return { ...state, draftText: state.draftText + joiner + text, lastQuery: "" };
}
