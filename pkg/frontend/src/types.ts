/** Wire types mirroring the suggestion service's JSON bodies. */

export interface SuggestionCard {
  rank: number;
  sentence_id: string;
  text: string;
  score: number;
  covered_tokens: string[];
  source_doc: string;
}

export interface SuggestResponse {
  suggestions: SuggestionCard[];
  params_echo: RequestParams;
  truncated: boolean;
  timing_ms: number;
}

export interface RequestParams {
  algorithm: string;
  t: number;
  r: number;
  rho: number;
}

export interface Bound {
  min: number;
  max: number;
}

export interface MetaResponse {
  corpus_stats: Record<string, number>;
  available_algorithms: string[];
  defaults: RequestParams;
  bounds: { t: Bound; r: Bound; rho: Bound };
  candidate_sentences: number;
}
