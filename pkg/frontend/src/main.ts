/** Wiring for the writing-assistant loop: draft, query, params, suggest. */

import { ApiError, fetchMeta, postSuggest } from "./api.js";
import { renderQueryEcho, renderStatus, renderSuggestions } from "./render.js";
import {
  SessionState,
  acceptSuggestion,
  applyMeta,
  initialState,
  recordResponse,
  setAlgorithm,
  setParam,
} from "./state.js";

interface Elements {
  draft: HTMLTextAreaElement;
  query: HTMLInputElement;
  suggestBtn: HTMLButtonElement;
  algorithm: HTMLSelectElement;
  t: HTMLInputElement;
  r: HTMLInputElement;
  rho: HTMLInputElement;
  tValue: HTMLElement;
  rValue: HTMLElement;
  rhoValue: HTMLElement;
  clampNote: HTMLElement;
  status: HTMLElement;
  queryEcho: HTMLElement;
  suggestions: HTMLElement;
}

function grab(doc: Document): Elements {
  const byId = <T extends HTMLElement>(id: string) => doc.getElementById(id) as T;
  return {
    draft: byId("draft"),
    query: byId("query"),
    suggestBtn: byId("suggest-btn"),
    algorithm: byId("algorithm"),
    t: byId("param-t"),
    r: byId("param-r"),
    rho: byId("param-rho"),
    tValue: byId("t-value"),
    rValue: byId("r-value"),
    rhoValue: byId("rho-value"),
    clampNote: byId("clamp-note"),
    status: byId("status"),
    queryEcho: byId("query-echo"),
    suggestions: byId("suggestions"),
  };
}

export class App {
  state: SessionState = initialState();
  private requestSeq = 0;

  constructor(
    private doc: Document,
    private base: string,
    private els: Elements = grab(doc),
  ) {}

  async init(): Promise<void> {
    try {
      const meta = await fetchMeta(this.base);
      this.state = applyMeta(this.state, meta);
      this.populateControls();
      renderStatus(this.els.status,
        `${meta.candidate_sentences} candidate sentences loaded`, false);
    } catch (err) {
      renderStatus(this.els.status, `service unavailable: ${String(err)}`, true);
    }
    this.bind();
  }

  private populateControls(): void {
    const meta = this.state.meta;
    if (!meta) return;
    this.els.algorithm.replaceChildren();
    for (const name of meta.available_algorithms) {
      const option = this.doc.createElement("option");
      option.value = name;
      option.textContent = name;
      this.els.algorithm.appendChild(option);
    }
    this.els.algorithm.value = this.state.params.algorithm;
    for (const [input, name] of [
      [this.els.t, "t"], [this.els.r, "r"], [this.els.rho, "rho"],
    ] as const) {
      input.min = String(meta.bounds[name].min);
      input.max = String(meta.bounds[name].max);
      input.value = String(this.state.params[name]);
    }
    this.refreshParamLabels();
  }

  private refreshParamLabels(): void {
    this.els.tValue.textContent = String(this.state.params.t);
    this.els.rValue.textContent = String(this.state.params.r);
    this.els.rhoValue.textContent = String(this.state.params.rho);
  }

  handleParamInput(name: "t" | "r" | "rho", raw: string): void {
    const { state, clamped } = setParam(this.state, name, Number(raw));
    this.state = state;
    const input = this.els[name];
    input.value = String(this.state.params[name]);
    this.els.clampNote.textContent = clamped
      ? `${name} clamped to ${this.state.params[name]} (allowed `
        + `${input.min}..${input.max})`
      : "";
    this.refreshParamLabels();
  }

  private bind(): void {
    this.els.suggestBtn.addEventListener("click", () => void this.requestSuggestions());
    this.els.query.addEventListener("keydown", (ev) => {
      if ((ev as KeyboardEvent).key === "Enter") void this.requestSuggestions();
    });
    this.els.algorithm.addEventListener("change", () => {
      this.state = setAlgorithm(this.state, this.els.algorithm.value);
    });
    for (const name of ["t", "r", "rho"] as const) {
      this.els[name].addEventListener("change", () =>
        this.handleParamInput(name, this.els[name].value));
    }
    this.els.draft.addEventListener("input", () => {
      this.state = { ...this.state, draftText: this.els.draft.value };
    });
  }

  /** One request in flight at a time: stale responses are never rendered. */
  async requestSuggestions(): Promise<void> {
    const query = this.els.query.value.trim();
    if (!query) {
      renderStatus(this.els.status, "type a sentence to get suggestions", true);
      return;
    }
    const seq = ++this.requestSeq;
    renderStatus(this.els.status, "searching…", false);
    try {
      const response = await postSuggest(this.base, query, this.state.params);
      if (seq !== this.requestSeq) return; // a newer request superseded this one
      this.state = recordResponse(this.state, query, response);
      renderQueryEcho(this.doc, this.els.queryEcho, query);
      renderSuggestions(this.doc, this.els.suggestions, this.els.queryEcho, response, {
        onAccept: (text) => this.accept(text),
      });
      renderStatus(this.els.status,
        `${response.suggestions.length} suggestions (${response.timing_ms.toFixed(1)} ms)`,
        false);
    } catch (err) {
      if (seq !== this.requestSeq) return;
      // 422 and friends show inline; existing cards stay on screen
      const detail = err instanceof ApiError ? `${err.status}: ${err.message}` : String(err);
      renderStatus(this.els.status, detail, true);
    }
  }

  private accept(text: string): void {
    this.state = acceptSuggestion(this.state, text);
    this.els.draft.value = this.state.draftText;
    this.els.query.value = "";
  }
}

export function bootstrap(doc: Document, base = ""): App {
  const app = new App(doc, base);
  void app.init();
  return app;
}

declare global {
  interface Window {
    __latentnlpApp?: App;
  }
}

if (typeof window !== "undefined" && typeof document !== "undefined" &&
    document.getElementById("suggest-btn")) {
  window.__latentnlpApp = bootstrap(document, "");
}
