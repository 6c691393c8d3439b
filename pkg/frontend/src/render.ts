/** DOM rendering for the suggestion panel and the query echo line. */

import { markCovered } from "./highlight.js";
import type { SuggestResponse, SuggestionCard } from "./types.js";

function el<K extends keyof HTMLElementTagNameMap>(
  doc: Document,
  tag: K,
  className?: string,
  text?: string,
): HTMLElementTagNameMap[K] {
  const node = doc.createElement(tag);
  if (className) node.className = className;
  if (text !== undefined) node.textContent = text;
  return node;
}

function renderSentenceText(
  doc: Document,
  card: SuggestionCard,
  container: HTMLElement,
): void {
  for (const piece of markCovered(card.text, card.covered_tokens)) {
    if (piece.covered) {
      const mark = el(doc, "mark", "covered", piece.text);
      mark.dataset.token = piece.token ?? "";
      container.appendChild(mark);
    } else {
      container.appendChild(doc.createTextNode(piece.text));
    }
  }
}

/** Query echo: each word becomes a span so cards can cross-highlight it. */
export function renderQueryEcho(doc: Document, target: HTMLElement, query: string): void {
  target.replaceChildren();
  for (const piece of markCovered(query, [])) {
    if (/^\s+$/.test(piece.text)) {
      target.appendChild(doc.createTextNode(piece.text));
      continue;
    }
    const span = el(doc, "span", "query-token", piece.text);
    span.dataset.token = piece.text.toLowerCase();
    target.appendChild(span);
  }
}

function crossHighlight(target: HTMLElement, tokens: Set<string>, on: boolean): void {
  for (const span of Array.from(target.querySelectorAll<HTMLElement>(".query-token"))) {
    const match = tokens.has(span.dataset.token ?? "");
    span.classList.toggle("cross-hit", on && match);
  }
}

export interface RenderCallbacks {
  onAccept: (text: string) => void;
}

/** Replace the suggestion list with one card per suggestion. */
export function renderSuggestions(
  doc: Document,
  list: HTMLElement,
  queryEcho: HTMLElement,
  response: SuggestResponse,
  callbacks: RenderCallbacks,
): void {
  list.replaceChildren();
  for (const card of response.suggestions) {
    const item = el(doc, "li", "card");
    item.dataset.sentenceId = card.sentence_id;

    const header = el(doc, "div", "card-header");
    header.appendChild(el(doc, "span", "rank", `#${card.rank}`));
    header.appendChild(el(doc, "span", "score", `score ${card.score.toPrecision(4)}`));
    if (card.source_doc) {
      header.appendChild(el(doc, "span", "source", card.source_doc));
    }
    item.appendChild(header);

    const body = el(doc, "p", "card-text");
    renderSentenceText(doc, card, body);
    item.appendChild(body);

    const covered = new Set(card.covered_tokens);
    item.addEventListener("mouseenter", () => crossHighlight(queryEcho, covered, true));
    item.addEventListener("mouseleave", () => crossHighlight(queryEcho, covered, false));
    item.addEventListener("click", () => callbacks.onAccept(card.text));

    list.appendChild(item);
  }
  if (response.truncated) {
    list.appendChild(el(doc, "li", "truncated-note",
      "fewer results than requested: nothing left to cover"));
  }
}

export function renderStatus(target: HTMLElement, message: string, isError: boolean): void {
  target.textContent = message;
  target.classList.toggle("error", isError);
}
