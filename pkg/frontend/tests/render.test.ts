import { beforeEach, describe, expect, it } from "vitest";

import { markCovered, markedTokens, splitChunk } from "../src/highlight.js";
import { renderQueryEcho, renderSuggestions } from "../src/render.js";
import type { SuggestResponse } from "../src/types.js";

function response(cards: Array<[string, string, string[]]>): SuggestResponse {
  return {
    suggestions: cards.map(([sid, text, covered], i) => ({
      rank: i + 1,
      sentence_id: sid,
      text,
      score: 1.5 - i * 0.25,
      covered_tokens: covered,
      source_doc: "docX",
    })),
    params_echo: { algorithm: "set_cover", t: cards.length, r: 10, rho: 0.5 },
    truncated: false,
    timing_ms: 2.0,
  };
}

describe("highlight primitives", () => {
  it("splits leading and trailing punctuation", () => {
    expect(splitChunk('"Come,')).toEqual(['"', "Come", ","]);
    expect(splitChunk("don't")).toEqual(["don't"]);
    expect(splitChunk("!?")).toEqual(["!", "?"]);
  });

  it("marks exactly the covered tokens, case-insensitively", () => {
    const pieces = markCovered("Look at this, says he.", ["look", "says"]);
    expect(markedTokens(pieces)).toEqual(new Set(["look", "says"]));
    const marked = pieces.filter((p) => p.covered).map((p) => p.text);
    expect(marked).toEqual(["Look", "says"]);
  });

  it("never marks when the covered set is empty", () => {
    const pieces = markCovered("anything at all", []);
    expect(pieces.every((p) => !p.covered)).toBe(true);
  });
});

describe("renderSuggestions", () => {
  let list: HTMLElement;
  let echo: HTMLElement;
  let accepted: string[];

  beforeEach(() => {
    document.body.innerHTML = "<p id='echo'></p><ul id='list'></ul>";
    list = document.getElementById("list") as HTMLElement;
    echo = document.getElementById("echo") as HTMLElement;
    accepted = [];
  });

  function render(resp: SuggestResponse) {
    renderSuggestions(document, list, echo, resp, {
      onAccept: (text) => accepted.push(text),
    });
  }

  it("renders one card per suggestion with rank and score from the response", () => {
    const resp = response([
      ["s1", "Look at this, says he.", ["look"]],
      ["s2", "What was he saying?", []],
      ["s3", "It's passion, not love.", ["passion"]],
    ]);
    render(resp);
    const cards = list.querySelectorAll(".card");
    expect(cards.length).toBe(3);
    expect(cards[0].querySelector(".rank")?.textContent).toBe("#1");
    expect(cards[0].querySelector(".score")?.textContent).toContain("1.500");
    expect(cards[1].textContent).toContain("What was he saying?");
  });

  it("highlights exactly the covered tokens of each card", () => {
    const resp = response([
      ["s1", "Go on; let me see.", ["go", "see"]],
      ["s2", "Come, go along!", ["come", "along"]],
    ]);
    render(resp);
    const cards = list.querySelectorAll(".card");
    const marks0 = Array.from(cards[0].querySelectorAll("mark.covered"))
      .map((m) => (m as HTMLElement).dataset.token);
    const marks1 = Array.from(cards[1].querySelectorAll("mark.covered"))
      .map((m) => (m as HTMLElement).dataset.token);
    expect(new Set(marks0)).toEqual(new Set(["go", "see"]));
    expect(new Set(marks1)).toEqual(new Set(["come", "along"]));
  });

  it("replaces cards on re-render", () => {
    render(response([["s1", "first first first", []]]));
    render(response([["s2", "second second second", []]]));
    const cards = list.querySelectorAll(".card");
    expect(cards.length).toBe(1);
    expect(cards[0].textContent).toContain("second");
  });

  it("click hands the card text to the accept callback", () => {
    render(response([["s1", "Take this sentence.", []]]));
    (list.querySelector(".card") as HTMLElement).click();
    expect(accepted).toEqual(["Take this sentence."]);
  });

  it("cross-highlights matching query tokens on hover", () => {
    renderQueryEcho(document, echo, "come along friend");
    render(response([["s1", "Come, go along!", ["come", "along"]]]));
    const card = list.querySelector(".card") as HTMLElement;
    card.dispatchEvent(new Event("mouseenter"));
    const hit = Array.from(echo.querySelectorAll(".query-token.cross-hit"))
      .map((s) => (s as HTMLElement).dataset.token);
    expect(new Set(hit)).toEqual(new Set(["come", "along"]));
    card.dispatchEvent(new Event("mouseleave"));
    expect(echo.querySelectorAll(".query-token.cross-hit").length).toBe(0);
  });

  it("notes truncated results", () => {
    const resp = response([["s1", "only one here", []]]);
    resp.truncated = true;
    render(resp);
    expect(list.querySelector(".truncated-note")).not.toBeNull();
  });
});
