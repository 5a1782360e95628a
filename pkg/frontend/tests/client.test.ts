/**
 * Trigger discipline and verdict flow for the per-navigation check:
 * no server traffic without a search referrer, exactly one model
 * request on a first search click, none on a revisit.
 */

import { describe, expect, it } from "vitest";

import { ClientDeps, onSearchClick } from "../src/client.js";
import { Cluster, DetectionParams } from "../src/detector.js";
import { VisitedList } from "../src/visited.js";

const PARAMS: DetectionParams = {
  t_detect_text: 2.1,
  t_detect_tag: 1.8,
  r_text: 15,
  r_tag: 13,
  t_learn_text: 0.7,
  t_learn_tag: 0.7,
  combiner: "both",
};

const zeroCluster: Cluster = {
  centroid: Array(64).fill(0),
  link_heights: [],
  size: 1,
};

function model(urlKey: string) {
  return {
    url_key: urlKey,
    built_at: "2024-05-01T00:00:00+00:00",
    params_fingerprint: "0011223344556677",
    channels: { text: [zeroCluster], tag: [zeroCluster] },
  };
}

interface FakeServer {
  deps: ClientDeps;
  swmCalls: string[];
  allCalls: string[];
}

/** Deps with a recording fake server; override pieces per test. */
function makeDeps(
  overrides: {
    swmResponse?: { status: number; body: unknown };
    extract?: ClientDeps["extract"];
    failFetch?: boolean;
  } = {},
): FakeServer {
  const swmCalls: string[] = [];
  const allCalls: string[] = [];
  const deps: ClientDeps = {
    serverBase: "http://srv.test",
    searchOrigins: ["https://www.google.com", "https://duckduckgo.com"],
    async fetchJson(url) {
      allCalls.push(url);
      if (overrides.failFetch) throw new Error("connection refused");
      if (url.includes("/v1/swm")) {
        swmCalls.push(url);
        return (
          overrides.swmResponse ?? {
            status: 200,
            body: model("landing.test/offer"),
          }
        );
      }
      if (url.includes("/v1/params")) return { status: 200, body: PARAMS };
      return { status: 404, body: {} };
    },
    visited: new VisitedList(100),
    extract:
      overrides.extract ??
      (() => ({
        // matches the all-zero centroid: clean
        textHex: "0000000000000000",
        tagHex: "0000000000000000",
        textCount: 12,
        tagCount: 7,
      })),
    now: () => new Date("2024-05-02T03:04:05Z"),
  };
  return { deps, swmCalls, allCalls };
}

const NAV = {
  url: "http://landing.test/offer?id=9",
  referrer: "https://www.google.com/search?q=offers",
};

describe("trigger discipline", () => {
  it("issues zero requests without a search referrer", async () => {
    const { deps, allCalls } = makeDeps();
    const directEntry = await onSearchClick(
      { url: NAV.url, referrer: "" },
      deps,
    );
    const otherSite = await onSearchClick(
      { url: NAV.url, referrer: "https://unrelated.example/page" },
      deps,
    );
    const junkReferrer = await onSearchClick(
      { url: NAV.url, referrer: "not a url" },
      deps,
    );
    expect(directEntry).toBeUndefined();
    expect(otherSite).toBeUndefined();
    expect(junkReferrer).toBeUndefined();
    expect(allCalls).toEqual([]);
  });

  it("issues exactly one model request on a first search click", async () => {
    const { deps, swmCalls } = makeDeps();
    const verdict = await onSearchClick(NAV, deps);
    expect(swmCalls).toHaveLength(1);
    expect(swmCalls[0]).toBe(
      "http://srv.test/v1/swm?url=" + encodeURIComponent(NAV.url),
    );
    expect(verdict).toBeDefined();
    expect(verdict!.is_cloaking).toBe(false);
    expect(verdict!.display).toEqual({
      suppressed_by_list: false,
      shown: false,
    });
  });

  it("issues none on a second visit to the same key", async () => {
    const { deps, swmCalls } = makeDeps();
    await onSearchClick(NAV, deps);
    expect(swmCalls).toHaveLength(1);

    // same key: equivalent URL with a different parameter value
    const revisit = await onSearchClick(
      { url: "https://landing.test/offer?id=200", referrer: NAV.referrer },
      deps,
    );
    expect(swmCalls).toHaveLength(1);
    expect(revisit!.display.suppressed_by_list).toBe(true);
    expect(revisit!.display.shown).toBe(false);
    expect(revisit!.is_cloaking).toBe(false);
  });

  it("skips invalid landing URLs without traffic", async () => {
    const { deps, allCalls } = makeDeps();
    const verdict = await onSearchClick(
      { url: "/relative/only", referrer: NAV.referrer },
      deps,
    );
    expect(verdict).toBeUndefined();
    expect(allCalls).toEqual([]);
  });
});

describe("verdict flow", () => {
  it("pending model: no verdict, nothing recorded, retried next time", async () => {
    const { deps, swmCalls } = makeDeps({
      swmResponse: { status: 202, body: { status: "pending" } },
    });
    expect(await onSearchClick(NAV, deps)).toBeUndefined();
    expect(deps.visited.has("landing.test/offer?id")).toBe(false);
    await onSearchClick(NAV, deps); // not suppressed: asks again
    expect(swmCalls).toHaveLength(2);
  });

  it("unreachable server: no verdict, nothing recorded", async () => {
    const { deps } = makeDeps({ failFetch: true });
    expect(await onSearchClick(NAV, deps)).toBeUndefined();
    expect(deps.visited.size).toBe(0);
  });

  it("malformed model body: no verdict, nothing recorded", async () => {
    const { deps } = makeDeps({
      swmResponse: { status: 200, body: { nonsense: true } },
    });
    expect(await onSearchClick(NAV, deps)).toBeUndefined();
    expect(deps.visited.size).toBe(0);
  });

  it("flags a view no cluster explains, and only then shows", async () => {
    const { deps } = makeDeps({
      extract: () => ({
        textHex: "ffffffffffffffff", // 64 bits from the zero centroid
        tagHex: "ffffffffffffffff",
        textCount: 200,
        tagCount: 31,
      }),
    });
    const verdict = await onSearchClick(NAV, deps);
    expect(verdict!.is_cloaking).toBe(true);
    expect(verdict!.display.shown).toBe(true);
    expect(verdict!.channel_results["text"]!.rejected).toBe(true);
    expect(verdict!.channel_results["text"]!.distance).toBe(64);
    expect(verdict!.channel_results["tag"]!.rejected).toBe(true);
    expect(verdict!.feature_counts).toEqual({ text: 200, tag: 31 });
    expect(verdict!.url_key).toBe("landing.test/offer?id");
  });

  it("one rejecting channel is not cloaking under the default combiner", async () => {
    const { deps } = makeDeps({
      extract: () => ({
        textHex: "ffffffffffffffff",
        tagHex: "0000000000000000",
        textCount: 200,
        tagCount: 7,
      }),
    });
    const verdict = await onSearchClick(NAV, deps);
    expect(verdict!.channel_results["text"]!.rejected).toBe(true);
    expect(verdict!.is_cloaking).toBe(false);
    expect(verdict!.display.shown).toBe(false);
  });

  it("records the key once a verdict is reached", async () => {
    const { deps } = makeDeps();
    await onSearchClick(NAV, deps);
    expect(deps.visited.has("landing.test/offer?id")).toBe(true);
  });

  it("blacklisted key warns without channel tests", async () => {
    const { deps, allCalls } = makeDeps({
      swmResponse: { status: 200, body: { listed: "black" } },
    });
    const verdict = await onSearchClick(NAV, deps);
    expect(verdict!.is_cloaking).toBe(true);
    expect(verdict!.display.shown).toBe(true);
    expect(verdict!.channel_results).toEqual({});
    expect(allCalls.filter((u) => u.includes("/v1/params"))).toHaveLength(0);
    expect(deps.visited.has("landing.test/offer?id")).toBe(true);
  });

  it("whitelisted key passes without channel tests", async () => {
    const { deps } = makeDeps({
      swmResponse: { status: 200, body: { listed: "white" } },
    });
    const verdict = await onSearchClick(NAV, deps);
    expect(verdict!.is_cloaking).toBe(false);
    expect(verdict!.display.shown).toBe(false);
  });

  it("never shows without a cloaking verdict (shown implies cloaking)", async () => {
    const outcomes = [
      await onSearchClick(NAV, makeDeps().deps),
      await onSearchClick(
        NAV,
        makeDeps({ swmResponse: { status: 200, body: { listed: "white" } } })
          .deps,
      ),
      await onSearchClick(
        NAV,
        makeDeps({
          extract: () => ({
            textHex: "ffffffffffffffff",
            tagHex: "ffffffffffffffff",
            textCount: 1,
            tagCount: 1,
          }),
        }).deps,
      ),
    ];
    for (const verdict of outcomes) {
      if (verdict?.display.shown) expect(verdict.is_cloaking).toBe(true);
    }
  });
});
