/**
 * Per-navigation check: decide whether to consult the server, run both
 * channel tests locally, and say whether to warn.
 *
 * Privacy property: the page's content never leaves the browser. The
 * only thing sent is the landing URL (so the server can crawl it); the
 * fingerprint comparison happens here.
 */

import {
  channelTest,
  combine,
  DetectionParams,
  isWebsiteModel,
  ChannelResult,
} from "./detector.js";
import { fromHex } from "./fnv.js";
import { DomFingerprints } from "./features.js";
import { normalize } from "./urlnorm.js";
import { VisitedList } from "./visited.js";

export interface Navigation {
  url: string;
  referrer: string;
}

export interface HttpResponse {
  status: number;
  body: unknown;
}

export interface ClientDeps {
  serverBase: string;
  /** Origins whose result pages count as search clicks. */
  searchOrigins: readonly string[];
  fetchJson(url: string): Promise<HttpResponse>;
  visited: VisitedList;
  /** Fingerprint the rendered DOM (bound to the document by the caller). */
  extract(): DomFingerprints;
  now(): Date;
}

/** Same shape as the server's Verdict, plus what the UI did with it. */
export interface ClientVerdict {
  url_key: string;
  channel_results: Record<string, ChannelResult>;
  is_cloaking: boolean;
  feature_counts: Record<string, number>;
  evaluated_at: string;
  display: { suppressed_by_list: boolean; shown: boolean };
}

export const DEFAULT_SEARCH_ORIGINS: readonly string[] = [
  "https://www.google.com",
  "https://www.bing.com",
  "https://duckduckgo.com",
  "https://search.yahoo.com",
  "https://www.baidu.com",
];

function isSearchReferrer(
  referrer: string,
  origins: readonly string[],
): boolean {
  if (!referrer) return false;
  let origin: string;
  try {
    origin = new URL(referrer).origin;
  } catch {
    return false;
  }
  return origins.includes(origin);
}

function isDetectionParams(value: unknown): value is DetectionParams {
  if (typeof value !== "object" || value === null) return false;
  const p = value as Record<string, unknown>;
  return (
    typeof p["t_detect_text"] === "number" &&
    typeof p["t_detect_tag"] === "number" &&
    typeof p["r_text"] === "number" &&
    typeof p["r_tag"] === "number" &&
    typeof p["combiner"] === "string"
  );
}

/**
 * Handle one navigation. Returns a verdict when a decision was reached,
 * undefined when the navigation is out of scope (no search referrer,
 * invalid URL) or no decision is possible yet (model pending, server
 * unreachable, malformed response) — in those cases nothing is recorded
 * so a later visit retries.
 */
export async function onSearchClick(
  nav: Navigation,
  deps: ClientDeps,
): Promise<ClientVerdict | undefined> {
  if (!isSearchReferrer(nav.referrer, deps.searchOrigins)) return undefined;

  let key: string;
  try {
    key = normalize(nav.url);
  } catch {
    return undefined;
  }

  if (deps.visited.has(key)) {
    return {
      url_key: key,
      channel_results: {},
      is_cloaking: false,
      feature_counts: {},
      evaluated_at: deps.now().toISOString(),
      display: { suppressed_by_list: true, shown: false },
    };
  }

  let swm: HttpResponse;
  try {
    swm = await deps.fetchJson(
      `${deps.serverBase}/v1/swm?url=${encodeURIComponent(nav.url)}`,
    );
  } catch {
    return undefined;
  }
  if (swm.status !== 200) return undefined; // 202 pending, or an error

  const body = swm.body as Record<string, unknown> | null;
  if (body && typeof body === "object" && "listed" in body) {
    const black = body["listed"] === "black";
    await deps.visited.add(key, deps.now());
    return {
      url_key: key,
      channel_results: {},
      is_cloaking: black,
      feature_counts: {},
      evaluated_at: deps.now().toISOString(),
      display: { suppressed_by_list: false, shown: black },
    };
  }
  if (!isWebsiteModel(body)) return undefined;

  let params: DetectionParams;
  try {
    const response = await deps.fetchJson(`${deps.serverBase}/v1/params`);
    if (response.status !== 200 || !isDetectionParams(response.body)) {
      return undefined;
    }
    params = response.body;
  } catch {
    return undefined;
  }

  const fp = deps.extract();
  const text = channelTest(
    fromHex(fp.textHex),
    body.channels.text,
    params.t_detect_text,
    params.r_text,
  );
  const tag = channelTest(
    fromHex(fp.tagHex),
    body.channels.tag,
    params.t_detect_tag,
    params.r_tag,
  );
  const isCloaking = combine(text.rejected, tag.rejected, params.combiner);

  await deps.visited.add(key, deps.now());
  return {
    url_key: key,
    channel_results: { text, tag },
    is_cloaking: isCloaking,
    feature_counts: { text: fp.textCount, tag: fp.tagCount },
    evaluated_at: deps.now().toISOString(),
    display: { suppressed_by_list: false, shown: isCloaking },
  };
}
