/**
 * Content script: runs once per document, after load. Checks the
 * navigation, and renders a warning banner when the verdict says
 * cloaking. All state beyond the visited list is per-navigation, so
 * "at most one in-flight check per tab" holds by construction.
 */

import {
  ClientDeps,
  ClientVerdict,
  DEFAULT_SEARCH_ORIGINS,
  onSearchClick,
} from "./client.js";
import { fingerprintDom } from "./features.js";
import { KeyValueStore, VisitedList } from "./visited.js";

const SERVER_BASE = "http://127.0.0.1:8337";

function storageAdapter(): KeyValueStore | undefined {
  if (typeof chrome === "undefined" || !chrome?.storage) return undefined;
  const area = chrome.storage.local;
  return {
    async get(key) {
      const items = await area.get([key]);
      const value = items[key];
      return typeof value === "string" ? value : undefined;
    },
    async set(key, value) {
      await area.set({ [key]: value });
    },
  };
}

function renderBanner(verdict: ClientVerdict): void {
  const banner = document.createElement("div");
  banner.setAttribute(
    "style",
    [
      "position:fixed",
      "top:0",
      "left:0",
      "right:0",
      "z-index:2147483647",
      "background:#7a1f1f",
      "color:#fff",
      "font:14px/1.5 system-ui,sans-serif",
      "padding:10px 16px",
      "display:flex",
      "gap:12px",
      "align-items:center",
    ].join(";"),
  );

  const message = document.createElement("span");
  message.textContent =
    "Warning: this page looks different from what search engines were shown. " +
    "It may be hiding its real content (cloaking).";
  banner.appendChild(message);

  const report = document.createElement("button");
  report.textContent = "Report false positive";
  report.addEventListener("click", () => {
    const { display: _display, ...wireVerdict } = verdict;
    void fetch(`${SERVER_BASE}/v1/reports`, {
      method: "POST",
      headers: { "content-type": "application/json" },
      body: JSON.stringify(wireVerdict),
    });
    banner.remove();
  });
  banner.appendChild(report);

  const dismiss = document.createElement("button");
  dismiss.textContent = "Dismiss";
  dismiss.addEventListener("click", () => banner.remove());
  banner.appendChild(dismiss);

  document.body.appendChild(banner);
}

async function run(): Promise<void> {
  const visited = new VisitedList(5000, storageAdapter());
  await visited.load();

  const deps: ClientDeps = {
    serverBase: SERVER_BASE,
    searchOrigins: DEFAULT_SEARCH_ORIGINS,
    async fetchJson(url) {
      const response = await fetch(url);
      return { status: response.status, body: await response.json() };
    },
    visited,
    extract: () => fingerprintDom(document.documentElement),
    now: () => new Date(),
  };

  const verdict = await onSearchClick(
    { url: location.href, referrer: document.referrer },
    deps,
  );
  if (verdict?.display.shown) renderBanner(verdict);
}

void run();
