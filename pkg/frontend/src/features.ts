/**
 * Feature extraction from a live DOM, per the canonical feature grammar
 * (docs/feature-grammar.md in the server repository).
 *
 * The server scans raw HTML; this walker reads the tree the browser
 * already built. Both must emit identical feature strings — the shared
 * fixture corpus pins that.
 */

import { toHex, U64 } from "./fnv.js";
import { simhash } from "./simhash.js";

/** Subtrees invisible to both channels' contents (the elements
 * themselves still contribute node and edge features). */
const SKIP_SUBTREE = new Set(["script", "style", "noscript", "template"]);

// Same class the server compiles: Python str.isspace() ∪ JS \s below
// U+3001, plus the BOM.
const WS =
  "\\t\\n\\x0B\\x0C\\r\\x1C-\\x1F \\x85\\xA0\\u1680\\u2000-\\u200A" +
  "\\u2028\\u2029\\u202F\\u205F\\u3000\\uFEFF";
const NON_WS_RE = new RegExp(`[^${WS}]+`, "gu");

const TEXT_NODE = 3;
const ELEMENT_NODE = 1;

export interface PageFeatures {
  text: Set<string>;
  tag: Set<string>;
}

export interface DomFingerprints {
  textHex: string;
  tagHex: string;
  textCount: number;
  tagCount: number;
}

export function wordsOf(text: string): string[] {
  return text.toLowerCase().match(NON_WS_RE) ?? [];
}

/** Unigrams, bigrams and trigrams, space-joined, set semantics. */
export function textNgrams(words: string[]): Set<string> {
  const features = new Set<string>();
  for (const w of words) features.add(w);
  for (let i = 0; i + 1 < words.length; i++) {
    features.add(words[i] + " " + words[i + 1]);
  }
  for (let i = 0; i + 2 < words.length; i++) {
    features.add(words[i] + " " + words[i + 1] + " " + words[i + 2]);
  }
  return features;
}

function nodeFeature(el: Element): string {
  const attrs = Array.from(
    new Set(el.getAttributeNames().map((a) => a.toLowerCase())),
  ).sort();
  return el.tagName.toLowerCase() + ";" + attrs.join(",");
}

function walk(
  el: Element,
  parentName: string | null,
  textParts: string[],
  tags: Set<string>,
): void {
  const name = el.tagName.toLowerCase();
  tags.add(nodeFeature(el));
  if (parentName !== null) tags.add(`(${name},${parentName})`);
  if (SKIP_SUBTREE.has(name)) return;
  for (const child of el.childNodes) {
    if (child.nodeType === TEXT_NODE) {
      textParts.push(child.nodeValue ?? "");
    } else if (child.nodeType === ELEMENT_NODE) {
      walk(child as Element, name, textParts, tags);
    }
  }
}

export function extractFeatures(root: Element): PageFeatures {
  const textParts: string[] = [];
  const tags = new Set<string>();
  walk(root, null, textParts, tags);
  return { text: textNgrams(wordsOf(textParts.join(""))), tag: tags };
}

export function fingerprintDom(root: Element): DomFingerprints {
  const { text, tag } = extractFeatures(root);
  return {
    textHex: toHex(simhash(text)),
    tagHex: toHex(simhash(tag)),
    textCount: text.size,
    tagCount: tag.size,
  };
}

export type { U64 };
