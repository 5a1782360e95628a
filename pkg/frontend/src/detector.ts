/**
 * Client-side channel tests against a served website model.
 *
 * A view is accepted when some cluster explains it: the bit distance to
 * the centroid, less the churn radius R and the cluster's mean merge
 * height, stays within T population-standard-deviations of the merge
 * history. Cloaking requires both channels to reject (combiner "both",
 * the default) — the text channel alone flags every dynamic site.
 */

import { bit, U64 } from "./fnv.js";

export interface Cluster {
  centroid: number[];
  link_heights: number[];
  size: number;
}

export interface WebsiteModel {
  url_key: string;
  built_at: string;
  params_fingerprint: string;
  channels: { text: Cluster[]; tag: Cluster[] };
}

export type Combiner = "both" | "either" | "text-only" | "tag-only";

export interface DetectionParams {
  t_detect_text: number;
  t_detect_tag: number;
  r_text: number;
  r_tag: number;
  t_learn_text: number;
  t_learn_tag: number;
  combiner: Combiner;
}

export interface ChannelResult {
  rejected: boolean;
  distance: number;
  min_excess: number;
  nearest_cluster_index: number;
}

/** L1 distance from a fingerprint's bits to a (fractional) centroid. */
export function centroidDistance(s: U64, centroid: number[]): number {
  let d = 0;
  for (let i = 0; i < 64; i++) {
    d += Math.abs(bit(s, i) - centroid[i]!);
  }
  return d;
}

function mean(xs: number[]): number {
  let s = 0;
  for (const x of xs) s += x;
  return s / xs.length;
}

function pstdev(xs: number[], mu: number): number {
  let s = 0;
  for (const x of xs) s += (x - mu) * (x - mu);
  return Math.sqrt(s / xs.length);
}

export function channelTest(
  sUser: U64,
  clusters: Cluster[],
  tDetect: number,
  r: number,
): ChannelResult {
  if (clusters.length === 0) throw new Error("channel has no clusters");
  let bestExcess = 0;
  let bestIndex = -1;
  let bestDistance = 0;
  for (let k = 0; k < clusters.length; k++) {
    const cluster = clusters[k]!;
    const d = centroidDistance(sUser, cluster.centroid);
    const links = cluster.link_heights;
    const mu = links.length > 0 ? mean(links) : 0;
    const sigma = links.length >= 2 ? pstdev(links, mu) : 0;
    const excess = d - r - mu - tDetect * sigma;
    if (bestIndex < 0 || excess < bestExcess) {
      bestExcess = excess;
      bestIndex = k;
      bestDistance = d;
    }
  }
  return {
    rejected: bestExcess > 0,
    distance: bestDistance,
    min_excess: bestExcess,
    nearest_cluster_index: bestIndex,
  };
}

export function combine(
  textRejected: boolean,
  tagRejected: boolean,
  combiner: Combiner,
): boolean {
  switch (combiner) {
    case "both":
      return textRejected && tagRejected;
    case "either":
      return textRejected || tagRejected;
    case "text-only":
      return textRejected;
    case "tag-only":
      return tagRejected;
  }
}

export function isWebsiteModel(value: unknown): value is WebsiteModel {
  if (typeof value !== "object" || value === null) return false;
  const candidate = value as Record<string, unknown>;
  const channels = candidate["channels"] as
    | Record<string, unknown>
    | undefined;
  if (typeof candidate["url_key"] !== "string" || !channels) return false;
  for (const name of ["text", "tag"]) {
    const clusters = channels[name];
    if (!Array.isArray(clusters) || clusters.length === 0) return false;
    for (const c of clusters) {
      if (
        !Array.isArray(c.centroid) ||
        c.centroid.length !== 64 ||
        !Array.isArray(c.link_heights) ||
        typeof c.size !== "number"
      ) {
        return false;
      }
    }
  }
  return true;
}
