/**
 * 64-bit Simhash over canonical feature strings.
 *
 * Bit i of the fingerprint is 1 iff the weighted vote sum over feature
 * hashes is strictly positive at position i (a tie gives 0); the empty
 * set maps to 0. Matches the server's fingerprints bit for bit.
 */

import { fnv1a64, U64 } from "./fnv.js";

export function simhash(features: Iterable<string>): U64 {
  const votes = new Float64Array(64);
  let any = false;
  for (const feature of features) {
    any = true;
    const h = fnv1a64(feature);
    for (let i = 0; i < 32; i++) {
      votes[i] = votes[i]! + ((h.lo >>> i) & 1 ? 1 : -1);
      votes[i + 32] = votes[i + 32]! + ((h.hi >>> i) & 1 ? 1 : -1);
    }
  }
  if (!any) return { hi: 0, lo: 0 };
  let hi = 0;
  let lo = 0;
  for (let i = 0; i < 32; i++) {
    if (votes[i]! > 0) lo |= 1 << i;
    if (votes[i + 32]! > 0) hi |= 1 << i;
  }
  return { hi: hi >>> 0, lo: lo >>> 0 };
}

function popcount32(x: number): number {
  x = x - ((x >> 1) & 0x55555555);
  x = (x & 0x33333333) + ((x >> 2) & 0x33333333);
  x = (x + (x >> 4)) & 0x0f0f0f0f;
  return (x * 0x01010101) >>> 24;
}

export function hamming(a: U64, b: U64): number {
  return popcount32((a.hi ^ b.hi) >>> 0) + popcount32((a.lo ^ b.lo) >>> 0);
}
