/**
 * 64-bit FNV-1a over UTF-8 bytes, without BigInt in the hot path.
 *
 * A 64-bit value is carried as two unsigned 32-bit halves. The prime
 * 0x100000001b3 is 2^40 + 2^8 + 0xb3, so one multiplication step is two
 * shifts and one small multiply, all exact in float64.
 */

export interface U64 {
  hi: number;
  lo: number;
}

const FNV_OFFSET_HI = 0xcbf29ce4;
const FNV_OFFSET_LO = 0x84222325;

const encoder = new TextEncoder();

/** h * 0x100000001b3 mod 2^64. */
function mulPrime(hi: number, lo: number): U64 {
  // h * 0xb3
  const p0lo = lo * 0xb3; // < 2^40, exact
  const p0hi = hi * 0xb3 + Math.floor(p0lo / 0x100000000);
  // h << 8 and h << 40 (the latter only reaches the high half)
  const p1hi = ((hi << 8) | (lo >>> 24)) >>> 0;
  const p1lo = (lo << 8) >>> 0;
  const p2hi = (lo << 8) >>> 0;
  const loSum = (p0lo >>> 0) + p1lo;
  const carry = loSum > 0xffffffff ? 1 : 0;
  return {
    hi: ((p0hi >>> 0) + p1hi + p2hi + carry) >>> 0,
    lo: loSum >>> 0,
  };
}

export function fnv1a64(s: string): U64 {
  const bytes = encoder.encode(s);
  let hi = FNV_OFFSET_HI;
  let lo = FNV_OFFSET_LO;
  for (let i = 0; i < bytes.length; i++) {
    lo = (lo ^ bytes[i]!) >>> 0;
    const product = mulPrime(hi, lo);
    hi = product.hi;
    lo = product.lo;
  }
  return { hi, lo };
}

export function toHex(v: U64): string {
  return (
    v.hi.toString(16).padStart(8, "0") + v.lo.toString(16).padStart(8, "0")
  );
}

export function fromHex(s: string): U64 {
  if (!/^[0-9a-f]{16}$/.test(s)) {
    throw new Error(`not a 16-digit lowercase hex fingerprint: ${s}`);
  }
  return {
    hi: parseInt(s.slice(0, 8), 16),
    lo: parseInt(s.slice(8), 16),
  };
}

/** Bit i (0 = least significant) of a 64-bit value. */
export function bit(v: U64, i: number): number {
  return i < 32 ? (v.lo >>> i) & 1 : (v.hi >>> (i - 32)) & 1;
}
