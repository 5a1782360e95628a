/**
 * URL → model key, identical to the server's normalization.
 *
 * Key = lowercased host + path verbatim + "?" + parameter names (order
 * kept, values and "=" dropped) when a query is present. Scheme,
 * fragment, userinfo and default ports are dropped. Parsed from the raw
 * string: the WHATWG URL class percent-encodes and otherwise rewrites
 * components, which would desynchronize the two implementations.
 */

export class InvalidUrl extends Error {}

const DEFAULT_PORTS: Record<string, number> = {
  http: 80,
  https: 443,
  ws: 80,
  wss: 443,
  ftp: 21,
};

const ABSOLUTE_RE =
  /^([a-zA-Z][a-zA-Z0-9+.-]*):\/\/([^/?#]*)((?:[^?#])*)(?:\?([^#]*))?(?:#[\s\S]*)?$/;

export function normalize(url: string): string {
  const match = ABSOLUTE_RE.exec(url);
  if (!match) throw new InvalidUrl(`not an absolute URL: ${url}`);
  const scheme = match[1]!.toLowerCase();
  const authority = match[2]!;
  const path = match[3]!;
  const query = match[4];

  const at = authority.lastIndexOf("@");
  const hostport = at >= 0 ? authority.slice(at + 1) : authority;

  let host: string;
  let portStr: string | null = null;
  if (hostport.startsWith("[")) {
    const close = hostport.indexOf("]");
    if (close < 0) throw new InvalidUrl(`invalid IPv6 literal: ${url}`);
    host = hostport.slice(0, close + 1).toLowerCase();
    const rest = hostport.slice(close + 1);
    if (rest.startsWith(":")) portStr = rest.slice(1);
    else if (rest !== "") throw new InvalidUrl(`invalid IPv6 literal: ${url}`);
  } else {
    const colon = hostport.lastIndexOf(":");
    if (colon >= 0) {
      host = hostport.slice(0, colon).toLowerCase();
      portStr = hostport.slice(colon + 1);
    } else {
      host = hostport.toLowerCase();
    }
  }
  if (host === "") throw new InvalidUrl(`not an absolute URL: ${url}`);

  let hostKey = host;
  if (portStr !== null && portStr !== "") {
    if (!/^[0-9]+$/.test(portStr)) {
      throw new InvalidUrl(`invalid port ${portStr!}`);
    }
    const port = parseInt(portStr, 10);
    if (port > 65535) throw new InvalidUrl(`port out of range: ${port}`);
    // Keys re-enter normalization behind an "http://" prefix, so port 80
    // must drop under every scheme or idempotence breaks.
    if (port !== 80 && port !== DEFAULT_PORTS[scheme]) {
      hostKey = `${host}:${port}`;
    }
  }

  let key = hostKey + path;
  if (query !== undefined && query !== "") {
    key +=
      "?" +
      query
        .split("&")
        .map((segment) => segment.split("=", 1)[0])
        .join("&");
  }
  return key;
}
