"""URL normalization to the canonical keys that models are stored under.

Different visits to one logical page usually differ only in parameter
values, fragments, or scheme; the key keeps what identifies the page
(host, path, parameter names in order) and drops the rest.
"""

from __future__ import annotations

from urllib.parse import urlsplit

from .errors import InvalidUrl

_DEFAULT_PORTS = {"http": 80, "https": 443, "ws": 80, "wss": 443, "ftp": 21}


def normalize(url: str) -> str:
    """Reduce an absolute URL to its model key.

    Key = lowercased host + path verbatim + "?" + parameter names
    (original order, values and "=" dropped) when a query is present.
    Scheme, fragment, userinfo and default ports are dropped.

    >>> normalize("http://www.example.com/?user=value#fragment")
    'www.example.com/?user'

    Raises InvalidUrl unless the URL is absolute (scheme and host).
    """
    try:
        parts = urlsplit(url)
        host = parts.hostname
        port = parts.port  # raises ValueError on malformed ports
    except ValueError as exc:
        raise InvalidUrl(str(exc)) from exc
    if not parts.scheme or not host:
        raise InvalidUrl(f"not an absolute URL: {url!r}")
    if ":" in host:  # bare IPv6 address, restore brackets
        host = "[" + host + "]"
    # Keys re-enter normalization behind an "http://" prefix, so port 80
    # must drop under every scheme or idempotence breaks (https://h:80).
    if port is not None and port != 80 and port != _DEFAULT_PORTS.get(parts.scheme.lower()):
        host = f"{host}:{port}"
    key = host + parts.path
    if parts.query:
        names = [segment.split("=", 1)[0] for segment in parts.query.split("&")]
        key += "?" + "&".join(names)
    return key
