"""HTTP fetching with a chosen agent identity.

Redirects are followed manually so the hop cap is exact and the final
URL is recorded. All failures map onto the fetch error taxonomy; a
failed fetch marks one visit failed, never the whole crawl job.
"""

from __future__ import annotations

from urllib.parse import urljoin

import httpx

from ..errors import FetchHttpError, FetchTimeout, TooManyRedirects
from ..features import PageDocument
from .config import DEFAULT_AGENT_PROFILES


def fetch_page(
    target_url: str,
    agent_profile: str,
    profiles: dict[str, str] | None = None,
    timeout: float = 30.0,
    redirect_cap: int = 10,
    referer: str | None = None,
    transport: httpx.BaseTransport | None = None,
) -> PageDocument:
    """GET a page presenting the given agent profile's user-agent string.

    `transport` is injectable for tests (httpx.MockTransport).
    """
    profiles = profiles if profiles is not None else DEFAULT_AGENT_PROFILES
    if agent_profile not in profiles:
        raise ValueError(f"unknown agent profile {agent_profile!r}")
    headers = {"User-Agent": profiles[agent_profile]}
    if referer:
        headers["Referer"] = referer
    url = target_url
    try:
        with httpx.Client(
            headers=headers,
            timeout=timeout,
            follow_redirects=False,
            transport=transport,
        ) as client:
            for _ in range(redirect_cap + 1):
                response = client.get(url)
                if response.is_redirect:
                    location = response.headers.get("location")
                    if not location:
                        raise FetchHttpError(response.status_code, "redirect without location")
                    url = urljoin(url, location)
                    continue
                if response.status_code >= 400:
                    raise FetchHttpError(response.status_code)
                return PageDocument(
                    raw_bytes=response.content,
                    declared_charset=response.charset_encoding,
                    final_url=str(response.url),
                )
            raise TooManyRedirects(f"more than {redirect_cap} redirects from {target_url}")
    except httpx.TimeoutException as exc:
        raise FetchTimeout(str(exc)) from exc
    except httpx.TransportError as exc:
        # unreachable hosts and connection resets behave like timeouts
        raise FetchTimeout(str(exc)) from exc
