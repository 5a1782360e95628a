"""Model store, crawl scheduler and HTTP API."""

from .config import DEFAULT_AGENT_PROFILES, ServerConfig
from .fetch import fetch_page
from .service import CrawlService, JobTransition, ModelLookup, SystemClock
from .store import CrawlJob, Store

__all__ = [
    "DEFAULT_AGENT_PROFILES",
    "ServerConfig",
    "fetch_page",
    "CrawlService",
    "JobTransition",
    "ModelLookup",
    "SystemClock",
    "CrawlJob",
    "Store",
]
