"""Server configuration: crawl cadence, agent profiles, detection params."""

from __future__ import annotations

import json
from dataclasses import dataclass, field

from ..detector import DetectionParams

# Exact crawler/user identities presented to target sites. The spider
# strings make sites apply their crawler-facing behavior; the user
# string replays an ordinary desktop browser.
DEFAULT_AGENT_PROFILES = {
    "googlebot": "Googlebot/2.1 (+http://www.google.com/bot.html)",
    "adsbot": "AdsBot-Google (+http://www.google.com/adsbot.html)",
    "chrome_user": (
        "Mozilla/5.0 (Windows NT 6.3; Win64; x64) AppleWebKit/537.36 "
        "(KHTML, like Gecko) Chrome/37.0.2049.0 Safari/537.36"
    ),
}


@dataclass
class ServerConfig:
    """Runtime knobs; see README for the JSON schema."""

    listen: str = "127.0.0.1:8337"
    db_path: str = "cloakwatch.db"
    crawl_interval_hours: float = 1.0
    visit_count: int = 5
    max_observations: int = 6
    fetch_timeout_seconds: float = 30.0
    redirect_cap: int = 10
    fetch_concurrency: int = 4
    poll_interval_seconds: float = 1.0
    default_agent_profile: str = "googlebot"
    referer: str | None = None
    agent_profiles: dict[str, str] = field(
        default_factory=lambda: dict(DEFAULT_AGENT_PROFILES)
    )
    detection: DetectionParams = field(default_factory=DetectionParams)

    def __post_init__(self) -> None:
        if self.visit_count < 1:
            raise ValueError("visit_count must be >= 1")
        if self.max_observations < 1:
            raise ValueError("max_observations must be >= 1")
        if self.crawl_interval_hours <= 0:
            raise ValueError("crawl_interval_hours must be > 0")
        if self.fetch_concurrency < 1:
            raise ValueError("fetch_concurrency must be >= 1")
        if self.default_agent_profile not in self.agent_profiles:
            raise ValueError(
                f"default_agent_profile {self.default_agent_profile!r} "
                "is not in agent_profiles"
            )
        host, _, port = self.listen.rpartition(":")
        if not host or not port.isdigit():
            raise ValueError(f"listen must be host:port, got {self.listen!r}")

    @property
    def host(self) -> str:
        return self.listen.rpartition(":")[0]

    @property
    def port(self) -> int:
        return int(self.listen.rpartition(":")[2])

    @classmethod
    def from_dict(cls, data: dict) -> "ServerConfig":
        data = dict(data)
        unknown = set(data) - {f for f in cls.__dataclass_fields__}
        if unknown:
            raise ValueError(f"unknown config keys: {sorted(unknown)}")
        if "agent_profiles" in data:
            profiles = dict(DEFAULT_AGENT_PROFILES)
            profiles.update(data["agent_profiles"])
            data["agent_profiles"] = profiles
        if "detection" in data:
            data["detection"] = DetectionParams.from_dict(data["detection"])
        return cls(**data)

    @classmethod
    def from_file(cls, path: str) -> "ServerConfig":
        with open(path, "r", encoding="utf-8") as fh:
            data = json.load(fh)
        if not isinstance(data, dict):
            raise ValueError("config root must be a JSON object")
        return cls.from_dict(data)
