"""Website models: clustering repeated page observations per channel.

A site's legitimate variation over time (rotating ads, templated
content, redesigns) shows up as groups of nearby fingerprints. Each
group is summarized by a cluster: a real-valued centroid over the 64
bit positions plus the merge distances ("link heights") recorded while
the cluster grew. A website model holds the clusters of both channels
for one normalized URL; it is small, constant-size, and safe to ship to
clients because it contains no page content.
"""

from __future__ import annotations

import json
from dataclasses import dataclass
from datetime import datetime, timezone
from statistics import fmean, pstdev
from typing import Sequence

from .errors import CountMismatch, EmptyInput
from .simhash import hash_feature

DEFAULT_MAX_OBSERVATIONS = 6


@dataclass(frozen=True)
class Observation:
    """One spider visit's fingerprint for a single channel."""

    fingerprint: int
    fetched_at: datetime
    feature_count: int

    def __post_init__(self) -> None:
        if self.feature_count < 0:
            raise ValueError("feature_count must be >= 0")


@dataclass
class Cluster:
    """A learned group of fingerprints.

    centroid[i] is the fraction of member fingerprints with bit i set;
    link_heights records the centroid distance at each merge, so a
    cluster of size n carries exactly n - 1 heights. members is only
    populated when clustering runs with keep_members (test support).
    """

    centroid: list[float]
    link_heights: list[float]
    size: int
    members: tuple[int, ...] | None = None

    def to_dict(self) -> dict:
        return {
            "centroid": list(self.centroid),
            "link_heights": list(self.link_heights),
            "size": self.size,
        }

    @classmethod
    def from_dict(cls, data: dict) -> "Cluster":
        centroid = [float(x) for x in data["centroid"]]
        if len(centroid) != 64:
            raise ValueError("centroid must have 64 entries")
        size = int(data["size"])
        if size < 1:
            raise ValueError("cluster size must be positive")
        return cls(centroid, [float(x) for x in data["link_heights"]], size)


@dataclass(frozen=True)
class WebsiteModel:
    """Per-URL model: clusters of both channels plus build metadata."""

    url_key: str
    text_clusters: list[Cluster]
    tag_clusters: list[Cluster]
    observation_count: int
    built_at: datetime
    params_fingerprint: str

    def to_dict(self) -> dict:
        return {
            "url_key": self.url_key,
            "built_at": _rfc3339(self.built_at),
            "params_fingerprint": self.params_fingerprint,
            "channels": {
                "text": [c.to_dict() for c in self.text_clusters],
                "tag": [c.to_dict() for c in self.tag_clusters],
            },
        }

    def to_json(self) -> str:
        return json.dumps(self.to_dict())

    @classmethod
    def from_dict(cls, data: dict) -> "WebsiteModel":
        text = [Cluster.from_dict(c) for c in data["channels"]["text"]]
        tag = [Cluster.from_dict(c) for c in data["channels"]["tag"]]
        if not text or not tag:
            raise ValueError("model must have at least one cluster per channel")
        return cls(
            url_key=data["url_key"],
            text_clusters=text,
            tag_clusters=tag,
            observation_count=sum(c.size for c in text),
            built_at=datetime.fromisoformat(data["built_at"]),
            params_fingerprint=data["params_fingerprint"],
        )

    @classmethod
    def from_json(cls, raw: str) -> "WebsiteModel":
        return cls.from_dict(json.loads(raw))


def _rfc3339(dt: datetime) -> str:
    if dt.tzinfo is None:
        dt = dt.replace(tzinfo=timezone.utc)
    return dt.astimezone(timezone.utc).isoformat()


def centroid_distance(s: int, centroid: Sequence[float]) -> float:
    """L1 distance from a fingerprint's bits to a cluster centroid.

    On a binary centroid this is exactly the Hamming distance, so it is
    the natural extension of Hamming to the fractional centroids that
    merging produces.
    """
    return sum(abs(((s >> i) & 1) - centroid[i]) for i in range(64))


def inconsistency(d: float, link_heights: Sequence[float]) -> float:
    """How far a candidate distance sticks out of a cluster's history.

    alpha = (d - mean) / population std of the link heights. Fewer than
    two heights, or zero spread, gives no basis for standardization and
    returns 0 (merge-friendly, matching the leaf rule).
    """
    if len(link_heights) < 2:
        return 0.0
    mu = fmean(link_heights)
    sigma = pstdev(link_heights, mu=mu)
    if sigma == 0.0:
        return 0.0
    return (d - mu) / sigma


@dataclass
class _Working:
    counts: list[int]  # per-bit set counts; centroid = counts / size, exact
    size: int
    links: list[float]
    members: list[int]
    created: int

    def centroid(self) -> list[float]:
        return [c / self.size for c in self.counts]


def _bit_counts(fingerprint: int) -> list[int]:
    return [(fingerprint >> i) & 1 for i in range(64)]


def _working_distance(a: _Working, b: _Working) -> float:
    sa, sb = a.size, b.size
    return sum(abs(a.counts[i] / sa - b.counts[i] / sb) for i in range(64))


def cluster_channel(
    observations: Sequence[int],
    t_learn: float,
    keep_members: bool = False,
) -> list[Cluster]:
    """Greedy bottom-up clustering of one channel's fingerprints.

    Every observation starts as a singleton. Each round picks the
    eligible pair at minimal centroid L1 distance (ties broken by the
    pair's creation indices, lexicographically) and merges it if the
    inconsistency of that distance against the pair's combined link
    heights stays below t_learn; otherwise the pair becomes permanently
    ineligible. Terminates once no eligible pair remains.
    """
    if not observations:
        raise EmptyInput("no observations to cluster")
    active = [
        _Working(_bit_counts(f), 1, [], [i], created=i)
        for i, f in enumerate(observations)
    ]
    next_id = len(active)
    ineligible: set[tuple[int, int]] = set()

    while True:
        best: tuple[float, tuple[int, int], _Working, _Working] | None = None
        for i in range(len(active)):
            for j in range(i + 1, len(active)):
                a, b = active[i], active[j]
                key = (a.created, b.created) if a.created < b.created else (b.created, a.created)
                if key in ineligible:
                    continue
                d = _working_distance(a, b)
                if best is None or (d, key) < (best[0], best[1]):
                    best = (d, key, a, b)
        if best is None:
            break
        d, key, a, b = best
        alpha = inconsistency(d, a.links + b.links)
        if alpha < t_learn:
            first, second = (a, b) if a.created < b.created else (b, a)
            merged = _Working(
                counts=[x + y for x, y in zip(first.counts, second.counts)],
                size=first.size + second.size,
                links=first.links + second.links + [d],
                members=first.members + second.members,
                created=next_id,
            )
            next_id += 1
            active = [w for w in active if w is not a and w is not b]
            active.append(merged)
        else:
            ineligible.add(key)

    active.sort(key=lambda w: w.created)
    return [
        Cluster(
            centroid=w.centroid(),
            link_heights=list(w.links),
            size=w.size,
            members=tuple(observations[m] for m in w.members) if keep_members else None,
        )
        for w in active
    ]


def params_fingerprint(
    t_learn_text: float, t_learn_tag: float, max_observations: int
) -> str:
    """Stable identifier for the parameter set a model was built with."""
    canonical = (
        f"t_learn_text={t_learn_text!r},t_learn_tag={t_learn_tag!r},"
        f"max_observations={max_observations}"
    )
    return format(hash_feature(canonical), "016x")


def build_model(
    url_key: str,
    text_obs: Sequence[Observation],
    tag_obs: Sequence[Observation],
    t_learn_text: float = 0.7,
    t_learn_tag: float = 0.7,
    max_observations: int = DEFAULT_MAX_OBSERVATIONS,
    now: datetime | None = None,
) -> WebsiteModel:
    """Cluster both channels of a site's observations into a model."""
    if len(text_obs) != len(tag_obs):
        raise CountMismatch(
            f"{len(text_obs)} text observations vs {len(tag_obs)} tag observations"
        )
    if not text_obs:
        raise EmptyInput("a model needs at least one observation")
    if len(text_obs) > max_observations:
        raise ValueError(
            f"{len(text_obs)} observations exceed the cap of {max_observations}"
        )
    return WebsiteModel(
        url_key=url_key,
        text_clusters=cluster_channel([o.fingerprint for o in text_obs], t_learn_text),
        tag_clusters=cluster_channel([o.fingerprint for o in tag_obs], t_learn_tag),
        observation_count=len(text_obs),
        built_at=now if now is not None else datetime.now(timezone.utc),
        params_fingerprint=params_fingerprint(t_learn_text, t_learn_tag, max_observations),
    )
