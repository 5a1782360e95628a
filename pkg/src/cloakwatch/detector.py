"""Outlier test deciding whether a user view matches a website model.

A user view is rejected by a channel when its distance to every cluster
sticks out beyond what that cluster's merge history explains: for each
cluster k, the view is an outlier iff

    d_k - R - mu_k > T_detect * sigma_k

where mu_k and sigma_k summarize the cluster's link heights. R, the
minimum radius, absorbs the constant spider/user differences that even
honest sites show and makes zero-variance (static) clusters testable.
Channel verdicts combine into the cloaking decision via a configurable
combiner; the default requires both channels to reject, which minimizes
false positives.
"""

from __future__ import annotations

import json
from dataclasses import dataclass
from datetime import datetime, timezone
from enum import Enum
from statistics import fmean, pstdev

from .errors import EmptyModel
from .features import PageDocument, fingerprint_page
from .swm import Cluster, WebsiteModel, centroid_distance


class Combiner(str, Enum):
    """How per-channel rejections combine into the cloaking verdict."""

    BOTH = "both"
    EITHER = "either"
    TEXT_ONLY = "text-only"
    TAG_ONLY = "tag-only"


@dataclass(frozen=True)
class DetectionParams:
    """Thresholds for model learning and detection."""

    t_detect_text: float = 2.1
    t_detect_tag: float = 1.8
    r_text: float = 15.0
    r_tag: float = 13.0
    t_learn_text: float = 0.7
    t_learn_tag: float = 0.7
    combiner: Combiner = Combiner.BOTH

    def __post_init__(self) -> None:
        for name in ("t_detect_text", "t_detect_tag", "r_text", "r_tag",
                     "t_learn_text", "t_learn_tag"):
            if getattr(self, name) < 0:
                raise ValueError(f"{name} must be nonnegative")

    def to_dict(self) -> dict:
        return {
            "t_detect_text": self.t_detect_text,
            "t_detect_tag": self.t_detect_tag,
            "r_text": self.r_text,
            "r_tag": self.r_tag,
            "t_learn_text": self.t_learn_text,
            "t_learn_tag": self.t_learn_tag,
            "combiner": self.combiner.value,
        }

    @classmethod
    def from_dict(cls, data: dict) -> "DetectionParams":
        kwargs = dict(data)
        if "combiner" in kwargs:
            kwargs["combiner"] = Combiner(kwargs["combiner"])
        return cls(**kwargs)


@dataclass(frozen=True)
class ChannelResult:
    """Outcome of the outlier test for one channel."""

    rejected: bool
    distance: float
    min_excess: float
    nearest_cluster_index: int

    def to_dict(self) -> dict:
        return {
            "rejected": self.rejected,
            "distance": self.distance,
            "min_excess": self.min_excess,
            "nearest_cluster_index": self.nearest_cluster_index,
        }


@dataclass(frozen=True)
class Verdict:
    """Detection outcome for one user view against one model."""

    url_key: str
    channel_results: dict[str, ChannelResult]
    is_cloaking: bool
    feature_counts: dict[str, int]
    evaluated_at: datetime

    def to_dict(self) -> dict:
        return {
            "url_key": self.url_key,
            "channel_results": {k: v.to_dict() for k, v in self.channel_results.items()},
            "is_cloaking": self.is_cloaking,
            "feature_counts": dict(self.feature_counts),
            "evaluated_at": self.evaluated_at.astimezone(timezone.utc).isoformat(),
        }

    def to_json(self) -> str:
        return json.dumps(self.to_dict())


def channel_test(
    s_user: int, clusters: list[Cluster], t_detect: float, r: float
) -> ChannelResult:
    """Run the per-cluster outlier test for one channel.

    The view is accepted if any cluster explains it, i.e. some k has
    d_k - R - mu_k <= T_detect * sigma_k. min_excess is the smallest
    left-hand-side margin over all clusters (negative when accepted);
    distance and nearest_cluster_index describe the cluster attaining it.
    """
    if not clusters:
        raise EmptyModel("channel has no clusters")
    best_excess = 0.0
    best_index = -1
    best_distance = 0.0
    for k, cluster in enumerate(clusters):
        d = centroid_distance(s_user, cluster.centroid)
        links = cluster.link_heights
        mu = fmean(links) if links else 0.0
        sigma = pstdev(links, mu=mu) if len(links) >= 2 else 0.0
        excess = d - r - mu - t_detect * sigma
        if best_index < 0 or excess < best_excess:
            best_excess = excess
            best_index = k
            best_distance = d
    return ChannelResult(
        rejected=best_excess > 0.0,
        distance=best_distance,
        min_excess=best_excess,
        nearest_cluster_index=best_index,
    )


def combine(text_rejected: bool, tag_rejected: bool, combiner: Combiner) -> bool:
    if combiner is Combiner.BOTH:
        return text_rejected and tag_rejected
    if combiner is Combiner.EITHER:
        return text_rejected or tag_rejected
    if combiner is Combiner.TEXT_ONLY:
        return text_rejected
    return tag_rejected


def detect(
    user_doc: PageDocument,
    model: WebsiteModel,
    params: DetectionParams | None = None,
    now: datetime | None = None,
) -> Verdict:
    """Fingerprint a user view and test it against a website model.

    `now` stamps the verdict; passing it makes the output fully
    deterministic for identical inputs.
    """
    if params is None:
        params = DetectionParams()
    fp = fingerprint_page(user_doc)
    text_result = channel_test(
        fp.text_simhash, model.text_clusters, params.t_detect_text, params.r_text
    )
    tag_result = channel_test(
        fp.tag_simhash, model.tag_clusters, params.t_detect_tag, params.r_tag
    )
    return Verdict(
        url_key=model.url_key,
        channel_results={"text": text_result, "tag": tag_result},
        is_cloaking=combine(text_result.rejected, tag_result.rejected, params.combiner),
        feature_counts={"text": fp.text_count, "tag": fp.tag_count},
        evaluated_at=now if now is not None else datetime.now(timezone.utc),
    )
