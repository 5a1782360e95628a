"""Cloaking detection toolkit.

Fingerprints page views with 64-bit Simhash over text and tag features,
learns per-URL website models from repeated spider crawls, and flags a
user view as a cloaking candidate when it is an outlier against every
learned cluster of both channels.
"""

from .detector import ChannelResult, Combiner, DetectionParams, Verdict, channel_test, detect
from .features import (
    FeatureSet,
    PageDocument,
    PageFingerprints,
    fingerprint_page,
    tag_features,
    text_features,
    visible_words,
)
from .simhash import from_hex, hamming, hash_feature, simhash, to_hex
from .swm import (
    Cluster,
    Observation,
    WebsiteModel,
    build_model,
    centroid_distance,
    cluster_channel,
    inconsistency,
)
from .urlnorm import normalize

__version__ = "0.1.0"

__all__ = [
    "ChannelResult",
    "Combiner",
    "DetectionParams",
    "Verdict",
    "channel_test",
    "detect",
    "FeatureSet",
    "PageDocument",
    "PageFingerprints",
    "fingerprint_page",
    "tag_features",
    "text_features",
    "visible_words",
    "from_hex",
    "hamming",
    "hash_feature",
    "simhash",
    "to_hex",
    "Cluster",
    "Observation",
    "WebsiteModel",
    "build_model",
    "centroid_distance",
    "cluster_channel",
    "inconsistency",
    "normalize",
    "__version__",
]
