"""Regenerate fixtures/detect_vectors.json.

Conformance vectors for the channel outlier test: seeded random models
plus the degenerate shapes (singletons, zero-variance links, t=0, r=0),
each with the reference implementation's full result. Clients reimplement
the test and must reproduce every field.

Run from the repository root: python3 scripts/gen_detect_vectors.py
"""

from __future__ import annotations

import json
import random
from pathlib import Path

from cloakwatch.detector import channel_test
from cloakwatch.swm import Cluster, cluster_channel

OUT = Path(__file__).resolve().parent.parent / "fixtures" / "detect_vectors.json"


def vector(s_user: int, clusters: list[Cluster], t_detect: float, r: float) -> dict:
    result = channel_test(s_user, clusters, t_detect, r)
    return {
        "s_user": f"{s_user:016x}",
        "clusters": [c.to_dict() for c in clusters],
        "t_detect": t_detect,
        "r": r,
        "expected": result.to_dict(),
    }


def main() -> None:
    rng = random.Random(2024)
    vectors = []

    # fixed shapes covering every branch of the rule
    zero = Cluster([0.0] * 64, [], 1)
    vectors.append(vector((1 << 15) - 1, [zero], 2.1, 15.0))            # boundary accept
    vectors.append(vector((1 << 16) - 1, [zero], 2.1, 15.0))            # boundary reject
    vectors.append(vector(0, [zero], 0.0, 0.0))                         # exact match, all zero
    vectors.append(vector((1 << 23) - 1, [Cluster([0.0] * 64, [4.0, 6.0], 3)], 2.1, 15.0))
    vectors.append(vector((1 << 30) - 1, [Cluster([0.0] * 64, [10.0, 10.0], 3)], 2.1, 15.0))
    vectors.append(
        vector((1 << 23) - 1, [zero, Cluster([0.0] * 64, [4.0, 6.0], 3)], 2.1, 15.0)
    )

    # random models built by the real clustering path, fractional centroids
    for _ in range(24):
        n = rng.randint(2, 8)
        base = rng.getrandbits(64)
        observations = [
            base ^ rng.getrandbits(64) if rng.random() < 0.3
            else base ^ ((1 << rng.randrange(10)) - 1)
            for _ in range(n)
        ]
        clusters = cluster_channel(observations, rng.choice([0.5, 0.7, 1.2]))
        probe = rng.choice(observations) ^ ((1 << rng.randrange(30)) - 1)
        t_detect = rng.choice([0.0, 1.8, 2.1, 3.0])
        r = rng.choice([0.0, 13.0, 15.0, 20.0])
        vectors.append(vector(probe, clusters, t_detect, r))

    OUT.write_text(json.dumps({"vectors": vectors}, indent=2) + "\n", encoding="utf-8")
    print(f"wrote {len(vectors)} vectors to {OUT}")


if __name__ == "__main__":
    main()
