#!/usr/bin/env python3
"""Regenerate fixtures/corpus/manifest.json from the fixture pages.

The manifest records, for every page in the shared corpus, the expected
text/tag fingerprints and feature counts. It is the cross-language
conformance contract: the Python test suite recomputes it, and the
browser client's test suite must reproduce the same hex values from a
parsed DOM. Run from the repository root after adding or editing a
fixture page; commit the result.
"""

from __future__ import annotations

import json
import sys
from pathlib import Path

sys.path.insert(0, str(Path(__file__).resolve().parent.parent / "src"))

from cloakwatch.features import PageDocument, fingerprint_page  # noqa: E402
from cloakwatch.simhash import to_hex  # noqa: E402


def main() -> None:
    corpus = Path(__file__).resolve().parent.parent / "fixtures" / "corpus"
    entries = {}
    for page in sorted(corpus.glob("*.html")):
        fp = fingerprint_page(PageDocument(page.read_bytes()))
        entries[page.name] = {
            "text": to_hex(fp.text_simhash),
            "tag": to_hex(fp.tag_simhash),
            "text_count": fp.text_count,
            "tag_count": fp.tag_count,
        }
    manifest = corpus / "manifest.json"
    manifest.write_text(json.dumps({"pages": entries}, indent=2) + "\n", encoding="utf-8")
    print(f"wrote {manifest} with {len(entries)} pages")


if __name__ == "__main__":
    main()
