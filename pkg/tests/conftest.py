"""Shared fixtures: corpus paths and page loading."""

from __future__ import annotations

import json
from pathlib import Path

import pytest

from cloakwatch.features import PageDocument

ROOT = Path(__file__).resolve().parent.parent
CORPUS_DIR = ROOT / "fixtures" / "corpus"


@pytest.fixture(scope="session")
def corpus_pages() -> dict[str, PageDocument]:
    pages = {}
    for path in sorted(CORPUS_DIR.glob("*.html")):
        pages[path.name] = PageDocument(path.read_bytes())
    assert len(pages) >= 25, "shared corpus must hold at least 25 pages"
    return pages


@pytest.fixture(scope="session")
def corpus_manifest() -> dict[str, dict]:
    manifest = json.loads((CORPUS_DIR / "manifest.json").read_text(encoding="utf-8"))
    return manifest["pages"]
