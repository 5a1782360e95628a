"""Deterministic generator of realistic HTML pages of a chosen size.

Used by the performance tests: pages mix paragraphs, lists, tables,
attribute-bearing containers and inline markup at roughly the text/tag
density of real article pages, so extraction cost scales the way it
does on live HTML.
"""

from __future__ import annotations

import random

_VOCAB = [f"word{i}" for i in range(4000)] + [
    "the", "a", "of", "and", "to", "in", "is", "for", "with", "on",
]
_INLINE = ["b", "i", "em", "strong", "span", "code", "small"]
_ATTRS = ["id", "class", "data-x", "role", "title", "lang"]


def _sentence(rng: random.Random) -> str:
    return " ".join(rng.choices(_VOCAB, k=rng.randint(6, 14)))


def _paragraph(rng: random.Random) -> str:
    parts = []
    for _ in range(rng.randint(2, 5)):
        text = _sentence(rng)
        if rng.random() < 0.3:
            tag = rng.choice(_INLINE)
            text = f"<{tag}>{text}</{tag}>"
        parts.append(text)
    return "<p>" + " ".join(parts) + "</p>"


def _list(rng: random.Random) -> str:
    tag = rng.choice(["ul", "ol"])
    items = "".join(f"<li>{_sentence(rng)}</li>" for _ in range(rng.randint(3, 8)))
    return f"<{tag}>{items}</{tag}>"


def _table(rng: random.Random) -> str:
    rows = []
    for _ in range(rng.randint(2, 5)):
        cells = "".join(f"<td>{_sentence(rng)}</td>" for _ in range(rng.randint(2, 4)))
        rows.append(f"<tr>{cells}</tr>")
    return "<table class=\"data\"><tbody>" + "".join(rows) + "</tbody></table>"


def _block(rng: random.Random) -> str:
    roll = rng.random()
    if roll < 0.55:
        body = _paragraph(rng)
    elif roll < 0.75:
        body = _list(rng)
    elif roll < 0.9:
        body = _table(rng)
    else:
        body = f"<blockquote>{_paragraph(rng)}</blockquote>"
    if rng.random() < 0.5:
        attrs = "".join(
            f' {a}="v{rng.randrange(20)}"'
            for a in rng.sample(_ATTRS, rng.randint(1, 3))
        )
        return f"<div{attrs}>{body}</div>"
    return body


def generate_page(target_bytes: int, seed: int = 1) -> bytes:
    """An HTML document whose size is close to (and >=) target_bytes."""
    rng = random.Random(seed)
    out = [
        "<!doctype html><html><head><meta charset=\"utf-8\">",
        "<title>generated page</title>",
        "<style>body { margin: 0 }</style>",
        "<script>var boot = 1;</script></head><body>",
        "<header id=\"top\"><h1>generated page</h1><nav><a href=\"/\">home</a></nav></header>",
    ]
    size = sum(len(s) for s in out)
    while size < target_bytes:
        block = _block(rng)
        out.append(block)
        size += len(block)
    out.append("<footer>fin</footer></body></html>")
    return "".join(out).encode("utf-8")
