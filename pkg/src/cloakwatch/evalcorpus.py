"""Synthetic corpus generation and TPR/FPR evaluation.

Real cloaking ground truth requires labeled crawls of live sites, so
this module builds a deterministic stand-in corpus with the two failure
modes that matter for thresholds: legitimate "dynamic" sites whose
views churn between crawls (the false-positive hazard), and cloaked
sites that answer crawlers with one stable page while the user receives
unrelated content (the true-positive target).

Spider views of a cloaked site are intentionally static: the whole
point of cloaking is to show crawlers an innocuous, usually templated
page, and the attack is only visible as the spider/user gap.
"""

from __future__ import annotations

import random
from dataclasses import dataclass
from datetime import datetime, timezone

from .detector import DetectionParams, combine
from .features import PageDocument, fingerprint_page
from .swm import Observation, build_model, centroid_distance
from statistics import fmean, pstdev

_BENIGN_VOCAB = [f"w{i}" for i in range(20000)]
_SCAM_VOCAB = [f"s{i}" for i in range(10000)]

_SECTION_POOL = [
    ("div", "p"), ("section", "p"), ("article", "p"), ("ul", "li"),
    ("ol", "li"), ("div", "h3"), ("dl", "dd"),
]
_ATTR_POOL = ["id", "class", "data-kind", "role", "lang", "title", "data-idx"]
_EXTRA_TAGS = ["aside", "blockquote", "figure", "pre", "small", "em"]

_SCAM_SECTION_POOL = [("table", "td"), ("center", "font"), ("form", "input"), ("b", "u")]
_SCAM_ATTR_POOL = ["onclick", "bgcolor", "width", "align", "border"]

_EPOCH = datetime(2020, 1, 1, tzinfo=timezone.utc)


@dataclass(frozen=True)
class EvalCorpusSpec:
    """Knobs of the synthetic corpus; fixed seed means fixed corpus."""

    n_sites: int
    churn: float
    cloak_fraction: float
    seed: int

    def __post_init__(self) -> None:
        if not 0.0 <= self.churn <= 1.0:
            raise ValueError("churn must be in [0, 1]")
        if not 0.0 <= self.cloak_fraction <= 1.0:
            raise ValueError("cloak_fraction must be in [0, 1]")
        if self.n_sites < 1:
            raise ValueError("n_sites must be positive")


@dataclass(frozen=True)
class SiteOutcome:
    """Per-cluster (distance, mu, sigma) stats of one site's user view."""

    cloaked: bool
    text_stats: tuple[tuple[float, float, float], ...]
    tag_stats: tuple[tuple[float, float, float], ...]


@dataclass
class _SiteSpec:
    cloaked: bool
    vocab: list[str]
    words: list[str]
    sections: list[tuple[str, str, int, tuple[str, ...]]]
    extras: list[str]


def _render(
    title: str,
    words: list[str],
    sections: list[tuple[str, str, int, tuple[str, ...]]],
    extras: list[str],
) -> str:
    out = [
        '<!doctype html><html lang="en"><head><meta charset="utf-8">',
        f"<title>{title}</title></head><body>",
        f'<header id="top"><h1>{title}</h1></header>',
    ]
    total_items = sum(n for _, _, n, _ in sections) or 1
    per_item = max(1, len(words) // total_items)
    cursor = 0
    for container, item, n_items, attrs in sections:
        attr_text = "".join(f' {a}="v"' for a in attrs)
        out.append(f"<{container}{attr_text}>")
        for _ in range(n_items):
            chunk = " ".join(words[cursor : cursor + per_item])
            cursor += per_item
            out.append(f"<{item}>{chunk}</{item}>")
        out.append(f"</{container}>")
    for tag in extras:
        out.append(f"<{tag}>seasonal note</{tag}>")
    if cursor < len(words):
        out.append("<footer>" + " ".join(words[cursor:]) + "</footer>")
    else:
        out.append("<footer>end</footer>")
    out.append("</body></html>")
    return "".join(out)


def _make_site(rng: random.Random, cloaked: bool) -> _SiteSpec:
    vocab = rng.sample(_BENIGN_VOCAB, 400)
    length = rng.randint(200, 500)
    words = rng.choices(vocab, k=length)
    sections = []
    for _ in range(rng.randint(3, 8)):
        container, item = rng.choice(_SECTION_POOL)
        attrs = tuple(sorted(rng.sample(_ATTR_POOL, rng.randint(0, 3))))
        sections.append((container, item, rng.randint(2, 6), attrs))
    extras = rng.sample(_EXTRA_TAGS, 3)
    return _SiteSpec(cloaked, vocab, words, sections, extras)


def _mutated_view(site: _SiteSpec, churn: float, rng: random.Random) -> str:
    """One crawl of a dynamic site: churn words plus toggle a small tag set."""
    words = list(site.words)
    n_mut = round(churn * len(words))
    for pos in rng.sample(range(len(words)), n_mut):
        words[pos] = rng.choice(site.vocab)
    if churn > 0:
        extras = [t for t in site.extras if rng.random() < 0.5]
    else:
        extras = []
    return _render("site page", words, site.sections, extras)


def _scam_view(rng: random.Random) -> str:
    """The unrelated page a cloaked site serves to real users.

    Rendered with its own skeleton, not _render's: sharing the benign
    header/footer scaffold would leave the tag channels ~40% overlapped
    and occasionally inside the detection radius. Scam markup is the
    90s-style hard-sell kind: centered marquees, bgcolor tables, forms.
    """
    words = rng.choices(_SCAM_VOCAB, k=rng.randint(200, 500))
    out = [
        '<html><head><meta http-equiv="refresh" content="600">',
        "<title>great deals now</title></head>",
        '<body bgcolor="#ffffcc" onload="track()">',
        '<center><marquee scrollamount="9">great deals now</marquee></center>',
    ]
    sections = []
    for _ in range(rng.randint(6, 12)):
        container, item = rng.choice(_SCAM_SECTION_POOL)
        attrs = tuple(sorted(rng.sample(_SCAM_ATTR_POOL, rng.randint(1, 3))))
        sections.append((container, item, rng.randint(2, 6), attrs))
    total_items = sum(n for _, _, n, _ in sections) or 1
    per_item = max(1, len(words) // total_items)
    cursor = 0
    for container, item, n_items, attrs in sections:
        attr_text = "".join(f' {a}="v"' for a in attrs)
        out.append(f"<{container}{attr_text}>")
        for _ in range(n_items):
            chunk = " ".join(words[cursor : cursor + per_item])
            cursor += per_item
            out.append(f"<{item}>{chunk}</{item}>")
        out.append(f"</{container}>")
    out.append('<hr width="80%"><blink>act now</blink>')
    out.append('<form action="buy"><input type="text" name="cc"><input type="submit"></form>')
    out.append("<center><small>" + " ".join(words[cursor:]) + "</small></center>")
    out.append("</body></html>")
    return "".join(out)


def _fingerprint(html: str) -> tuple[Observation, Observation]:
    fp = fingerprint_page(PageDocument(html.encode("utf-8")))
    return (
        Observation(fp.text_simhash, _EPOCH, fp.text_count),
        Observation(fp.tag_simhash, _EPOCH, fp.tag_count),
    )


def _cluster_stats(s_user: int, clusters) -> tuple[tuple[float, float, float], ...]:
    stats = []
    for c in clusters:
        d = centroid_distance(s_user, c.centroid)
        links = c.link_heights
        mu = fmean(links) if links else 0.0
        sigma = pstdev(links, mu=mu) if len(links) >= 2 else 0.0
        stats.append((d, mu, sigma))
    return tuple(stats)


def evaluate_corpus(spec: EvalCorpusSpec, params: DetectionParams) -> list[SiteOutcome]:
    """Generate the corpus, learn models, and compute user-view stats.

    Stats are kept per cluster so radius sweeps re-test without
    re-fingerprinting anything.
    """
    rng = random.Random(spec.seed)
    n_cloaked = round(spec.n_sites * spec.cloak_fraction)
    cloaked_idx = set(rng.sample(range(spec.n_sites), n_cloaked))
    outcomes = []
    for i in range(spec.n_sites):
        site = _make_site(rng, i in cloaked_idx)
        if site.cloaked:
            spider_views = [_render("site page", site.words, site.sections, [])] * 6
            user_view = _scam_view(rng)
        else:
            spider_views = [_mutated_view(site, spec.churn, rng) for _ in range(6)]
            user_view = _mutated_view(site, spec.churn, rng)
        text_obs, tag_obs = zip(*(_fingerprint(v) for v in spider_views))
        model = build_model(
            f"eval.example/site/{i}", list(text_obs), list(tag_obs),
            t_learn_text=params.t_learn_text, t_learn_tag=params.t_learn_tag,
        )
        user_fp = fingerprint_page(PageDocument(user_view.encode("utf-8")))
        outcomes.append(
            SiteOutcome(
                cloaked=site.cloaked,
                text_stats=_cluster_stats(user_fp.text_simhash, model.text_clusters),
                tag_stats=_cluster_stats(user_fp.tag_simhash, model.tag_clusters),
            )
        )
    return outcomes


def _rejected(stats: tuple[tuple[float, float, float], ...], t_detect: float, r: float) -> bool:
    return all(d - r - mu > t_detect * sigma for d, mu, sigma in stats)


def rates(
    outcomes: list[SiteOutcome],
    params: DetectionParams,
    r_text: float,
    r_tag: float,
) -> dict[str, tuple[float | None, float]]:
    """TPR/FPR per channel and combined at the given radii.

    TPR is None when the corpus has no positives.
    """
    counts = {"text": [0, 0], "tag": [0, 0], "combined": [0, 0]}  # [tp, fp]
    n_pos = sum(1 for o in outcomes if o.cloaked)
    n_neg = len(outcomes) - n_pos
    for o in outcomes:
        text_rej = _rejected(o.text_stats, params.t_detect_text, r_text)
        tag_rej = _rejected(o.tag_stats, params.t_detect_tag, r_tag)
        flags = {
            "text": text_rej,
            "tag": tag_rej,
            "combined": combine(text_rej, tag_rej, params.combiner),
        }
        for mode, flagged in flags.items():
            if flagged:
                counts[mode][0 if o.cloaked else 1] += 1
    result = {}
    for mode, (tp, fp) in counts.items():
        tpr = (tp / n_pos) if n_pos else None
        fpr = (fp / n_neg) if n_neg else 0.0
        result[mode] = (tpr, fpr)
    return result


DEFAULT_R_GRID = tuple(range(0, 41, 2))


def _fmt_rate(value: float | None) -> str:
    return "n/a" if value is None else f"{value:.3f}"


def render_report(
    spec: EvalCorpusSpec,
    params: DetectionParams,
    outcomes: list[SiteOutcome],
    grid: tuple[int, ...] = DEFAULT_R_GRID,
) -> tuple[str, str]:
    """Build the human-readable table and the CSV body of one run."""
    n_pos = sum(1 for o in outcomes if o.cloaked)
    n_neg = len(outcomes) - n_pos
    lines = [
        "synthetic cloaking evaluation",
        f"corpus: n_sites={spec.n_sites} churn={spec.churn} "
        f"cloak_fraction={spec.cloak_fraction} seed={spec.seed}",
        f"positives (cloaked): {n_pos}  negatives (legit): {n_neg}",
        f"params: t_detect_text={params.t_detect_text} t_detect_tag={params.t_detect_tag} "
        f"r_text={params.r_text} r_tag={params.r_tag} combiner={params.combiner.value}",
        "",
        "operating point at default radii:",
    ]
    op = rates(outcomes, params, params.r_text, params.r_tag)
    for mode in ("text", "tag", "combined"):
        tpr, fpr = op[mode]
        lines.append(f"  {mode:<8} TPR={_fmt_rate(tpr)} FPR={fpr:.3f}")
    lines.append("")
    lines.append("ROC sweep (R varied jointly per row, T_detect fixed):")
    header = f"  {'R':>4}"
    for mode in ("text", "tag", "combined"):
        header += f"  {mode + ' TPR':>12}  {mode + ' FPR':>12}"
    lines.append(header)
    csv_lines = ["mode,r,tpr,fpr"]
    swept = [(r, rates(outcomes, params, float(r), float(r))) for r in grid]
    for r, by_mode in swept:
        row = f"  {r:>4}"
        for mode in ("text", "tag", "combined"):
            tpr, fpr = by_mode[mode]
            row += f"  {_fmt_rate(tpr):>12}  {fpr:>12.3f}"
        lines.append(row)
    for mode in ("text", "tag", "combined"):
        for r, by_mode in swept:
            tpr, fpr = by_mode[mode]
            csv_lines.append(f"{mode},{r},{_fmt_rate(tpr)},{fpr:.6f}")
    return "\n".join(lines) + "\n", "\n".join(csv_lines) + "\n"
