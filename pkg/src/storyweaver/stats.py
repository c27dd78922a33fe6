"""Corpus statistics: per-category input/output composition.

Works over a directory of built bundles (read from their manifests) or of
canonical article files (planned in memory, nothing written). The report
is a TSV table; figures are rendered next to it when an output directory
is given.
"""

from __future__ import annotations

import json
import logging
from dataclasses import dataclass, field
from pathlib import Path

from .article import load_article
from .config import RunConfig
from .pipeline import plan_article

logger = logging.getLogger(__name__)

TABLE_COLUMNS = (
    "category",
    "articles",
    "sections",
    "images",
    "main_stories",
    "main_story_pages_mean",
    "section_stories",
)


@dataclass
class ArticleStats:
    title: str
    category: str
    sections: int
    images: int
    main_stories: int
    main_story_pages: int
    section_stories: int
    story_page_counts: list[int] = field(default_factory=list)


def stats_from_manifest(manifest: dict) -> ArticleStats:
    stories = manifest.get("stories", [])
    main = [s for s in stories if s.get("kind") == "main"]
    section = [s for s in stories if s.get("kind") == "section"]
    article = manifest.get("article", {})
    return ArticleStats(
        title=article.get("title", "?"),
        category=article.get("category", "uncategorized"),
        sections=int(article.get("section_count", 0)),
        images=int(article.get("image_count", 0)),
        main_stories=len(main),
        main_story_pages=sum(int(s.get("page_count", 0)) for s in main),
        section_stories=len(section),
        story_page_counts=[int(s.get("page_count", 0)) for s in stories],
    )


def stats_from_article_file(path: Path, cfg: RunConfig) -> ArticleStats:
    article = load_article(path)
    filtered, _, story_set = plan_article(article, cfg)
    main = [s for s in story_set.stories if s.kind == "main"]
    section = [s for s in story_set.stories if s.kind == "section"]
    return ArticleStats(
        title=filtered.title,
        category=filtered.category,
        sections=sum(1 for _ in filtered.sections()),
        images=len(filtered.images),
        main_stories=len(main),
        main_story_pages=sum(len(s.pages) for s in main),
        section_stories=len(section),
        story_page_counts=[len(s.pages) for s in story_set.stories],
    )


def collect_corpus_stats(corpus_dir: str | Path, cfg: RunConfig) -> list[ArticleStats]:
    """Scan a corpus directory: bundle subdirectories (with manifest.json)
    and/or canonical article files, in sorted order."""
    corpus_dir = Path(corpus_dir)
    collected: list[ArticleStats] = []
    if (corpus_dir / "manifest.json").is_file():
        manifest = json.loads((corpus_dir / "manifest.json").read_text(encoding="utf-8"))
        return [stats_from_manifest(manifest)]
    for entry in sorted(corpus_dir.iterdir()):
        if entry.is_dir() and (entry / "manifest.json").is_file():
            manifest = json.loads((entry / "manifest.json").read_text(encoding="utf-8"))
            collected.append(stats_from_manifest(manifest))
        elif entry.is_file() and entry.suffix in (".yaml", ".yml"):
            collected.append(stats_from_article_file(entry, cfg))
    return collected


def render_stats_table(stats: list[ArticleStats]) -> str:
    """Tab-separated per-category rows plus a total row; empty corpus gives
    just the header."""
    lines = ["\t".join(TABLE_COLUMNS)]

    def row(label: str, group: list[ArticleStats]) -> str:
        main_stories = sum(s.main_stories for s in group)
        main_pages = sum(s.main_story_pages for s in group)
        mean = f"{main_pages / main_stories:.2f}" if main_stories else "0.00"
        return "\t".join(
            [
                label,
                str(len(group)),
                str(sum(s.sections for s in group)),
                str(sum(s.images for s in group)),
                str(main_stories),
                mean,
                str(sum(s.section_stories for s in group)),
            ]
        )

    categories = sorted({s.category for s in stats})
    for category in categories:
        lines.append(row(category, [s for s in stats if s.category == category]))
    if stats:
        lines.append(row("total", stats))
    return "\n".join(lines) + "\n"


def write_figures(stats: list[ArticleStats], out_dir: str | Path) -> list[Path]:
    """Render summary figures next to the delimited report."""
    import matplotlib

    matplotlib.use("Agg")
    import matplotlib.pyplot as plt

    out_dir = Path(out_dir)
    out_dir.mkdir(parents=True, exist_ok=True)
    written: list[Path] = []
    if not stats:
        return written

    categories = sorted({s.category for s in stats})
    main_counts = [sum(s.main_stories for s in stats if s.category == c) for c in categories]
    section_counts = [sum(s.section_stories for s in stats if s.category == c) for c in categories]

    fig, ax = plt.subplots(figsize=(7, 4))
    xs = range(len(categories))
    ax.bar([x - 0.2 for x in xs], main_counts, width=0.4, label="main stories", color="#4a7fb5")
    ax.bar([x + 0.2 for x in xs], section_counts, width=0.4, label="section stories", color="#d9882f")
    ax.set_xticks(list(xs))
    ax.set_xticklabels(categories, rotation=20, ha="right")
    ax.set_ylabel("stories")
    ax.set_title("Stories per category")
    ax.legend()
    fig.tight_layout()
    path = out_dir / "stories_per_category.png"
    fig.savefig(path, dpi=100)
    plt.close(fig)
    written.append(path)

    page_counts = [count for s in stats for count in s.story_page_counts]
    fig, ax = plt.subplots(figsize=(7, 4))
    bins = range(min(page_counts), max(page_counts) + 2)
    ax.hist(page_counts, bins=bins, color="#4a7fb5", edgecolor="white", align="left")
    ax.set_xlabel("pages per story")
    ax.set_ylabel("stories")
    ax.set_title("Story length distribution")
    fig.tight_layout()
    path = out_dir / "pages_per_story.png"
    fig.savefig(path, dpi=100)
    plt.close(fig)
    written.append(path)
    return written
