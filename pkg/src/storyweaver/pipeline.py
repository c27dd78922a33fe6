"""End-to-end build orchestration: ingest, summarize, plan, match, layout, render."""

from __future__ import annotations

import logging
import time
from dataclasses import dataclass
from pathlib import Path

from .article import Article, filter_sections, load_article
from .config import RunConfig
from .errors import StoryweaverError
from .external import ExternalEmbedder, ExternalSummarizer
from .layout import load_gallery, plan_layouts
from .matching import assign_images, build_features
from .planner import StorySet, plan
from .render import StoryBundle, render_bundle
from .summarize import Summary, summarize_article

logger = logging.getLogger(__name__)


@dataclass
class BuildOutcome:
    article: Article
    summaries: dict[str, Summary]
    story_set: StorySet
    bundle: StoryBundle | None
    elapsed: float


def _stage(name: str):
    """Tag escaping errors with the pipeline stage that raised them."""

    class _Tagger:
        def __enter__(self):
            return self

        def __exit__(self, exc_type, exc, tb):
            if isinstance(exc, StoryweaverError) and not hasattr(exc, "stage"):
                exc.stage = name
            return False

    return _Tagger()


def plan_article(article: Article, cfg: RunConfig) -> tuple[Article, dict[str, Summary], StorySet]:
    """Run the pure stages (filter, summarize, plan) without rendering."""
    with _stage("ingest"):
        filtered = filter_sections(article, cfg.blocklist)

    with _stage("summarize"):
        client = None
        if cfg.summarizer.external_endpoint:
            client = ExternalSummarizer(
                cfg.summarizer.external_endpoint,
                timeout=cfg.summarizer.external_timeout,
                max_in_flight=cfg.summarizer.max_in_flight,
            )
        try:
            summaries = summarize_article(filtered, cfg.summarizer, client)
        finally:
            if client is not None:
                client.close()

    with _stage("plan"):
        story_set = plan(filtered, summaries, cfg.planner)
        for summary in summaries.values():
            story_set.warnings.extend(summary.warnings)
    return filtered, summaries, story_set


def build_article(
    article: Article,
    cfg: RunConfig,
    out_dir: str | Path,
    article_dir: Path | None = None,
) -> BuildOutcome:
    """Build one article into a story bundle at out_dir."""
    start = time.perf_counter()
    filtered, summaries, story_set = plan_article(article, cfg)

    with _stage("match"):
        embedder = None
        if cfg.embedder_endpoint:
            embedder = ExternalEmbedder(
                cfg.embedder_endpoint,
                timeout=cfg.embedder_timeout,
                max_in_flight=cfg.embedder_max_in_flight,
            )
        try:
            features = build_features(story_set, filtered, summaries, embedder)
        finally:
            if embedder is not None:
                embedder.close()
        assignments = assign_images(story_set, filtered, features)

    with _stage("layout"):
        gallery = load_gallery(cfg.template_gallery)
        layouts = plan_layouts(story_set, filtered, summaries, gallery, article_dir)

    with _stage("render"):
        bundle = render_bundle(
            story_set,
            filtered,
            layouts,
            {(a.story_id, a.page_ordinal): a for a in assignments},
            out_dir,
            gallery=gallery,
            article_dir=article_dir,
            offline_assets=cfg.offline_assets,
        )

    elapsed = time.perf_counter() - start
    logger.info("built %r in %.3fs (%d stories)", article.title, elapsed, len(story_set.stories))
    return BuildOutcome(filtered, summaries, story_set, bundle, elapsed)


def build_file(input_path: str | Path, cfg: RunConfig, out_dir: str | Path) -> BuildOutcome:
    input_path = Path(input_path)
    with _stage("ingest"):
        article = load_article(input_path)
    return build_article(article, cfg, out_dir, article_dir=input_path.parent)
