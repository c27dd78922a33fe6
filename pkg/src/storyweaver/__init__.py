"""storyweaver: compile hierarchical articles into AMP Web Story bundles."""

from .article import (
    Article,
    ImageAsset,
    Section,
    emit_canonical,
    filter_sections,
    load_article,
    parse_article,
)
from .config import RunConfig, load_run_config
from .layout import compute_crop, choose_family, dominant_color, load_gallery
from .matching import assign_images, build_features, cosine, featurize_image, featurize_text
from .planner import PlannerConfig, StorySet, decide_mode, merge_pages, plan, split_pages
from .pipeline import build_article, build_file
from .render import render_bundle, render_story
from .summarize import SummarizerConfig, Summary, segment_sentences, summarize_article, summarize_section
from .validate import validate_bundle, validate_story_html
from .wikitext import parse_wikitext

__version__ = "0.1.0"

__all__ = [
    "Article",
    "ImageAsset",
    "PlannerConfig",
    "RunConfig",
    "Section",
    "StorySet",
    "SummarizerConfig",
    "Summary",
    "assign_images",
    "build_article",
    "build_features",
    "build_file",
    "choose_family",
    "compute_crop",
    "cosine",
    "decide_mode",
    "dominant_color",
    "emit_canonical",
    "featurize_image",
    "featurize_text",
    "filter_sections",
    "load_article",
    "load_gallery",
    "load_run_config",
    "merge_pages",
    "parse_article",
    "parse_wikitext",
    "plan",
    "render_bundle",
    "render_story",
    "segment_sentences",
    "split_pages",
    "summarize_article",
    "summarize_section",
    "validate_bundle",
    "validate_story_html",
]
