"""Image-to-page assignment by feature similarity.

The baseline featurizer is a term-frequency vector over an article-level
vocabulary (summaries plus image captions and filename tokens); an external
embedding provider can replace it behind the same vector contract. Pages
are matched greedily in story order with section locality and an
immediate-repetition check.
"""

from __future__ import annotations

import logging
import math
import re
from dataclasses import dataclass
from typing import Literal

from .article import Article, ImageAsset
from .errors import ProviderError
from .planner import StorySet, Story
from .summarize import Summary, word_tokens

logger = logging.getLogger(__name__)

FeatureProvider = Literal["textual_baseline", "external"]

_FILENAME_SPLIT_RE = re.compile(r"[^A-Za-z0-9]+")


@dataclass
class FeatureVector:
    values: list[float]
    provider: FeatureProvider = "textual_baseline"

    def norm(self) -> float:
        return math.sqrt(sum(v * v for v in self.values))

    def is_usable(self) -> bool:
        return self.norm() > 0.0

    def normalized(self) -> "FeatureVector":
        n = self.norm()
        if n == 0.0:
            return FeatureVector(list(self.values), self.provider)
        return FeatureVector([v / n for v in self.values], self.provider)


@dataclass
class Assignment:
    story_id: str
    page_ordinal: int
    image_id: str
    similarity: float
    fallback_reason: Literal[
        "no_local_image", "repetition_avoided", "reassigned_from_other_section"
    ] | None = None


@dataclass
class FeatureSet:
    pages: dict[tuple[str, int], FeatureVector]
    images: dict[str, FeatureVector]


def cosine(a: FeatureVector, b: FeatureVector) -> float:
    if len(a.values) != len(b.values):
        raise ProviderError(
            f"feature dimension mismatch: {len(a.values)} vs {len(b.values)}"
        )
    na, nb = a.norm(), b.norm()
    if na == 0.0 or nb == 0.0:
        return 0.0
    return sum(x * y for x, y in zip(a.values, b.values)) / (na * nb)


def tokenize_filename(name: str) -> list[str]:
    stem = name.rsplit("/", 1)[-1]
    if "." in stem:
        stem = stem.rsplit(".", 1)[0]
    return [t.lower() for t in _FILENAME_SPLIT_RE.split(stem) if t]


def build_vocab(summaries: dict[str, Summary], images: list[ImageAsset]) -> list[str]:
    """Article-level term index over summaries, captions, and filename tokens."""
    terms: set[str] = set()
    for summary in summaries.values():
        terms.update(word_tokens(summary.text))
    for image in images:
        terms.update(word_tokens(image.caption))
        terms.update(tokenize_filename(image.filename()))
    return sorted(terms)


def featurize_text(text: str, vocab: list[str]) -> FeatureVector:
    index = {term: i for i, term in enumerate(vocab)}
    values = [0.0] * len(vocab)
    for token in word_tokens(text):
        pos = index.get(token)
        if pos is not None:
            values[pos] += 1.0
    return FeatureVector(values).normalized()


def featurize_image(image: ImageAsset, vocab: list[str]) -> FeatureVector:
    text = " ".join([image.caption] + tokenize_filename(image.filename()))
    return featurize_text(text, vocab)


def ingest_external_vector(values: list[float], expected_dim: int | None) -> FeatureVector:
    if expected_dim is not None and len(values) != expected_dim:
        raise ProviderError(
            f"external vector has dimension {len(values)}, session declared {expected_dim}"
        )
    return FeatureVector([float(v) for v in values], "external").normalized()


def build_features(
    story_set: StorySet,
    article: Article,
    summaries: dict[str, Summary],
    embedder=None,
) -> FeatureSet:
    """Feature vectors for all content-page snippets and usable images.

    `embedder` is an optional external provider exposing
    ``embed(kind, payload) -> list[float]``; without one the textual
    baseline is used.
    """
    pages: dict[tuple[str, int], FeatureVector] = {}
    images: dict[str, FeatureVector] = {}

    if embedder is None:
        vocab = build_vocab(summaries, article.images)
        for story in story_set.stories:
            for ordinal, page in enumerate(story.pages):
                if page.kind == "content":
                    pages[(story.id, ordinal)] = featurize_text(page.snippet, vocab)
        for image in article.images:
            if image.is_usable():
                images[image.id] = featurize_image(image, vocab)
        return FeatureSet(pages=pages, images=images)

    dim: int | None = None
    for story in story_set.stories:
        for ordinal, page in enumerate(story.pages):
            if page.kind == "content":
                vec = ingest_external_vector(embedder.embed("text", page.snippet), dim)
                dim = dim or len(vec.values)
                pages[(story.id, ordinal)] = vec
    for image in article.images:
        if image.is_usable():
            vec = ingest_external_vector(embedder.embed("image", image.source_url), dim)
            dim = dim or len(vec.values)
            images[image.id] = vec
    return FeatureSet(pages=pages, images=images)


def _section_positions(article: Article) -> dict[str, int]:
    return {sec.index: pos for pos, sec in enumerate(article.sections())}


def assign_images(
    story_set: StorySet, article: Article, features: FeatureSet
) -> list[Assignment]:
    """Greedy sequential assignment, story order then page order.

    A page draws from its own section's usable images when there are any,
    otherwise from the whole article (similarity ties preferring images
    from sections that own more than one). The best match is avoided if it
    would repeat the immediately preceding content page's image within the
    same story. Covers reuse the best image of their first content page's
    pool. Deterministic throughout.
    """
    usable = [
        img
        for img in article.images
        if img.is_usable() and img.id in features.images and features.images[img.id].is_usable()
    ]
    positions = _section_positions(article)
    owner_counts: dict[str, int] = {}
    for img in usable:
        owner_counts[img.section_index] = owner_counts.get(img.section_index, 0) + 1

    assignments: list[Assignment] = []
    if not usable:
        logger.warning("article %r has no usable images; stories render text-only", article.title)
        story_set.warnings.append("no usable images; all pages render text-only")
        for story in story_set.stories:
            for page in story.pages:
                if page.kind == "content":
                    page.text_only = True
        return assignments

    by_section: dict[str, list[ImageAsset]] = {}
    for img in usable:
        by_section.setdefault(img.section_index, []).append(img)

    for story in story_set.stories:
        previous_image: str | None = None
        first_content: tuple[int, Assignment] | None = None
        for ordinal, page in enumerate(story.pages):
            if page.kind != "content":
                continue
            page_vec = features.pages[(story.id, ordinal)]
            local_pool = by_section.get(page.section_index, [])
            global_pool = not local_pool
            pool = local_pool or usable

            def rank_key(img: ImageAsset):
                similarity = cosine(page_vec, features.images[img.id])
                multi_owner_penalty = (
                    0 if (global_pool and owner_counts[img.section_index] > 1) else 1
                )
                proximity = abs(
                    positions.get(page.section_index, 0) - positions.get(img.section_index, 0)
                )
                return (-similarity, multi_owner_penalty if global_pool else 0, proximity, img.id)

            ranked = sorted(pool, key=rank_key)
            choice = ranked[0]
            fallback = None
            if global_pool:
                fallback = (
                    "no_local_image"
                    if owner_counts[choice.section_index] > 1
                    else "reassigned_from_other_section"
                )
            if previous_image is not None and choice.id == previous_image and len(ranked) > 1:
                choice = ranked[1]
                fallback = "repetition_avoided"
            similarity = cosine(page_vec, features.images[choice.id])
            page.image_ref = choice.id
            assignment = Assignment(story.id, ordinal, choice.id, similarity, fallback)
            assignments.append(assignment)
            previous_image = choice.id
            if first_content is None:
                first_content = (ordinal, assignment)

        # Cover reuses the best match of the first content page's pool; the
        # first content page has no predecessor, so that is its own image.
        if first_content is not None and story.pages and story.pages[0].kind == "cover":
            _, first_assignment = first_content
            story.pages[0].image_ref = first_assignment.image_id
            assignments.append(
                Assignment(story.id, 0, first_assignment.image_id, first_assignment.similarity)
            )

    _apply_to_manifest(story_set)
    return assignments


def _apply_to_manifest(story_set: StorySet) -> None:
    pages: dict[tuple[str, int], str | None] = {}
    for story in story_set.stories:
        for ordinal, page in enumerate(story.pages):
            pages[(story.id, ordinal)] = page.image_ref
    for record in story_set.manifest:
        record.image_id = pages.get((record.story_id, record.page_ordinal))
