"""Per-page layout: template rotation, image crop, text fit, decoration color.

The template gallery ships as a versioned data file (8 short-text and
6 long-text designs) and can be overridden from the CLI. The crop is a
deterministic centered heuristic; the crop seam is a single function so a
saliency provider can replace it later.
"""

from __future__ import annotations

import json
import logging
import math
from dataclasses import dataclass
from importlib import resources
from pathlib import Path
from typing import Iterable, Literal, Sequence

from PIL import Image, UnidentifiedImageError

from .article import Article
from .errors import ConfigError
from .planner import StorySet
from .summarize import Summary

logger = logging.getLogger(__name__)

Family = Literal["short_text", "long_text"]

FAMILY_SIZES = {"short_text": 8, "long_text": 6}
FAMILY_LENGTH_THRESHOLD = 200  # mean summary chars; strictly above goes long-form
DEFAULT_FALLBACK_COLOR = (64, 64, 64)

# Story canvas is portrait 9:16; slot fractions convert to pixel aspect with it.
PAGE_ASPECT = 9 / 16


@dataclass(frozen=True)
class Rect:
    x: float
    y: float
    w: float
    h: float

    def area(self) -> float:
        return self.w * self.h

    def intersection_area(self, other: "Rect") -> float:
        dx = min(self.x + self.w, other.x + other.w) - max(self.x, other.x)
        dy = min(self.y + self.h, other.y + other.h) - max(self.y, other.y)
        return dx * dy if dx > 0 and dy > 0 else 0.0

    def within_unit(self) -> bool:
        return 0 <= self.x and 0 <= self.y and self.x + self.w <= 1 + 1e-9 and self.y + self.h <= 1 + 1e-9


@dataclass(frozen=True)
class CropRect:
    x: int
    y: int
    w: int
    h: int


@dataclass(frozen=True)
class LayoutTemplate:
    id: str
    family: Family
    image_slot: Rect
    text_slot: Rect
    decoration_slots: tuple[Rect, ...]
    base_font_scale: float
    scrim: bool

    def image_aspect(self) -> float:
        return (self.image_slot.w / self.image_slot.h) * PAGE_ASPECT


@dataclass
class PageLayout:
    template_id: str
    crop: CropRect | None
    font_size: float
    decoration_color: tuple[int, int, int]


@dataclass
class Gallery:
    version: int
    families: dict[Family, list[LayoutTemplate]]

    def template_by_id(self, template_id: str) -> LayoutTemplate:
        for templates in self.families.values():
            for tpl in templates:
                if tpl.id == template_id:
                    return tpl
        raise KeyError(template_id)


def _parse_rect(raw: dict) -> Rect:
    return Rect(float(raw["x"]), float(raw["y"]), float(raw["w"]), float(raw["h"]))


def load_gallery(path: str | Path | None = None) -> Gallery:
    """Load and validate a template gallery; None loads the shipped one."""
    if path is None:
        data = json.loads(
            resources.files("storyweaver").joinpath("data/templates.json").read_text("utf-8")
        )
    else:
        data = json.loads(Path(path).read_text("utf-8"))

    families: dict[Family, list[LayoutTemplate]] = {"short_text": [], "long_text": []}
    for raw in data.get("templates", []):
        template = LayoutTemplate(
            id=str(raw["id"]),
            family=raw["family"],
            image_slot=_parse_rect(raw["image_slot"]),
            text_slot=_parse_rect(raw["text_slot"]),
            decoration_slots=tuple(_parse_rect(r) for r in raw.get("decoration_slots", [])),
            base_font_scale=float(raw.get("base_font_scale", 1.0)),
            scrim=bool(raw.get("scrim", False)),
        )
        if template.family not in families:
            raise ConfigError(f"template {template.id}: unknown family {template.family!r}")
        _validate_template(template)
        families[template.family].append(template)

    for family, expected in FAMILY_SIZES.items():
        if len(families[family]) != expected:
            raise ConfigError(
                f"gallery must ship {expected} {family} designs, found {len(families[family])}"
            )
    return Gallery(version=int(data.get("gallery_version", 0)), families=families)


def _validate_template(template: LayoutTemplate) -> None:
    for name, rect in [("image_slot", template.image_slot), ("text_slot", template.text_slot)] + [
        (f"decoration_slots[{i}]", r) for i, r in enumerate(template.decoration_slots)
    ]:
        if not rect.within_unit():
            raise ConfigError(f"template {template.id}: {name} exceeds the unit page")
    overlap = template.image_slot.intersection_area(template.text_slot)
    if not template.scrim and overlap > 0.15 * template.text_slot.area() + 1e-9:
        raise ConfigError(
            f"template {template.id}: image/text overlap needs a contrast scrim"
        )
    if template.base_font_scale <= 0:
        raise ConfigError(f"template {template.id}: base_font_scale must be positive")


def choose_family(summaries: Iterable[Summary]) -> Family:
    """One family per article: mean summary length strictly above the
    threshold selects the long-text designs."""
    lengths = [len(s.text) for s in summaries]
    if not lengths:
        raise ValueError("at least one summary is required")
    mean = sum(lengths) / len(lengths)
    return "long_text" if mean > FAMILY_LENGTH_THRESHOLD else "short_text"


def select_template(page_ordinal: int, family: Family, gallery: Gallery) -> str:
    """Deterministic rotation; ordinal 0 (the cover) is always design 0."""
    templates = gallery.families[family]
    return templates[page_ordinal % len(templates)].id


def _nearest_shrinking(value: float) -> int:
    """Round to the nearest integer; exact halves shrink toward the center."""
    floor = math.floor(value + 1e-9)
    return floor + 1 if value - floor > 0.5 + 1e-9 else floor


def compute_crop(width: int, height: int, aspect: float) -> CropRect:
    """Largest centered axis-aligned rectangle of the given aspect inside
    width x height; the derived dimension rounds to the nearest pixel (ties
    shrink) and offsets round toward the center."""
    if width <= 0 or height <= 0:
        raise ValueError("image dimensions must be positive")
    if aspect <= 0:
        raise ValueError("aspect must be positive")
    if width / height >= aspect:
        crop_h = height
        crop_w = min(width, max(1, _nearest_shrinking(height * aspect)))
        return CropRect(x=(width - crop_w + 1) // 2, y=0, w=crop_w, h=crop_h)
    crop_w = width
    crop_h = min(height, max(1, _nearest_shrinking(width / aspect)))
    return CropRect(x=0, y=(height - crop_h + 1) // 2, w=crop_w, h=crop_h)


def fit_text(snippet: str, text_slot: Rect, base_font_scale: float) -> float:
    """Piecewise font scale on snippet length, relative to the template base."""
    count = len(snippet)
    if count <= 80:
        scale = 1.0
    elif count <= 200:
        scale = 0.85
    else:
        scale = 0.7
    return scale * base_font_scale


def _dominant_weighted(
    weighted: Iterable[tuple[int, tuple[int, int, int]]]
) -> tuple[int, int, int]:
    buckets: dict[tuple[int, int, int], list[int]] = {}
    for count, (r, g, b) in weighted:
        key = (r >> 4, g >> 4, b >> 4)
        acc = buckets.setdefault(key, [0, 0, 0, 0])
        acc[0] += count
        acc[1] += count * r
        acc[2] += count * g
        acc[3] += count * b
    if not buckets:
        raise ValueError("raster has no pixels")

    def mean_of(acc: list[int]) -> tuple[int, int, int]:
        return (
            int(round(acc[1] / acc[0])),
            int(round(acc[2] / acc[0])),
            int(round(acc[3] / acc[0])),
        )

    def luma(color: tuple[int, int, int]) -> float:
        return 0.299 * color[0] + 0.587 * color[1] + 0.114 * color[2]

    best_key = min(
        buckets,
        key=lambda k: (-buckets[k][0], luma(mean_of(buckets[k])), k),
    )
    return mean_of(buckets[best_key])


def dominant_color(pixels: Sequence[tuple[int, int, int]]) -> tuple[int, int, int]:
    """Most populous 4-bit-per-channel bucket, reported as the bucket mean;
    count ties break toward the darker bucket."""
    if not pixels:
        raise ValueError("raster has no pixels")
    return _dominant_weighted((1, px) for px in pixels)


def dominant_color_of_file(
    path: str | Path, fallback: tuple[int, int, int] = DEFAULT_FALLBACK_COLOR
) -> tuple[int, int, int]:
    """Decode a PNG/JPEG raster and extract its dominant color; undecodable
    inputs fall back to the configured neutral with a warning."""
    try:
        with Image.open(path) as img:
            rgb = img.convert("RGB")
            # color counting happens in C; the bucket pass only sees uniques
            counted = rgb.getcolors(maxcolors=rgb.width * rgb.height + 1) or []
            return _dominant_weighted(counted)
    except (OSError, UnidentifiedImageError, ValueError) as exc:
        logger.warning("could not decode %s for dominant color: %s", path, exc)
        return fallback


def resolve_local_image(source_url: str, base_dir: Path | None) -> Path | None:
    """Map a non-remote image reference to a readable local path, if any."""
    if source_url.startswith(("http://", "https://")):
        return None
    candidate = Path(source_url[7:] if source_url.startswith("file://") else source_url)
    if not candidate.is_absolute() and base_dir is not None:
        candidate = base_dir / candidate
    return candidate if candidate.is_file() else None


def plan_layouts(
    story_set: StorySet,
    article: Article,
    summaries: dict[str, Summary],
    gallery: Gallery | None = None,
    article_dir: Path | None = None,
    fallback_color: tuple[int, int, int] = DEFAULT_FALLBACK_COLOR,
) -> dict[tuple[str, int], PageLayout]:
    """Layouts for every cover and content page of the story set."""
    gallery = gallery or load_gallery()
    family = choose_family(summaries.values())
    images = {img.id: img for img in article.images}
    color_cache: dict[str, tuple[int, int, int]] = {}

    def color_for(image_id: str) -> tuple[int, int, int]:
        if image_id not in color_cache:
            local = resolve_local_image(images[image_id].source_url, article_dir)
            if local is None:
                logger.warning(
                    "image %s is not locally decodable; using fallback decoration color",
                    image_id,
                )
                color_cache[image_id] = fallback_color
            else:
                color_cache[image_id] = dominant_color_of_file(local, fallback_color)
        return color_cache[image_id]

    layouts: dict[tuple[str, int], PageLayout] = {}
    for story in story_set.stories:
        for ordinal, page in enumerate(story.pages):
            if page.kind == "end":
                continue
            template = gallery.template_by_id(select_template(ordinal, family, gallery))
            page.template_id = template.id
            crop = None
            color = fallback_color
            if page.image_ref is not None:
                asset = images[page.image_ref]
                crop = compute_crop(asset.width, asset.height, template.image_aspect())
                color = color_for(page.image_ref)
            layouts[(story.id, ordinal)] = PageLayout(
                template_id=template.id,
                crop=crop,
                font_size=round(fit_text(page.snippet, template.text_slot, template.base_font_scale), 4),
                decoration_color=color,
            )
    return layouts
