"""Article model, canonical file format, and section filtering.

The canonical article file is a YAML document (``format_version: 1``) with
the page metadata, an ordered flat list of sections (the tree is rebuilt
from heading levels), and an image metadata list. It is the hermetic input
format; wikitext is a second front-end that produces the same model.
"""

from __future__ import annotations

import copy
from dataclasses import dataclass, field
from pathlib import Path
from typing import Iterator

import yaml

from .errors import ArticleValidationError, ParseError

CANONICAL_FORMAT_VERSION = 1

ROOT_INDEX = ""

DEFAULT_SECTION_BLOCKLIST = (
    "See also",
    "References",
    "External links",
    "Notes",
    "Further reading",
    "Bibliography",
)

_TOP_LEVEL_KEYS = {
    "format_version",
    "title",
    "description",
    "language",
    "category",
    "source_url",
    "overview",
    "sections",
    "images",
}
_SECTION_KEYS = {"level", "title", "text", "index"}
_IMAGE_KEYS = {
    "id",
    "url",
    "caption",
    "alt_caption",
    "width",
    "height",
    "section_index",
    "license",
}


@dataclass
class ImageAsset:
    """Metadata for one article image; pixels are never stored here."""

    id: str
    source_url: str
    caption: str
    width: int
    height: int
    section_index: str
    license_tag: str
    # Secondary caption slot for when markup and dataset records disagree;
    # we record both and never guess precedence.
    alt_caption: str = ""

    def is_usable(self) -> bool:
        """Images without resolution metadata are excluded from matching."""
        return self.width > 0 and self.height > 0

    def filename(self) -> str:
        return self.source_url.rstrip("/").rsplit("/", 1)[-1]


@dataclass
class Section:
    """One node of the heading tree; root (level 0) holds the overview."""

    title: str
    text: str
    level: int
    index: str = ROOT_INDEX
    children: list["Section"] = field(default_factory=list)
    image_refs: list[str] = field(default_factory=list)

    def is_text_bearing(self) -> bool:
        return bool(self.text.strip())


@dataclass
class Article:
    """A parsed article: page metadata plus the section tree and images."""

    title: str
    description: str
    language: str
    source_url: str
    root: Section
    images: list[ImageAsset] = field(default_factory=list)
    category: str = "uncategorized"
    warnings: list[str] = field(default_factory=list, compare=False)

    def sections(self) -> Iterator[Section]:
        """Pre-order walk of the tree, root first."""
        return iter_sections(self.root)

    def section_by_index(self, index: str) -> Section | None:
        for sec in self.sections():
            if sec.index == index:
                return sec
        return None

    def level1_sections(self) -> list[Section]:
        return list(self.root.children)


def iter_sections(root: Section) -> Iterator[Section]:
    yield root
    for child in root.children:
        yield from iter_sections(child)


def assign_indices(root: Section) -> None:
    """Derive pre-order ordinal-path indices: root '', children '1', '1.1', ..."""
    root.index = ROOT_INDEX

    def walk(node: Section) -> None:
        for ordinal, child in enumerate(node.children, start=1):
            child.index = f"{node.index}.{ordinal}" if node.index else str(ordinal)
            walk(child)

    walk(root)


def attach_image_refs(article: Article) -> None:
    """Rebuild each section's image_refs from the article image list."""
    by_section: dict[str, list[str]] = {}
    for img in article.images:
        by_section.setdefault(img.section_index, []).append(img.id)
    for sec in article.sections():
        sec.image_refs = by_section.get(sec.index, [])


def validate_article(article: Article) -> None:
    """Raise ArticleValidationError on any broken invariant."""
    if not article.title.strip():
        raise ArticleValidationError("article title must be non-empty")
    if article.root.level != 0:
        raise ArticleValidationError("root section must have level 0")

    seen: set[str] = set()
    for sec in article.sections():
        if sec.index in seen:
            raise ArticleValidationError(f"duplicate section index {sec.index!r}")
        seen.add(sec.index)
        if sec.index != ROOT_INDEX and not sec.title.strip():
            raise ArticleValidationError(f"section {sec.index} has an empty title")
        if not sec.is_text_bearing() and not sec.children:
            raise ArticleValidationError(
                f"section {sec.index or 'root'} has neither text nor children"
            )
        for child in sec.children:
            if child.level != sec.level + 1:
                raise ArticleValidationError(
                    f"section {child.index}: level {child.level} under parent level {sec.level}"
                )

    image_ids: set[str] = set()
    for img in article.images:
        if img.id in image_ids:
            raise ArticleValidationError(f"duplicate image id {img.id!r}")
        image_ids.add(img.id)
        if img.width < 0 or img.height < 0:
            raise ArticleValidationError(f"image {img.id}: negative dimensions")
        if not img.license_tag.strip():
            raise ArticleValidationError(f"image {img.id}: license tag must be recorded")
        if img.section_index not in seen:
            raise ArticleValidationError(
                f"image {img.id}: unknown section index {img.section_index!r}"
            )


def _require(mapping: dict, key: str, kind: type, where: str):
    if key not in mapping:
        raise ArticleValidationError(f"{where}: missing required field {key!r}")
    value = mapping[key]
    if not isinstance(value, kind):
        raise ArticleValidationError(f"{where}: field {key!r} must be {kind.__name__}")
    return value


def _reject_unknown(mapping: dict, allowed: set[str], where: str) -> None:
    unknown = sorted(set(mapping) - allowed)
    if unknown:
        raise ArticleValidationError(f"{where}: unknown field(s) {', '.join(unknown)}")


def parse_article(document: str, source: str = "<string>") -> Article:
    """Parse a canonical article document into a validated Article.

    Raises ParseError (with line/column) for YAML syntax problems and
    ArticleValidationError for structural violations.
    """
    try:
        data = yaml.safe_load(document)
    except yaml.MarkedYAMLError as exc:
        mark = exc.problem_mark
        line = mark.line + 1 if mark else None
        column = mark.column + 1 if mark else None
        raise ParseError(f"{source}: {exc.problem or 'invalid YAML'}", line, column) from exc
    except yaml.YAMLError as exc:
        raise ParseError(f"{source}: invalid YAML: {exc}") from exc

    if not isinstance(data, dict):
        raise ParseError(f"{source}: document must be a mapping", 1, 1)
    _reject_unknown(data, _TOP_LEVEL_KEYS, source)

    version = data.get("format_version")
    if version != CANONICAL_FORMAT_VERSION:
        raise ArticleValidationError(
            f"{source}: unsupported format_version {version!r} (expected {CANONICAL_FORMAT_VERSION})"
        )

    title = _require(data, "title", str, source)
    root = Section(
        title=title,
        text=str(data.get("overview") or ""),
        level=0,
    )

    stack = [root]
    for pos, raw in enumerate(data.get("sections") or [], start=1):
        where = f"{source}: sections[{pos}]"
        if not isinstance(raw, dict):
            raise ArticleValidationError(f"{where}: must be a mapping")
        _reject_unknown(raw, _SECTION_KEYS, where)
        level = _require(raw, "level", int, where)
        sec_title = _require(raw, "title", str, where)
        if level < 1:
            raise ArticleValidationError(f"{where}: level must be >= 1")
        if level > stack[-1].level + 1:
            raise ArticleValidationError(
                f"{where}: level jump from {stack[-1].level} to {level}"
            )
        while stack[-1].level >= level:
            stack.pop()
        section = Section(title=sec_title, text=str(raw.get("text") or ""), level=level)
        section._declared_index = raw.get("index")  # type: ignore[attr-defined]
        stack[-1].children.append(section)
        stack.append(section)

    assign_indices(root)
    for sec in iter_sections(root):
        declared = getattr(sec, "_declared_index", None)
        if declared is not None and str(declared) != sec.index:
            raise ArticleValidationError(
                f"{source}: section {sec.title!r} declares index {declared!r}, derived {sec.index!r}"
            )

    images = []
    for pos, raw in enumerate(data.get("images") or [], start=1):
        where = f"{source}: images[{pos}]"
        if not isinstance(raw, dict):
            raise ArticleValidationError(f"{where}: must be a mapping")
        _reject_unknown(raw, _IMAGE_KEYS, where)
        images.append(
            ImageAsset(
                id=str(_require(raw, "id", str, where)),
                source_url=str(_require(raw, "url", str, where)),
                caption=str(raw.get("caption") or ""),
                alt_caption=str(raw.get("alt_caption") or ""),
                width=int(raw.get("width") or 0),
                height=int(raw.get("height") or 0),
                section_index=str(raw.get("section_index", ROOT_INDEX) or ROOT_INDEX),
                license_tag=str(_require(raw, "license", str, where)),
            )
        )

    article = Article(
        title=title,
        description=str(data.get("description") or ""),
        language=str(data.get("language") or "en"),
        source_url=str(data.get("source_url") or ""),
        root=root,
        images=images,
        category=str(data.get("category") or "uncategorized"),
    )
    validate_article(article)
    attach_image_refs(article)
    return article


def load_article(path: str | Path) -> Article:
    path = Path(path)
    return parse_article(path.read_text(encoding="utf-8"), source=str(path))


def emit_canonical(article: Article) -> str:
    """Debug serializer; parse_article(emit_canonical(a)) round-trips."""
    doc: dict = {
        "format_version": CANONICAL_FORMAT_VERSION,
        "title": article.title,
        "description": article.description,
        "language": article.language,
        "category": article.category,
        "source_url": article.source_url,
        "overview": article.root.text,
        "sections": [
            {"index": sec.index, "level": sec.level, "title": sec.title, "text": sec.text}
            for sec in article.sections()
            if sec.level > 0
        ],
        "images": [
            {
                "id": img.id,
                "url": img.source_url,
                "caption": img.caption,
                "alt_caption": img.alt_caption,
                "width": img.width,
                "height": img.height,
                "section_index": img.section_index,
                "license": img.license_tag,
            }
            for img in article.images
        ],
    }
    return yaml.safe_dump(doc, sort_keys=False, allow_unicode=True, width=100000)


def filter_sections(article: Article, blocklist: tuple[str, ...] | list[str] | None = None) -> Article:
    """Return a new Article without blocklisted subtrees; indices re-derived.

    Matching is case-insensitive on the section title. Images owned by a
    removed subtree are dropped; the input article is untouched.
    """
    if blocklist is None:
        blocklist = DEFAULT_SECTION_BLOCKLIST
    blocked = {title.strip().lower() for title in blocklist}

    index_map: dict[str, str] = {}

    def keep(node: Section) -> Section:
        kept = Section(title=node.title, text=node.text, level=node.level)
        kept._old_index = node.index  # type: ignore[attr-defined]
        for child in node.children:
            if child.title.strip().lower() in blocked:
                continue
            kept.children.append(keep(child))
        return kept

    new_root = keep(article.root)
    assign_indices(new_root)
    for sec in iter_sections(new_root):
        index_map[sec._old_index] = sec.index  # type: ignore[attr-defined]
        del sec._old_index  # type: ignore[attr-defined]

    images = [
        ImageAsset(
            id=img.id,
            source_url=img.source_url,
            caption=img.caption,
            alt_caption=img.alt_caption,
            width=img.width,
            height=img.height,
            section_index=index_map[img.section_index],
            license_tag=img.license_tag,
        )
        for img in article.images
        if img.section_index in index_map
    ]

    filtered = Article(
        title=article.title,
        description=article.description,
        language=article.language,
        source_url=article.source_url,
        root=new_root,
        images=images,
        category=article.category,
        warnings=list(article.warnings),
    )
    attach_image_refs(filtered)
    return filtered


def copy_article(article: Article) -> Article:
    return copy.deepcopy(article)
