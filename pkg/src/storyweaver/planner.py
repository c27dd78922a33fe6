"""Story planning: Compact vs Multi-Path decision, pagination, navigation.

A Compact story presents the whole article as one page sequence. A
Multi-Path set gives the overview its own entry story and every section
node a story of its own: nodes with children merge their children into one
page each, childless nodes split their summary across pages at sentence
boundaries. Stories that would exceed the page budget are chained into
"Part k" siblings linked end-page-to-cover.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Literal, Sequence

from .article import Article, ROOT_INDEX, Section, iter_sections
from .errors import PlanningError
from .summarize import Summary

StoryKind = Literal["main", "section"]
PageKind = Literal["cover", "content", "end"]
PlanMode = Literal["compact", "multipath"]

MAIN_STORY_ID = "main"


@dataclass(frozen=True)
class PlannerConfig:
    n: int = 10  # max pages per story, cover and end included
    max_chars_per_page: int = 200
    max_sentences_per_page: int = 2

    def __post_init__(self):
        if self.n < 4:
            raise ValueError("n must be >= 4 (cover, content, end, headroom)")
        if self.max_chars_per_page < 60:
            raise ValueError("max_chars_per_page must be >= 60")
        if self.max_sentences_per_page < 1:
            raise ValueError("max_sentences_per_page must be >= 1")

    @property
    def max_content_pages(self) -> int:
        return self.n - 2


@dataclass
class Page:
    kind: PageKind
    heading: str
    snippet: str
    section_index: str
    source_anchor: str
    image_ref: str | None = None
    template_id: str | None = None
    nav_targets: list[str] = field(default_factory=list)
    overflow: bool = False
    truncated: bool = False
    text_only: bool = False
    # Which section this page is the manifest's canonical presentation of;
    # None for covers, end pages, and navigational preview pages.
    canonical_for: str | None = None


@dataclass
class Story:
    id: str
    kind: StoryKind
    title: str
    section_index: str
    pages: list[Page] = field(default_factory=list)

    @property
    def outgoing_links(self) -> list[str]:
        return list(self.pages[-1].nav_targets) if self.pages else []

    @property
    def content_pages(self) -> list[Page]:
        return [p for p in self.pages if p.kind == "content"]


@dataclass
class ManifestRecord:
    story_id: str
    page_ordinal: int
    section_index: str
    summary_origin: str
    truncated: bool
    overflow: bool
    image_id: str | None = None


@dataclass
class StorySet:
    stories: list[Story]
    entry: str
    manifest: list[ManifestRecord]
    mode: PlanMode
    warnings: list[str] = field(default_factory=list)

    def story_by_id(self, story_id: str) -> Story | None:
        for story in self.stories:
            if story.id == story_id:
                return story
        return None


def decide_mode(s: int, cfg: PlannerConfig) -> PlanMode:
    """Compact iff the level-1 content-section count fits one story."""
    if s < 0:
        raise ValueError("section count must be >= 0")
    return "compact" if s <= cfg.n - 2 else "multipath"


def story_id_for(section_index: str) -> str:
    if section_index == ROOT_INDEX:
        return MAIN_STORY_ID
    return "s" + section_index.replace(".", "-")


def source_anchor(article: Article, section: Section) -> str:
    if section.level == 0:
        return article.source_url
    fragment = section.title.replace(" ", "_")
    return f"{article.source_url}#{fragment}"


def split_pages(summary: Summary, cfg: PlannerConfig, heading: str = "") -> list[Page]:
    """Greedy sentence fill: whole sentences only, a lone oversized sentence
    takes its own page with the overflow flag set."""
    pages: list[Page] = []
    current: list[str] = []
    current_len = 0

    def flush():
        nonlocal current, current_len
        if not current:
            return
        snippet = " ".join(current)
        pages.append(
            Page(
                kind="content",
                heading=heading if not pages else "",
                snippet=snippet,
                section_index=summary.section_index,
                source_anchor="",
                overflow=len(snippet) > cfg.max_chars_per_page,
            )
        )
        current = []
        current_len = 0

    for sentence in summary.sentences:
        extra = len(sentence) + (1 if current else 0)
        if current and (
            len(current) >= cfg.max_sentences_per_page
            or current_len + extra > cfg.max_chars_per_page
        ):
            flush()
            extra = len(sentence)
        current.append(sentence)
        current_len += extra
    flush()
    return pages


def truncate_snippet(summary: Summary, cfg: PlannerConfig) -> tuple[str, bool, bool]:
    """Whole-sentence prefix of the summary that fits one page.

    Returns (snippet, truncated, overflow); the first sentence is always
    kept even when it alone exceeds the limit.
    """
    kept: list[str] = []
    length = 0
    for sentence in summary.sentences:
        extra = len(sentence) + (1 if kept else 0)
        if kept and length + extra > cfg.max_chars_per_page:
            break
        kept.append(sentence)
        length += extra
    snippet = " ".join(kept)
    return snippet, len(kept) < len(summary.sentences), len(snippet) > cfg.max_chars_per_page


def merge_pages(
    children: Sequence[tuple[str, Summary]], cfg: PlannerConfig
) -> list[Page]:
    """One page per child summary: heading is the child's title, snippet its
    summary truncated at a whole-sentence boundary."""
    pages = []
    for title, summary in children:
        snippet, truncated, overflow = truncate_snippet(summary, cfg)
        pages.append(
            Page(
                kind="content",
                heading=title,
                snippet=snippet,
                section_index=summary.section_index,
                source_anchor="",
                truncated=truncated,
                overflow=overflow,
            )
        )
    return pages


def chain_pages(pages: list[Page], limit: int) -> list[list[Page]]:
    """Chunk content pages into story-sized runs (the overflow chain)."""
    return [pages[i : i + limit] for i in range(0, len(pages), limit)] or [[]]


def plan(article: Article, summaries: dict[str, Summary], cfg: PlannerConfig) -> StorySet:
    """Build the full story set over a filtered article."""
    sections = list(article.sections())
    for sec in sections:
        if sec.is_text_bearing() and sec.index not in summaries:
            raise PlanningError(
                f"no summary for retained section {sec.index or 'root'} ({sec.title!r})"
            )

    mode = decide_mode(len(article.root.children), cfg)
    warnings: list[str] = []
    builder = _Builder(article, summaries, cfg, warnings)

    if mode == "compact":
        stories = builder.compact()
    else:
        stories = builder.multipath()

    manifest = _collect_manifest(stories, summaries)
    return StorySet(stories=stories, entry=MAIN_STORY_ID, manifest=manifest, mode=mode, warnings=warnings)


class _Builder:
    def __init__(self, article: Article, summaries: dict[str, Summary], cfg: PlannerConfig, warnings: list[str]):
        self.article = article
        self.summaries = summaries
        self.cfg = cfg
        self.warnings = warnings

    def preview_summary(self, section: Section) -> Summary:
        """Summary shown for a section on a navigational page: its own when
        text-bearing, otherwise its first text-bearing descendant's."""
        if section.is_text_bearing():
            return self.summaries[section.index]
        for desc in iter_sections(section):
            if desc.is_text_bearing():
                return self.summaries[desc.index]
        raise PlanningError(f"section {section.index} has no text-bearing descendant")

    def _preview_page(self, section: Section) -> Page:
        summary = self.preview_summary(section)
        snippet, truncated, overflow = truncate_snippet(summary, self.cfg)
        return Page(
            kind="content",
            heading=section.title,
            snippet=snippet,
            section_index=section.index,
            source_anchor=source_anchor(self.article, section),
            truncated=truncated,
            overflow=overflow,
        )

    def _own_page(self, section: Section) -> Page:
        """One canonical page presenting the section's own summary."""
        page = self._preview_page(section)
        page.canonical_for = section.index
        return page

    def _anchor_pages(self, pages: list[Page], section: Section) -> list[Page]:
        for page in pages:
            if not page.source_anchor:
                page.source_anchor = source_anchor(self.article, section)
        return pages

    def _make_stories(
        self,
        base_id: str,
        kind: StoryKind,
        title: str,
        section: Section,
        content: list[Page],
        final_targets: list[str],
        cover_snippet: str = "",
    ) -> list[Story]:
        """Wrap content pages into one story, chaining into parts on overflow."""
        if not content:
            raise PlanningError(f"story {base_id} would have no content pages")
        parts = chain_pages(content, self.cfg.max_content_pages)
        stories = []
        for ordinal, part in enumerate(parts, start=1):
            part_id = base_id if ordinal == 1 else f"{base_id}-p{ordinal}"
            part_title = title if ordinal == 1 else f"{title} (Part {ordinal})"
            last = ordinal == len(parts)
            targets = list(final_targets) if last else [f"{base_id}-p{ordinal + 1}"]
            cover = Page(
                kind="cover",
                heading=part_title,
                snippet=cover_snippet if ordinal == 1 else "",
                section_index=section.index,
                source_anchor=source_anchor(self.article, section),
            )
            end = Page(
                kind="end",
                heading="Explore more",
                snippet="",
                section_index=section.index,
                source_anchor=self.article.source_url,
                nav_targets=targets,
            )
            stories.append(
                Story(
                    id=part_id,
                    kind=kind,
                    title=part_title,
                    section_index=section.index,
                    pages=[cover, *part, end],
                )
            )
        if len(parts) > 1:
            self.warnings.append(
                f"story {base_id} overflowed {self.cfg.max_content_pages} content "
                f"pages; chained into {len(parts)} parts"
            )
        return stories

    def compact(self) -> list[Story]:
        root = self.article.root
        pages: list[Page] = []
        if root.is_text_bearing():
            root_pages = split_pages(self.summaries[ROOT_INDEX], self.cfg)
            root_pages[0].canonical_for = ROOT_INDEX
            pages.extend(self._anchor_pages(root_pages, root))
        for sec in self.article.sections():
            if sec.level > 0 and sec.is_text_bearing():
                pages.append(self._own_page(sec))
        return self._make_stories(
            MAIN_STORY_ID,
            "main",
            self.article.title,
            root,
            pages,
            final_targets=[],
            cover_snippet=self.article.description,
        )

    def multipath(self) -> list[Story]:
        root = self.article.root
        level1 = self.article.level1_sections()

        if root.is_text_bearing():
            main_pages = split_pages(self.summaries[ROOT_INDEX], self.cfg)
            main_pages[0].canonical_for = ROOT_INDEX
            self._anchor_pages(main_pages, root)
        else:
            main_pages = [self._preview_page(sec) for sec in level1]
        stories = self._make_stories(
            MAIN_STORY_ID,
            "main",
            self.article.title,
            root,
            main_pages,
            final_targets=[story_id_for(sec.index) for sec in level1],
            cover_snippet=self.article.description,
        )

        for sec in self.article.sections():
            if sec.level == 0:
                continue
            stories.extend(self._section_story(sec))
        return stories

    def _section_story(self, sec: Section) -> list[Story]:
        sid = story_id_for(sec.index)
        if sec.children:
            pages: list[Page] = []
            if sec.is_text_bearing():
                pages.append(self._own_page(sec))
            pages.extend(self._preview_page(child) for child in sec.children)
            targets = [story_id_for(child.index) for child in sec.children]
            return self._make_stories(sid, "section", sec.title, sec, pages, targets)

        pages = split_pages(self.summaries[sec.index], self.cfg)
        pages[0].canonical_for = sec.index
        self._anchor_pages(pages, sec)
        sibling = self._next_sibling(sec)
        targets = [story_id_for(sibling.index)] if sibling else []
        targets.append(MAIN_STORY_ID)
        return self._make_stories(sid, "section", sec.title, sec, pages, targets)

    def _next_sibling(self, sec: Section) -> Section | None:
        parent = self._parent_of(sec)
        if parent is None:
            return None
        siblings = parent.children
        pos = siblings.index(sec)
        return siblings[pos + 1] if pos + 1 < len(siblings) else None

    def _parent_of(self, sec: Section) -> Section | None:
        for candidate in self.article.sections():
            if sec in candidate.children:
                return candidate
        return None


def _collect_manifest(stories: list[Story], summaries: dict[str, Summary]) -> list[ManifestRecord]:
    records = []
    for story in stories:
        for ordinal, page in enumerate(story.pages):
            if page.canonical_for is None:
                continue
            summary = summaries[page.canonical_for]
            records.append(
                ManifestRecord(
                    story_id=story.id,
                    page_ordinal=ordinal,
                    section_index=page.canonical_for,
                    summary_origin=summary.origin,
                    truncated=page.truncated,
                    overflow=page.overflow,
                )
            )
    return records


def reachable_story_ids(story_set: StorySet) -> set[str]:
    """BFS over end-page links from the entry story."""
    seen: set[str] = set()
    queue = [story_set.entry]
    while queue:
        story_id = queue.pop(0)
        if story_id in seen:
            continue
        seen.add(story_id)
        story = story_set.story_by_id(story_id)
        if story is not None:
            queue.extend(t for t in story.outgoing_links if t not in seen)
    return seen
