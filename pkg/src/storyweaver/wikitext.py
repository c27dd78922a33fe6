"""Wikitext front-end: a deliberately small subset of MediaWiki markup.

Supported: ``==Heading==`` nesting, plain paragraphs, ``[[File:...|caption]]``
image links, inline links/bold/italic. Tables, templates, and refs are
skipped with a recorded warning; heading level jumps are clamped to
parent level + 1. Complex structures are out of scope by design.
"""

from __future__ import annotations

import re

from .article import (
    Article,
    ImageAsset,
    ROOT_INDEX,
    Section,
    assign_indices,
    attach_image_refs,
    iter_sections,
    validate_article,
)

_HEADING_RE = re.compile(r"^(={1,6})\s*(.+?)\s*\1\s*$")
_COMMENT_RE = re.compile(r"<!--.*?-->", re.DOTALL)
_REF_RE = re.compile(r"<ref[^>/]*/>|<ref[^>]*>.*?</ref>", re.DOTALL | re.IGNORECASE)
_BOLD_ITALIC_RE = re.compile(r"'{2,5}")
_WIKILINK_RE = re.compile(r"\[\[([^\]|[]+)(?:\|([^\][]*))?\]\]")
_EXTLINK_RE = re.compile(r"\[(?:https?|ftp)://\S+(?:\s+([^\]]+))?\]")
_MAGIC_RE = re.compile(r"__[A-Z]+__")

_FILE_PREFIXES = ("file:", "image:")
_FILE_OPTIONS = {
    "thumb",
    "thumbnail",
    "frame",
    "framed",
    "frameless",
    "border",
    "right",
    "left",
    "center",
    "none",
    "baseline",
    "middle",
    "top",
    "bottom",
}
_SIZE_OPTION_RE = re.compile(r"^(x?\d+px|upright(=[\d.]+)?)$", re.IGNORECASE)


def _find_file_link(line: str, start: int = 0) -> tuple[int, int] | None:
    """Locate the next [[File:...]] span, honoring nested brackets."""
    lower = line.lower()
    for prefix in _FILE_PREFIXES:
        pos = lower.find("[[" + prefix, start)
        if pos < 0:
            continue
        depth = 0
        i = pos
        while i < len(line) - 1:
            pair = line[i : i + 2]
            if pair == "[[":
                depth += 1
                i += 2
            elif pair == "]]":
                depth -= 1
                i += 2
                if depth == 0:
                    return pos, i
            else:
                i += 1
        return pos, len(line)  # unterminated; swallow the rest of the line
    return None


def _split_file_params(body: str) -> list[str]:
    """Split on top-level pipes, keeping pipes inside nested [[...]] intact."""
    parts: list[str] = []
    depth = 0
    current: list[str] = []
    i = 0
    while i < len(body):
        pair = body[i : i + 2]
        if pair == "[[":
            depth += 1
            current.append(pair)
            i += 2
        elif pair == "]]":
            depth -= 1
            current.append(pair)
            i += 2
        elif body[i] == "|" and depth == 0:
            parts.append("".join(current))
            current = []
            i += 1
        else:
            current.append(body[i])
            i += 1
    parts.append("".join(current))
    return parts


def _clean_inline(text: str) -> str:
    text = _REF_RE.sub("", text)
    text = _MAGIC_RE.sub("", text)
    text = _EXTLINK_RE.sub(lambda m: m.group(1) or "", text)
    text = _WIKILINK_RE.sub(lambda m: (m.group(2) if m.group(2) is not None else m.group(1)).strip(), text)
    text = _BOLD_ITALIC_RE.sub("", text)
    return re.sub(r"[ \t]+", " ", text).strip()


def parse_wikitext(
    markup: str,
    title: str = "Untitled",
    description: str = "",
    language: str = "en",
    source_url: str = "",
) -> Article:
    """Parse the supported wikitext subset into an Article.

    Unsupported constructs never crash the parse; they are dropped and a
    warning is recorded on the returned Article.
    """
    warnings: list[str] = []
    markup = _COMMENT_RE.sub("", markup)

    root = Section(title=title, text="", level=0)
    stack = [root]
    paragraphs: dict[int, list[str]] = {id(root): []}
    parents: dict[int, Section] = {}
    pending_images: list[tuple[Section, str, str]] = []  # (section, target, caption)

    lines = markup.split("\n")
    i = 0
    in_table = False
    brace_depth = 0
    while i < len(lines):
        line = lines[i]
        stripped = line.strip()
        i += 1

        if in_table:
            if stripped.startswith("|}"):
                in_table = False
            continue
        if stripped.startswith("{|"):
            in_table = True
            warnings.append(f"skipped table starting at line {i}")
            continue

        if brace_depth > 0 or stripped.startswith("{{"):
            if brace_depth == 0:
                name = stripped[2:].split("|", 1)[0].split("}}", 1)[0].strip() or "?"
                warnings.append(f"skipped template {{{{{name}}}}} at line {i}")
            brace_depth += stripped.count("{{") - stripped.count("}}")
            brace_depth = max(brace_depth, 0)
            continue

        heading = _HEADING_RE.match(stripped)
        if heading:
            level = len(heading.group(1)) - 1
            if level < 1:
                warnings.append(f"promoted level-0 heading {heading.group(2)!r} to level 1")
                level = 1
            while stack[-1].level >= level:
                stack.pop()
            if level > stack[-1].level + 1:
                warnings.append(
                    f"clamped heading {heading.group(2)!r} from level {level} "
                    f"to {stack[-1].level + 1}"
                )
                level = stack[-1].level + 1
            section = Section(title=_clean_inline(heading.group(2)), text="", level=level)
            parents[id(section)] = stack[-1]
            stack[-1].children.append(section)
            stack.append(section)
            paragraphs[id(section)] = []
            continue

        # Extract any file links before treating the rest as prose.
        while (span := _find_file_link(line)) is not None:
            body = line[span[0] + 2 : span[1] - 2]
            line = line[: span[0]] + line[span[1] :]
            params = _split_file_params(body)
            target = params[0].split(":", 1)[1].strip()
            caption = ""
            for param in params[1:]:
                cleaned = param.strip()
                if not cleaned or cleaned.lower() in _FILE_OPTIONS:
                    continue
                if _SIZE_OPTION_RE.match(cleaned) or ("=" in cleaned.split("[[")[0]):
                    continue
                caption = _clean_inline(cleaned)
            pending_images.append((stack[-1], target, caption))

        text = _clean_inline(line)
        paragraphs[id(stack[-1])].append(text)

    for sec in iter_sections(root):
        parts = paragraphs.get(id(sec), [])
        blocks: list[str] = []
        for part in parts:
            if part:
                blocks.append(part)
            elif blocks and blocks[-1] != "":
                blocks.append("")
        sec.text = "\n\n".join(" ".join(b.split()) for b in "\n".join(blocks).split("\n\n") if b.strip())

    _drop_empty_leaves(root, warnings)
    assign_indices(root)

    images = []
    surviving = {id(sec): sec.index for sec in iter_sections(root)}
    for ordinal, (section, target, caption) in enumerate(pending_images, start=1):
        # If the owner was dropped as empty, keep the image on the nearest
        # surviving ancestor.
        owner = section
        while id(owner) not in surviving and id(owner) in parents:
            owner = parents[id(owner)]
        section_index = surviving.get(id(owner), ROOT_INDEX)
        images.append(
            ImageAsset(
                id=f"img-{ordinal:03d}",
                source_url=target,
                caption=caption,
                width=0,
                height=0,
                section_index=section_index,
                license_tag="unrecorded",
            )
        )

    article = Article(
        title=title,
        description=description,
        language=language,
        source_url=source_url,
        root=root,
        images=images,
        warnings=warnings,
    )
    validate_article(article)
    attach_image_refs(article)
    return article


def _drop_empty_leaves(root: Section, warnings: list[str]) -> None:
    """Remove sections that ended up with no text and no children."""

    def prune(node: Section) -> None:
        for child in node.children:
            prune(child)
        kept = [c for c in node.children if c.is_text_bearing() or c.children]
        for child in node.children:
            if child not in kept:
                warnings.append(f"dropped empty section {child.title!r}")
        node.children = kept

    prune(root)
