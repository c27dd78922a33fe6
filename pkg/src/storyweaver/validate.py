"""Structural validation of story documents and bundles.

Violations are data, not exceptions: the D-principles become checkable
constraints (page-count bound, snippet budget, image attribution,
link closure, manifest coverage).
"""

from __future__ import annotations

import json
from html.parser import HTMLParser
from pathlib import Path

from .render import Violation

PAGE_COUNT_MIN = 3
PAGE_COUNT_MAX = 10
SNIPPET_CHAR_LIMIT = 200

_VOID_TAGS = {"meta", "link", "img", "br", "hr", "input", "base", "source", "track", "wbr"}


class _Node:
    __slots__ = ("tag", "attrs", "children", "text")

    def __init__(self, tag: str, attrs: dict[str, str | None]):
        self.tag = tag
        self.attrs = attrs
        self.children: list[_Node] = []
        self.text: list[str] = []

    def find_all(self, tag: str) -> list["_Node"]:
        found = []
        for child in self.children:
            if child.tag == tag:
                found.append(child)
            found.extend(child.find_all(tag))
        return found

    def all_text(self) -> str:
        parts = list(self.text)
        for child in self.children:
            parts.append(child.all_text())
        return "".join(parts)

    def classes(self) -> list[str]:
        return (self.attrs.get("class") or "").split()


class _TreeParser(HTMLParser):
    def __init__(self):
        super().__init__(convert_charrefs=True)
        self.root = _Node("#document", {})
        self.stack = [self.root]
        self.errors: list[str] = []

    def handle_starttag(self, tag, attrs):
        node = _Node(tag, dict(attrs))
        self.stack[-1].children.append(node)
        if tag not in _VOID_TAGS:
            self.stack.append(node)

    def handle_startendtag(self, tag, attrs):
        self.stack[-1].children.append(_Node(tag, dict(attrs)))

    def handle_endtag(self, tag):
        if tag in _VOID_TAGS:
            return
        if len(self.stack) > 1 and self.stack[-1].tag == tag:
            self.stack.pop()
        else:
            open_tags = [n.tag for n in self.stack[1:]]
            self.errors.append(f"unexpected </{tag}> (open: {' > '.join(open_tags) or 'none'})")

    def handle_data(self, data):
        self.stack[-1].text.append(data)


def parse_document(document: str) -> tuple[_Node, list[str]]:
    parser = _TreeParser()
    parser.feed(document)
    parser.close()
    errors = list(parser.errors)
    unclosed = [n.tag for n in parser.stack[1:] if n.tag not in ("html", "body")]
    if unclosed:
        errors.append(f"unclosed tag(s): {', '.join(unclosed)}")
    return parser.root, errors


def validate_story_html(document: str) -> list[Violation]:
    """Check one story document against the structural story constraints."""
    violations: list[Violation] = []
    root, errors = parse_document(document)
    for error in errors:
        violations.append(Violation("markup", error))

    story_roots = root.find_all("amp-story")
    if len(story_roots) != 1:
        violations.append(
            Violation("structure", f"expected exactly one amp-story root, found {len(story_roots)}")
        )
        return violations
    story = story_roots[0]

    pages = story.find_all("amp-story-page")
    if not PAGE_COUNT_MIN <= len(pages) <= PAGE_COUNT_MAX:
        violations.append(
            Violation(
                "length",
                f"story has {len(pages)} pages; must be between "
                f"{PAGE_COUNT_MIN} and {PAGE_COUNT_MAX}",
            )
        )
    if pages:
        if pages[0].attrs.get("data-kind") != "cover":
            violations.append(Violation("structure", "first page is not a cover page"))
        if pages[-1].attrs.get("data-kind") != "end":
            violations.append(Violation("structure", "last page is not an end page"))

    for page in pages:
        page_id = page.attrs.get("id", "?")
        if not page.find_all("amp-story-grid-layer"):
            violations.append(Violation("structure", f"page {page_id} has no grid layer"))
        if page.attrs.get("data-kind") == "content":
            snippets = [n for n in page.find_all("p") if "snippet" in n.classes()]
            if not snippets:
                violations.append(Violation("structure", f"content page {page_id} has no snippet"))
            else:
                length = len(snippets[0].all_text())
                if length > SNIPPET_CHAR_LIMIT and "data-overflow" not in page.attrs:
                    violations.append(
                        Violation(
                            "length",
                            f"content page {page_id} snippet has {length} chars "
                            f"without an overflow flag",
                        )
                    )
            has_image = bool(page.find_all("amp-img"))
            if not has_image and "data-text-only" not in page.attrs:
                violations.append(
                    Violation("structure", f"content page {page_id} lacks an image and is not flagged text-only")
                )

    for img in story.find_all("amp-img"):
        for attr in ("src", "width", "height", "data-source-url", "data-license"):
            if not img.attrs.get(attr):
                violations.append(
                    Violation("attribution", f"amp-img missing required attribute {attr}")
                )
    return violations


def _internal_targets(node: _Node) -> list[str]:
    targets = []
    for anchor in node.find_all("a"):
        href = anchor.attrs.get("href") or ""
        targets.append(href)
    for img in node.find_all("amp-img"):
        targets.append(img.attrs.get("src") or "")
    return [
        t
        for t in targets
        if t
        and not t.startswith(("http://", "https://", "data:", "mailto:", "#"))
    ]


def validate_bundle(bundle_dir: str | Path) -> list[Violation]:
    """Validate a built bundle: documents, link closure, manifest coverage."""
    bundle_dir = Path(bundle_dir)
    violations: list[Violation] = []
    if not bundle_dir.is_dir():
        return [Violation("structure", f"bundle directory {bundle_dir} does not exist")]

    manifest_path = bundle_dir / "manifest.json"
    if not manifest_path.is_file():
        return [Violation("structure", "manifest.json is missing")]
    try:
        manifest = json.loads(manifest_path.read_text(encoding="utf-8"))
    except json.JSONDecodeError as exc:
        return [Violation("structure", f"manifest.json is not valid JSON: {exc}")]

    stories = {s["id"]: s for s in manifest.get("stories", [])}
    entry = manifest.get("entry")
    if entry not in stories:
        violations.append(Violation("structure", f"entry story {entry!r} not in manifest"))

    for story_id in stories:
        doc_path = bundle_dir / f"{story_id}.html"
        if not doc_path.is_file():
            violations.append(Violation("link", f"story document {story_id}.html is missing"))
            continue
        for violation in validate_story_html(doc_path.read_text(encoding="utf-8")):
            violations.append(Violation(violation.code, f"{story_id}.html: {violation.message}"))

    if not (bundle_dir / "index.html").is_file():
        violations.append(Violation("structure", "index.html is missing"))

    for doc_path in sorted(bundle_dir.glob("*.html")):
        node, _ = parse_document(doc_path.read_text(encoding="utf-8"))
        for target in _internal_targets(node):
            clean = target.split("#", 1)[0]
            if clean and not (bundle_dir / clean).is_file():
                violations.append(
                    Violation("link", f"{doc_path.name}: dangling internal link {target!r}")
                )

    seen_sections: set[str] = set()
    for record in manifest.get("records", []):
        section = record.get("section_index")
        if section in seen_sections:
            violations.append(
                Violation("bijection", f"manifest has a duplicate row for section {section!r}")
            )
        seen_sections.add(section)
        story = stories.get(record.get("story_id"))
        if story is None:
            violations.append(
                Violation("bijection", f"manifest row for section {section!r} names unknown story")
            )
        elif not 0 <= record.get("page_ordinal", -1) < story["page_count"]:
            violations.append(
                Violation(
                    "bijection",
                    f"manifest row for section {section!r} points outside its story",
                )
            )
    return violations
