"""AMP Web Story rendering and bundle assembly.

Every story becomes one standalone HTML document using the story/page/
grid-layer element vocabulary; the bundle adds an index, a review manifest,
an assets manifest, and (for local inputs) copied image files. Output is
byte-deterministic: fixed attribute order, fixed indentation, sorted JSON.
"""

from __future__ import annotations

import html
import json
import logging
import shutil
from dataclasses import dataclass, field
from pathlib import Path
from typing import Iterable

from .article import Article, ImageAsset
from .errors import EnvironmentFailure
from .layout import PageLayout, resolve_local_image
from .matching import Assignment
from .planner import Page, Story, StorySet

logger = logging.getLogger(__name__)

BUNDLE_MANIFEST_VERSION = 1
FONT_BASE_PX = 28

PLACEHOLDER_POSTER = (
    "data:image/svg+xml;charset=utf-8,"
    "<svg xmlns='http://www.w3.org/2000/svg' width='720' height='1280'/>"
)

AMP_BOILERPLATE = (
    "<style amp-boilerplate>body{-webkit-animation:-amp-start 8s steps(1,end) 0s 1 "
    "normal both;-moz-animation:-amp-start 8s steps(1,end) 0s 1 normal both;"
    "-ms-animation:-amp-start 8s steps(1,end) 0s 1 normal both;animation:-amp-start "
    "8s steps(1,end) 0s 1 normal both}@-webkit-keyframes -amp-start{from{visibility:"
    "hidden}to{visibility:visible}}@-moz-keyframes -amp-start{from{visibility:hidden}"
    "to{visibility:visible}}@-ms-keyframes -amp-start{from{visibility:hidden}to"
    "{visibility:visible}}@-o-keyframes -amp-start{from{visibility:hidden}to"
    "{visibility:visible}}@keyframes -amp-start{from{visibility:hidden}to{visibility:"
    "visible}}</style><noscript><style amp-boilerplate>body{-webkit-animation:none;"
    "-moz-animation:none;-ms-animation:none;animation:none}</style></noscript>"
)

STORY_CSS = (
    "amp-story{font-family:'Helvetica Neue',Helvetica,Arial,sans-serif;color:#1a1a1a}"
    ".slot{position:absolute}"
    ".text-slot{display:flex;flex-direction:column;justify-content:center}"
    ".text-slot.scrim{background:rgba(0,0,0,0.55);border-radius:8px;color:#ffffff;"
    "padding:8px}"
    ".decoration{border-radius:2px}"
    "h1{font-size:34px;margin:0}"
    "h2{font-size:22px;margin:0 0 8px 0}"
    "p.snippet{line-height:1.45;margin:0}"
    "p.credit{font-size:11px;margin:8px 0 0 0;opacity:0.8}"
    ".end-nav{position:absolute;left:8%;top:18%;width:84%}"
    ".end-nav ul{list-style:none;margin:16px 0;padding:0}"
    ".end-nav li{margin:10px 0}"
    ".end-nav a{color:#0a57d0;text-decoration:none;font-size:20px}"
    ".source-link a{color:#444444;font-size:15px}"
)


@dataclass
class RenderContext:
    """Everything a story document needs beyond the story itself."""

    article_title: str
    language: str
    source_url: str
    story_titles: dict[str, str]
    images: dict[str, ImageAsset]
    image_srcs: dict[str, str]
    publisher: str = "storyweaver"
    audio: dict[tuple[str, int], str] = field(default_factory=dict)


@dataclass(frozen=True)
class Violation:
    code: str
    message: str


@dataclass
class StoryBundle:
    path: Path
    index_file: str
    story_files: dict[str, str]
    manifest_file: str
    assets_file: str


def _esc(text: str) -> str:
    return html.escape(text, quote=True)


def _pct(value: float) -> str:
    return f"{value * 100:.2f}%"


def _slot_style(rect) -> str:
    return (
        f"left:{_pct(rect.x)};top:{_pct(rect.y)};"
        f"width:{_pct(rect.w)};height:{_pct(rect.h)}"
    )


def _hex_color(color: tuple[int, int, int]) -> str:
    return "#{:02x}{:02x}{:02x}".format(*color)


def _object_position(crop, asset: ImageAsset) -> str:
    x_den = asset.width - crop.w
    y_den = asset.height - crop.h
    x = 50.0 if x_den <= 0 else crop.x / x_den * 100.0
    y = 50.0 if y_den <= 0 else crop.y / y_den * 100.0
    return f"object-fit:cover;object-position:{x:.2f}% {y:.2f}%"


def _resolve_image(page: Page, ctx: RenderContext) -> str | None:
    """A page's renderable image id; unresolved references degrade to
    text-only rendering instead of a broken image element."""
    if page.image_ref is None:
        return None
    if page.image_ref not in ctx.images or page.image_ref not in ctx.image_srcs:
        logger.warning(
            "page for section %r references unknown image %r; rendering text-only",
            page.section_index,
            page.image_ref,
        )
        return None
    return page.image_ref


def _amp_img(image_id: str, layout: PageLayout | None, ctx: RenderContext, indent: str) -> list[str]:
    asset = ctx.images[image_id]
    src = ctx.image_srcs[image_id]
    crop = layout.crop if layout else None
    style = _object_position(crop, asset) if crop else "object-fit:cover"
    width = crop.w if crop else asset.width
    height = crop.h if crop else asset.height
    alt = asset.caption or asset.filename()
    return [
        f'{indent}<amp-img alt="{_esc(alt)}" data-license="{_esc(asset.license_tag)}" '
        f'data-source-url="{_esc(asset.source_url)}" height="{height}" layout="fill" '
        f'src="{_esc(src)}" style="{style}" width="{width}"></amp-img>',
    ]


def _page_open_tag(
    story: Story, ordinal: int, page: Page, ctx: RenderContext, image_id: str | None
) -> str:
    page_id = "cover" if page.kind == "cover" else "end" if page.kind == "end" else f"p{ordinal}"
    attrs = [f'id="{page_id}"', f'data-kind="{page.kind}"']
    if page.section_index:
        attrs.append(f'data-section="{page.section_index}"')
    if page.template_id:
        attrs.append(f'data-template="{page.template_id}"')
    if page.overflow:
        attrs.append('data-overflow="1"')
    if page.truncated:
        attrs.append('data-truncated="1"')
    if page.kind == "content" and image_id is None:
        attrs.append('data-text-only="1"')
    audio = ctx.audio.get((story.id, ordinal))
    if audio:
        attrs.append(f'background-audio="{_esc(audio)}"')
    return f'  <amp-story-page {" ".join(attrs)}>'


def _render_cover(story: Story, ordinal: int, page: Page, layout: PageLayout | None, ctx: RenderContext) -> list[str]:
    image_id = _resolve_image(page, ctx)
    lines = [_page_open_tag(story, ordinal, page, ctx, image_id)]
    if image_id:
        lines.append('    <amp-story-grid-layer template="fill">')
        lines.extend(_amp_img(image_id, layout, ctx, "      "))
        lines.append("    </amp-story-grid-layer>")
    lines.append('    <amp-story-grid-layer template="vertical">')
    lines.append('      <div class="slot text-slot scrim" style="left:6.00%;top:58.00%;width:88.00%;height:30.00%">')
    lines.append(f"        <h1>{_esc(page.heading)}</h1>")
    if page.snippet:
        lines.append(f'        <p class="snippet">{_esc(page.snippet)}</p>')
    lines.append("      </div>")
    lines.append("    </amp-story-grid-layer>")
    lines.append("  </amp-story-page>")
    return lines


def _render_content(
    story: Story,
    ordinal: int,
    page: Page,
    layout: PageLayout | None,
    ctx: RenderContext,
    template,
) -> list[str]:
    image_id = _resolve_image(page, ctx)
    lines = [_page_open_tag(story, ordinal, page, ctx, image_id)]
    if image_id:
        lines.append('    <amp-story-grid-layer template="vertical">')
        slot_style = _slot_style(template.image_slot) if template else "left:0%;top:0%;width:100%;height:55%"
        lines.append(f'      <div class="slot image-slot" style="{slot_style}">')
        lines.extend(_amp_img(image_id, layout, ctx, "        "))
        lines.append("      </div>")
        lines.append("    </amp-story-grid-layer>")
    lines.append('    <amp-story-grid-layer template="vertical">')
    if template is not None and layout is not None:
        for rect in template.decoration_slots:
            lines.append(
                f'      <div class="slot decoration" '
                f'style="{_slot_style(rect)};background-color:{_hex_color(layout.decoration_color)}"></div>'
            )
    text_class = "slot text-slot scrim" if template is not None and template.scrim else "slot text-slot"
    text_style = _slot_style(template.text_slot) if template else "left:8.00%;top:62.00%;width:84.00%;height:30.00%"
    lines.append(f'      <div class="{text_class}" style="{text_style}">')
    if page.heading:
        lines.append(f"        <h2>{_esc(page.heading)}</h2>")
    font_px = f"{(layout.font_size if layout else 1.0) * FONT_BASE_PX:.1f}px"
    lines.append(f'        <p class="snippet" style="font-size:{font_px}">{_esc(page.snippet)}</p>')
    lines.append("      </div>")
    lines.append("    </amp-story-grid-layer>")
    if page.source_anchor:
        lines.append('    <amp-story-page-outlink layout="nodisplay">')
        lines.append(f'      <a href="{_esc(page.source_anchor)}">Read Full Article</a>')
        lines.append("    </amp-story-page-outlink>")
    lines.append("  </amp-story-page>")
    return lines


def _render_end(story: Story, ordinal: int, page: Page, ctx: RenderContext) -> list[str]:
    lines = [_page_open_tag(story, ordinal, page, ctx, None)]
    lines.append('    <amp-story-grid-layer template="vertical">')
    lines.append('      <div class="end-nav">')
    lines.append(f"        <h2>{_esc(page.heading)}</h2>")
    lines.append("        <ul>")
    for target in page.nav_targets:
        label = ctx.story_titles.get(target, target)
        lines.append(f'          <li><a href="{_esc(target)}.html">{_esc(label)}</a></li>')
    lines.append("        </ul>")
    if ctx.source_url:
        lines.append(
            f'        <p class="source-link"><a href="{_esc(ctx.source_url)}">Read Full Article</a></p>'
        )
    lines.append("      </div>")
    lines.append("    </amp-story-grid-layer>")
    lines.append("  </amp-story-page>")
    return lines


def render_story(
    story: Story,
    layouts: dict[tuple[str, int], PageLayout],
    assignments: dict[tuple[str, int], Assignment],
    ctx: RenderContext,
    gallery=None,
) -> str:
    """Render one story as a standalone AMP Web Story document."""
    from .layout import load_gallery

    gallery = gallery or load_gallery()
    poster = PLACEHOLDER_POSTER
    if story.pages and story.pages[0].image_ref:
        poster = ctx.image_srcs.get(story.pages[0].image_ref, PLACEHOLDER_POSTER)
    lines = [
        "<!doctype html>",
        f'<html amp lang="{_esc(ctx.language)}">',
        "<head>",
        '<meta charset="utf-8">',
        '<meta name="viewport" content="width=device-width,minimum-scale=1,initial-scale=1">',
        f"<title>{_esc(story.title)}</title>",
        f'<link rel="canonical" href="{_esc(story.id)}.html">',
        '<script async src="https://cdn.ampproject.org/v0.js"></script>',
        '<script async custom-element="amp-story" src="https://cdn.ampproject.org/v0/amp-story-1.0.js"></script>',
        '<script async custom-element="amp-story-page-attachment" src="https://cdn.ampproject.org/v0/amp-story-page-attachment-0.1.js"></script>',
        AMP_BOILERPLATE,
        f"<style amp-custom>{STORY_CSS}</style>",
        "</head>",
        "<body>",
        f'<amp-story standalone title="{_esc(story.title)}" publisher="{_esc(ctx.publisher)}" '
        f'publisher-logo-src="{PLACEHOLDER_POSTER}" poster-portrait-src="{_esc(poster)}">',
    ]
    for ordinal, page in enumerate(story.pages):
        layout = layouts.get((story.id, ordinal))
        if page.kind == "cover":
            lines.extend(_render_cover(story, ordinal, page, layout, ctx))
        elif page.kind == "end":
            lines.extend(_render_end(story, ordinal, page, ctx))
        else:
            template = gallery.template_by_id(layout.template_id) if layout else None
            lines.extend(_render_content(story, ordinal, page, layout, ctx, template))
    lines.extend(["</amp-story>", "</body>", "</html>", ""])
    return "\n".join(lines)


def render_index(story_set: StorySet, ctx: RenderContext) -> str:
    lines = [
        "<!doctype html>",
        f'<html lang="{_esc(ctx.language)}">',
        "<head>",
        '<meta charset="utf-8">',
        f"<title>{_esc(ctx.article_title)}</title>",
        "</head>",
        "<body>",
        f"<h1>{_esc(ctx.article_title)}</h1>",
        f'<p><a href="{_esc(story_set.entry)}.html">Open the Main Story</a></p>',
        "<ul>",
    ]
    for story in story_set.stories:
        lines.append(
            f'  <li><a href="{_esc(story.id)}.html">{_esc(story.title)}</a> '
            f"({story.kind}, {len(story.pages)} pages)</li>"
        )
    lines.extend(["</ul>", "</body>", "</html>", ""])
    return "\n".join(lines)


def _bundle_image_srcs(
    article: Article,
    article_dir: Path | None,
    offline_assets: bool,
    staging: Path,
    warnings: list[str],
) -> tuple[dict[str, str], list[dict]]:
    """Decide each image's src in the bundle; copy local files into assets/."""
    srcs: dict[str, str] = {}
    records = []
    assets_dir = staging / "assets"
    for img in article.images:
        local = resolve_local_image(img.source_url, article_dir)
        bundled = None
        if local is not None:
            assets_dir.mkdir(exist_ok=True)
            suffix = local.suffix or ".bin"
            bundled = f"assets/{img.id}{suffix}"
            shutil.copyfile(local, staging / bundled)
            srcs[img.id] = bundled
        elif img.source_url.startswith(("http://", "https://")):
            if offline_assets:
                bundled = _download_asset(img, assets_dir, warnings)
            srcs[img.id] = bundled or img.source_url
        else:
            warnings.append(f"image {img.id}: unresolvable source {img.source_url!r}")
            srcs[img.id] = img.source_url
        records.append(
            {
                "id": img.id,
                "source_url": img.source_url,
                "license": img.license_tag,
                "caption": img.caption,
                "width": img.width,
                "height": img.height,
                "section_index": img.section_index,
                "bundled": bundled,
            }
        )
    return srcs, records


def _download_asset(img: ImageAsset, assets_dir: Path, warnings: list[str]) -> str | None:
    import requests

    try:
        response = requests.get(img.source_url, timeout=30)
        response.raise_for_status()
    except requests.RequestException as exc:
        warnings.append(f"image {img.id}: offline copy failed ({exc}); keeping remote URL")
        return None
    assets_dir.mkdir(exist_ok=True)
    suffix = Path(img.source_url.split("?", 1)[0]).suffix or ".bin"
    bundled = f"assets/{img.id}{suffix}"
    (assets_dir.parent / bundled).write_bytes(response.content)
    return bundled


def build_manifest_doc(
    story_set: StorySet,
    article: Article,
    assignments: dict[tuple[str, int], Assignment],
    gallery_version: int,
) -> dict:
    pages = []
    for story in story_set.stories:
        for ordinal, page in enumerate(story.pages):
            assignment = assignments.get((story.id, ordinal))
            pages.append(
                {
                    "story_id": story.id,
                    "page_ordinal": ordinal,
                    "kind": page.kind,
                    "heading": page.heading,
                    "section_index": page.section_index,
                    "image_id": page.image_ref,
                    "template_id": page.template_id,
                    "similarity": round(assignment.similarity, 6) if assignment else None,
                    "fallback_reason": assignment.fallback_reason if assignment else None,
                    "truncated": page.truncated,
                    "overflow": page.overflow,
                    "text_only": page.text_only,
                    "source_anchor": page.source_anchor,
                }
            )
    return {
        "manifest_version": BUNDLE_MANIFEST_VERSION,
        "gallery_version": gallery_version,
        "article": {
            "title": article.title,
            "category": article.category,
            "language": article.language,
            "source_url": article.source_url,
            "section_count": sum(1 for _ in article.sections()),
            "image_count": len(article.images),
        },
        "mode": story_set.mode,
        "entry": story_set.entry,
        "stories": [
            {
                "id": story.id,
                "kind": story.kind,
                "title": story.title,
                "section_index": story.section_index,
                "page_count": len(story.pages),
            }
            for story in story_set.stories
        ],
        "records": [
            {
                "story_id": rec.story_id,
                "page_ordinal": rec.page_ordinal,
                "section_index": rec.section_index,
                "image_id": rec.image_id,
                "summary_origin": rec.summary_origin,
                "truncated": rec.truncated,
                "overflow": rec.overflow,
            }
            for rec in story_set.manifest
        ],
        "pages": pages,
        "warnings": list(story_set.warnings),
    }


def render_bundle(
    story_set: StorySet,
    article: Article,
    layouts: dict[tuple[str, int], PageLayout],
    assignments: dict[tuple[str, int], Assignment],
    out_dir: str | Path,
    gallery=None,
    article_dir: Path | None = None,
    offline_assets: bool = False,
    audio: dict[tuple[str, int], str] | None = None,
) -> StoryBundle:
    """Write the full bundle; stages everything first, then swaps atomically."""
    from .layout import load_gallery

    gallery = gallery or load_gallery()
    out_dir = Path(out_dir)
    parent = out_dir.parent
    if not parent.is_dir():
        raise EnvironmentFailure(f"output parent directory {parent} does not exist")
    staging = parent / f".{out_dir.name}.staging"
    if staging.exists():
        shutil.rmtree(staging)
    staging.mkdir()

    try:
        warnings: list[str] = []
        image_srcs, asset_records = _bundle_image_srcs(
            article, article_dir, offline_assets, staging, warnings
        )
        story_set.warnings.extend(warnings)

        ctx = RenderContext(
            article_title=article.title,
            language=article.language,
            source_url=article.source_url,
            story_titles={s.id: s.title for s in story_set.stories},
            images={img.id: img for img in article.images},
            image_srcs=image_srcs,
            audio=audio or {},
        )

        story_files = {}
        for story in story_set.stories:
            filename = f"{story.id}.html"
            document = render_story(story, layouts, assignments, ctx, gallery)
            (staging / filename).write_text(document, encoding="utf-8")
            story_files[story.id] = filename

        (staging / "index.html").write_text(render_index(story_set, ctx), encoding="utf-8")

        manifest_doc = build_manifest_doc(story_set, article, assignments, gallery.version)
        (staging / "manifest.json").write_text(
            json.dumps(manifest_doc, sort_keys=True, indent=2) + "\n", encoding="utf-8"
        )
        (staging / "assets.json").write_text(
            json.dumps(asset_records, sort_keys=True, indent=2) + "\n", encoding="utf-8"
        )
    except Exception:
        shutil.rmtree(staging, ignore_errors=True)
        raise

    if out_dir.exists():
        shutil.rmtree(out_dir)
    staging.rename(out_dir)
    return StoryBundle(
        path=out_dir,
        index_file="index.html",
        story_files=story_files,
        manifest_file="manifest.json",
        assets_file="assets.json",
    )
