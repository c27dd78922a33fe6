"""Independent brute-force oracles for the acceptance suite.

These deliberately share no code with the package: similarities, greedy
rules, and pagination are re-implemented literally, pair by pair, in plain
Python. Quadratic is fine here.
"""

from __future__ import annotations

import math


def oracle_cosine(a: list[float], b: list[float]) -> float:
    dot = 0.0
    na = 0.0
    nb = 0.0
    for i in range(len(a)):
        dot += a[i] * b[i]
        na += a[i] * a[i]
        nb += b[i] * b[i]
    if na == 0.0 or nb == 0.0:
        return 0.0
    return dot / (math.sqrt(na) * math.sqrt(nb))


def oracle_paginate(sentences: list[str], max_sentences: int, max_chars: int) -> list[list[str]]:
    """Literal greedy fill: take whole sentences while both limits hold; a
    lone oversized sentence occupies its own page."""
    pages: list[list[str]] = []
    current: list[str] = []
    for sentence in sentences:
        if not current:
            current = [sentence]
            continue
        joined = " ".join(current + [sentence])
        if len(current) + 1 <= max_sentences and len(joined) <= max_chars:
            current.append(sentence)
        else:
            pages.append(current)
            current = [sentence]
    if current:
        pages.append(current)
    return pages


def oracle_assign(
    stories: list[tuple[str, list[dict]]],
    images: list[dict],
    page_vectors: dict[tuple[str, int], list[float]],
    image_vectors: dict[str, list[float]],
    section_order: list[str],
) -> list[tuple[str, int, str]]:
    """Literal sequential greedy rule over explicit candidate enumerations.

    `stories` is [(story_id, [{"ordinal": int, "section": str}, ...])] with
    content pages only; `images` is [{"id": str, "section": str}]. Returns
    (story_id, ordinal, image_id) triples in processing order.
    """
    position = {section: i for i, section in enumerate(section_order)}
    owners: dict[str, int] = {}
    for image in images:
        owners[image["section"]] = owners.get(image["section"], 0) + 1

    result: list[tuple[str, int, str]] = []
    for story_id, pages in stories:
        previous: str | None = None
        for page in pages:
            local = [img for img in images if img["section"] == page["section"]]
            using_global = not local
            pool = local if local else list(images)

            scored = []
            for img in pool:
                similarity = oracle_cosine(
                    page_vectors[(story_id, page["ordinal"])], image_vectors[img["id"]]
                )
                multi_penalty = 0 if (using_global and owners[img["section"]] > 1) else 1
                proximity = abs(
                    position.get(page["section"], 0) - position.get(img["section"], 0)
                )
                scored.append(
                    (
                        -similarity,
                        multi_penalty if using_global else 0,
                        proximity,
                        img["id"],
                    )
                )
            scored.sort()
            choice = scored[0][3]
            if previous is not None and choice == previous and len(scored) > 1:
                choice = scored[1][3]
            result.append((story_id, page["ordinal"], choice))
            previous = choice
    return result


def crop_contains(crop: tuple[int, int, int, int], width: int, height: int) -> bool:
    x, y, w, h = crop
    return x >= 0 and y >= 0 and w >= 1 and h >= 1 and x + w <= width and y + h <= height


def crop_maximal(crop: tuple[int, int, int, int], width: int, height: int) -> bool:
    """Analytic maximality: a centered max crop pins one dimension to the image."""
    _, _, w, h = crop
    return w == width or h == height
